// Copyright 2026 The ckn-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ckn/grid.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "ckn/errors.hpp"

namespace ckn {
namespace {

struct FixedRule {
  std::vector<double> nodes, weights;
};

// Fixed Gauss rule from GSL (Golub-Welsch) for the weight
// (b-x)^alpha (x-a)^beta on (a, b).
FixedRule gauss_rule(const gsl_integration_fixed_type* type, int count, double lo, double hi, double alpha,
                     double beta) {
  gsl_integration_fixed_workspace* ws = gsl_integration_fixed_alloc(type, count, lo, hi, alpha, beta);
  if (ws == nullptr) fail(ErrorKind::BadGridSpec, "gauss rule allocation failed");
  FixedRule rule;
  const double* x = gsl_integration_fixed_nodes(ws);
  const double* w = gsl_integration_fixed_weights(ws);
  rule.nodes.assign(x, x + count);
  rule.weights.assign(w, w + count);
  gsl_integration_fixed_free(ws);
  return rule;
}

}  // namespace

std::shared_ptr<const RadialGrid> RadialGrid::make(double t_min, double t_max, int count, int panel_order) {
  std::ostringstream spec;
  spec.precision(17);
  spec << "(t_min=" << t_min << ", t_max=" << t_max << ", count=" << count << ", panel_order=" << panel_order
       << ")";
  if (!std::isfinite(t_min) || !std::isfinite(t_max) || !(t_min < t_max)) {
    fail(ErrorKind::BadGridSpec, "requires t_min < t_max " + spec.str());
  }
  if (count < 16) fail(ErrorKind::BadGridSpec, "requires count >= 16 " + spec.str());
  if (panel_order < 1 || count % panel_order != 0) {
    fail(ErrorKind::BadGridSpec, "count must be a multiple of the panel order " + spec.str());
  }
  if (std::max(std::fabs(t_min), std::fabs(t_max)) > 700.0) {
    fail(ErrorKind::BadGridSpec, "log-radius bounds exceed the double range " + spec.str());
  }

  const FixedRule ref = gauss_rule(gsl_integration_fixed_legendre, panel_order, -1.0, 1.0, 0.0, 0.0);
  const int panels = count / panel_order;
  const double h = (t_max - t_min) / panels;

  auto grid = std::shared_ptr<RadialGrid>(new RadialGrid());
  grid->t_min_ = t_min;
  grid->t_max_ = t_max;
  grid->panel_order_ = panel_order;
  grid->t_.reserve(count);
  grid->tw_.reserve(count);
  for (int k = 0; k < panels; ++k) {
    const double left = t_min + k * h;
    const double right = (k + 1 == panels) ? t_max : t_min + (k + 1) * h;
    const double mid = 0.5 * (left + right);
    const double half = 0.5 * (right - left);
    for (int j = 0; j < panel_order; ++j) {
      grid->t_.push_back(mid + half * ref.nodes[j]);
      grid->tw_.push_back(half * ref.weights[j]);
    }
  }
  grid->r_.resize(count);
  grid->w_.resize(count);
  for (int i = 0; i < count; ++i) {
    grid->r_[i] = std::exp(grid->t_[i]);
    grid->w_[i] = grid->tw_[i] * grid->r_[i];
  }
  return grid;
}

std::vector<double> RadialGrid::power_weights(double power) const {
  std::vector<double> out(t_.size());
  for (std::size_t i = 0; i < t_.size(); ++i) out[i] = tw_[i] * std::exp(power * t_[i]);
  return out;
}

std::optional<std::size_t> RadialGrid::nodes_below_edge(double t) const {
  const int panels = count() / panel_order_;
  const double h = (t_max_ - t_min_) / panels;
  const double pos = (t - t_min_) / h;
  const double k = std::round(pos);
  if (std::fabs(pos - k) > 1e-12 * std::max(1.0, std::fabs(pos)) || k < 0 || k > panels) return std::nullopt;
  return static_cast<std::size_t>(k) * panel_order_;
}

std::shared_ptr<const RadialGrid> RadialGrid::rescaled(double scale) const {
  if (!(scale > 0.0) || !std::isfinite(scale)) fail(ErrorKind::BadGridSpec, "rescale factor must be positive");
  if (scale == 1.0) return shared_from_this();
  if (parent_ && std::fabs(scale * parent_scale_ - 1.0) < 1e-14) return parent_;
  auto out = std::const_pointer_cast<RadialGrid>(make(t_min_ / scale, t_max_ / scale, count(), panel_order_));
  out->parent_ = shared_from_this();
  out->parent_scale_ = scale;
  return out;
}

std::string RadialGrid::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "t in [" << t_min_ << ", " << t_max_ << "], " << count() << " nodes, " << panel_order_
     << "-point panels";
  return os.str();
}

bool same_grid(const RadialGrid& x, const RadialGrid& y) {
  return &x == &y || (x.t_min() == y.t_min() && x.t_max() == y.t_max() && x.count() == y.count() &&
                      x.panel_order() == y.panel_order());
}

namespace {

constexpr double kDecades = 36.9;  // e^{-36.9} ~ 1e-16

// Exponential rates in t of the bubble energy densities at both ends.
std::pair<double, double> tail_rates(const CknParams& c) {
  const double n = c.n;
  const double p = c.p;
  const double gap = c.weight_gap();
  const double origin_rate = std::min(n - c.q * c.b, p * (c.sigma() - 1.0) + n - p * c.a);
  const double tail_rate = std::min(gap / (p - 1.0), c.q * gap / (p - 1.0) - (n - c.q * c.b));
  return {origin_rate, tail_rate};
}

double window_cap(const CknParams& c, double t_cap) { return std::min(t_cap, 690.0 / c.n); }

}  // namespace

std::shared_ptr<const RadialGrid> suggest_grid(const CknParams& c, double panel_width, double t_cap) {
  const auto [origin_rate, tail_rate] = tail_rates(c);
  const double cap = window_cap(c, t_cap);
  const double lo = std::clamp(kDecades / origin_rate, 30.0, cap);
  const double hi = std::clamp(kDecades / tail_rate, 30.0, cap);
  const int order = RadialGrid::kDefaultPanelOrder;
  const int lo_panels = static_cast<int>(std::ceil(lo / panel_width));
  const int hi_panels = static_cast<int>(std::ceil(hi / panel_width));
  return RadialGrid::make(-lo_panels * panel_width, hi_panels * panel_width, order * (lo_panels + hi_panels),
                          order);
}

double truncation_estimate(const CknParams& c, double t_cap) {
  const auto [origin_rate, tail_rate] = tail_rates(c);
  const double cap = window_cap(c, t_cap);
  return std::max(std::exp(-origin_rate * std::min(cap, std::max(30.0, kDecades / origin_rate))),
                  std::exp(-tail_rate * std::min(cap, std::max(30.0, kDecades / tail_rate))));
}

std::shared_ptr<const AngularRule> AngularRule::make(int dim, int count) {
  if (dim < 2) fail(ErrorKind::BadGridSpec, "angular rule needs dim >= 2");
  if (count < 2) fail(ErrorKind::BadGridSpec, "angular rule needs at least 2 nodes");
  // x = cos(psi): sin^{n-2}(psi) dpsi = (1 - x^2)^{(n-3)/2} dx.
  const double alpha = 0.5 * (dim - 3);
  const FixedRule rule = gauss_rule(gsl_integration_fixed_jacobi, count, -1.0, 1.0, alpha, alpha);
  const double lower_sphere = dim == 2 ? 2.0 : sphere_area(dim - 1);

  auto out = std::shared_ptr<AngularRule>(new AngularRule());
  out->dim_ = dim;
  out->psi_.resize(count);
  out->cos_.resize(count);
  out->sin_.resize(count);
  out->w_.resize(count);
  // Order by increasing psi, i.e. decreasing x.
  for (int j = 0; j < count; ++j) {
    const int src = count - 1 - j;
    const double x = rule.nodes[src];
    out->psi_[j] = std::acos(x);
    out->cos_[j] = x;
    out->sin_[j] = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
    out->w_[j] = rule.weights[src] * lower_sphere;
  }
  return out;
}

bool same_rule(const AngularRule& x, const AngularRule& y) {
  return &x == &y || (x.dim() == y.dim() && x.size() == y.size());
}

}  // namespace ckn
