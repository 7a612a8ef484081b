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


#include "ckn/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ckn/errors.hpp"

namespace ckn {

double weighted_grad_pnorm(const Field& u, const CknParams& params, double k_factor, exec::Policy policy) {
  if (!u.has_gradient) fail(ErrorKind::MissingGradient, "field '" + u.tag + "' carries no gradient data");
  if (!(k_factor >= 1.0)) fail(ErrorKind::RegionViolation, "k_factor must be >= 1");
  const double p = params.p;
  const std::vector<double> rw = u.grid->power_weights(u.dim - p * params.a);
  const std::vector<double> aw = u.angular_weights();
  auto r = u.grid->nodes();
  const std::size_t m = u.cols();
  const double k2 = k_factor * k_factor;
  return exec::sum_rows(
      u.rows(),
      [&](std::size_t i) {
        double row = 0.0;
        if (u.is_radial()) {
          row = aw[0] * std::pow(std::fabs(u.grad_r[i]), p);
        } else {
          const double inv_r = 1.0 / r[i];
          for (std::size_t j = 0; j < m; ++j) {
            const double gr = u.grad_r[i * m + j];
            const double gt = u.grad_psi[i * m + j] * inv_r;
            row += aw[j] * std::pow(gr * gr + k2 * gt * gt, 0.5 * p);
          }
        }
        return rw[i] * row;
      },
      policy);
}

double weighted_lq_norm(const Field& u, const CknParams& params, exec::Policy policy) {
  const double q = params.q;
  const std::vector<double> rw = u.grid->power_weights(u.dim - q * params.b);
  const std::vector<double> aw = u.angular_weights();
  const std::size_t m = u.cols();
  return exec::sum_rows(
      u.rows(),
      [&](std::size_t i) {
        double row = 0.0;
        for (std::size_t j = 0; j < m; ++j) row += aw[j] * std::pow(std::fabs(u.value[i * m + j]), q);
        return rw[i] * row;
      },
      policy);
}

FunctionalReport evaluate_functionals(const Field& u, const CknParams& params) {
  FunctionalReport out;
  out.grid_meta = u.grid->describe() + (u.is_radial() ? ", radial" : ", " + std::to_string(u.cols()) + " angles");
  out.grad_term = weighted_grad_pnorm(u, params);
  out.q_term = weighted_lq_norm(u, params);
  if (out.q_term == 0.0) fail(ErrorKind::ZeroField, "deficit of a zero field");
  const double raw = std::pow(out.grad_term, 1.0 / params.p) / std::pow(out.q_term, 1.0 / params.q) -
                     sharp_constant(params);
  out.deficit = raw;
  if (raw < 0.0 && raw >= -1e-8) {
    out.deficit = 0.0;
    out.clamped = true;
    out.diagnostic = "clamped quadrature-level negative deficit " + std::to_string(raw);
  } else if (raw < -1e-8) {
    out.diagnostic = "deficit below -1e-8: inequality violated on this discretization";
  }
  return out;
}

double deficit(const Field& u, const CknParams& params) { return evaluate_functionals(u, params).deficit; }

namespace {

std::size_t ball_rows(const Field& layout, double domain_radius) {
  if (!(domain_radius > 0.0)) fail(ErrorKind::BadGridSpec, "domain radius must be positive");
  const auto rows = layout.grid->nodes_below_edge(std::log(domain_radius));
  if (!rows) fail(ErrorKind::BadGridSpec, "domain radius is not a panel edge of " + layout.grid->describe());
  return *rows;
}

}  // namespace

double quadrature_ball_measure(const Field& layout, double domain_radius) {
  const std::size_t rows = ball_rows(layout, domain_radius);
  const std::vector<double> rw = layout.grid->power_weights(layout.dim);
  const std::vector<double> aw = layout.angular_weights();
  const double angular = std::accumulate(aw.begin(), aw.end(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) total += rw[i] * angular;
  return total;
}

double weak_lebesgue_norm(const Field& layout, const std::vector<double>& magnitude, double exponent,
                          double domain_radius) {
  if (!(exponent > 0.0) || !std::isfinite(exponent)) fail(ErrorKind::BadExponent, "weak norm exponent must be > 0");
  if (magnitude.size() != layout.size()) fail(ErrorKind::GridMismatch, "magnitude count does not match the field");
  const std::size_t rows = ball_rows(layout, domain_radius);
  const std::vector<double> rw = layout.grid->power_weights(layout.dim);
  const std::vector<double> aw = layout.angular_weights();
  const std::size_t m = layout.cols();

  struct Sample {
    double level, measure;
  };
  std::vector<Sample> samples;
  samples.reserve(rows * m);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double v = std::fabs(magnitude[i * m + j]);
      if (v > 0.0) samples.push_back({v, rw[i] * aw[j]});
    }
  }
  std::sort(samples.begin(), samples.end(), [](const Sample& x, const Sample& y) { return x.level > y.level; });
  // For t just below a sampled level v the level set contains every node
  // with |f| >= v, so the supremum is approached from below at each v.
  double best = 0.0;
  double measure = 0.0;
  for (std::size_t k = 0; k < samples.size();) {
    const double level = samples[k].level;
    while (k < samples.size() && samples[k].level == level) measure += samples[k++].measure;
    best = std::max(best, level * std::pow(measure, 1.0 / exponent));
  }
  return best;
}

double weak_lebesgue_norm(const Field& u, double exponent, double domain_radius) {
  return weak_lebesgue_norm(u, u.value, exponent, domain_radius);
}

}  // namespace ckn
