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


#include "ckn/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "ckn/errors.hpp"
#include "ckn/exec.hpp"
#include "ckn/functionals.hpp"
#include "ckn/rng.hpp"
#include "ckn/transforms.hpp"

namespace ckn {
namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double relative_gap(double x, double y) {
  const double s = std::max(std::fabs(x), std::fabs(y));
  return s == 0.0 ? 0.0 : std::fabs(x - y) / s;
}

}  // namespace

std::string FamilySpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << name << "(";
  if (name == "random_bumps") {
    os << "count=" << count << ",eps=[" << eps_min << "," << eps_max << "],centers=[" << center_min << ","
       << center_max << "]";
  } else {
    os << "eps=" << eps.size() << " values,centers=" << centers.size() << " values,width=" << width;
  }
  os << ",scale=" << scale << ",orthogonalize=" << orthogonalize << ",seed=" << seed << ")";
  return os.str();
}

std::vector<FamilyMember> generate_family(const FamilySpec& spec, const CknParams& params,
                                          std::shared_ptr<const RadialGrid> grid) {
  std::vector<FamilyMember> out;
  if (spec.name == "exact_bubbles") {
    for (double s : spec.eps) {
      out.push_back({sample_bubble(params, canonical_bubble(params, s), grid), "exact_bubble(scale=" + fmt(s) + ")"});
    }
    return out;
  }
  const Bubble v = canonical_bubble(params, spec.scale);
  const Field base = sample_bubble(params, v, grid);
  auto perturbation = [&](double center, double width) {
    const Field z = sample_radial(grid, params.n, std::make_shared<LogGaussianBump>(center, width));
    return spec.orthogonalize ? orthogonalize(z, v, params) : z;
  };
  if (spec.name == "bubble_plus_bump") {
    for (double c : spec.centers) {
      const Field z = perturbation(c, spec.width);
      for (double e : spec.eps) {
        out.push_back({combine(1.0, base, e, z), "bubble_plus_bump(eps=" + fmt(e) + ",center=" + fmt(c) + ")"});
      }
    }
    return out;
  }
  if (spec.name == "random_bumps") {
    SeedStream rng(spec.seed);
    for (int i = 0; i < spec.count; ++i) {
      const double e = std::exp(rng.uniform(std::log(spec.eps_min), std::log(spec.eps_max)));
      const double sign = rng.uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
      const double c = rng.uniform(spec.center_min, spec.center_max);
      const double w = rng.uniform(0.4, 1.5);
      out.push_back({combine(1.0, base, sign * e, perturbation(c, w)),
                     "random_bump(eps=" + fmt(sign * e) + ",center=" + fmt(c) + ",width=" + fmt(w) + ")"});
    }
    return out;
  }
  fail(ErrorKind::ConfigError, "unknown family '" + spec.name + "'");
}

StabilityRecord stability_ratio(const Field& u, const CknParams& params, bool n_symmetric,
                                const std::string& family_tag) {
  if (is_zero(u)) fail(ErrorKind::ZeroField, "stability ratio of a zero field");
  StabilityRecord rec;
  rec.params = params;
  rec.family_tag = family_tag.empty() ? u.tag : family_tag;
  rec.alpha = stability_exponent(params, n_symmetric);
  rec.caveat = params.a > 0.0 && params.a == params.b;
  rec.grad_norm = dap_norm(u, params);
  rec.deficit = deficit(u, params);
  rec.distance = manifold_distance(u, params).distance;
  if (rec.distance <= 1e-6 * rec.grad_norm) {
    fail(ErrorKind::OnManifold, "sample '" + rec.family_tag + "' lies on the extremal manifold");
  }
  rec.relative_distance = rec.distance / rec.grad_norm;
  rec.ratio = rec.deficit / std::pow(rec.relative_distance, rec.alpha);
  return rec;
}

ScanReport k_upper_scan(const FamilySpec& family, const CknParams& params, int sample_count, bool n_symmetric,
                        std::shared_ptr<const RadialGrid> grid) {
  if (sample_count < 1) fail(ErrorKind::EmptyFamily, "scan needs at least one sample");
  if (!grid) grid = suggest_grid(params);
  std::vector<FamilyMember> members = generate_family(family, params, grid);
  if (members.size() > static_cast<std::size_t>(sample_count)) members.resize(sample_count);

  std::vector<std::optional<StabilityRecord>> slots(members.size());
  exec::for_each_index(members.size(), [&](std::size_t i) {
    try {
      slots[i] = stability_ratio(members[i].field, params, n_symmetric, members[i].tag);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::OnManifold) throw;
    }
  });

  ScanReport out;
  out.caveat = params.a > 0.0 && params.a == params.b;
  out.upper_bound = std::numeric_limits<double>::infinity();
  for (auto& slot : slots) {
    if (!slot) {
      ++out.excluded;
      continue;
    }
    if (slot->ratio < out.upper_bound) {
      out.upper_bound = slot->ratio;
      out.argmin = out.records.size();
    }
    out.records.push_back(*slot);
  }
  if (out.records.empty()) {
    fail(ErrorKind::EmptyFamily, "no admissible sample in " + family.describe() + " after on-manifold exclusion");
  }
  return out;
}

SlopeFitReport loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2 || x.size() != y.size()) fail(ErrorKind::DegenerateFit, "slope fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) fail(ErrorKind::DegenerateFit, "slope fit needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(x.size());
  const double den = m * sxx - sx * sx;
  if (!(std::fabs(den) > 1e-300)) fail(ErrorKind::DegenerateFit, "slope fit abscissae coincide");
  SlopeFitReport out;
  out.slope = (m * sxy - sx * sy) / den;
  out.intercept = (sy - out.slope * sx) / m;
  return out;
}

SlopeFitReport exponent_slope_fit(const CknParams& params, const std::vector<double>& eps_schedule,
                                  const Field& perturbation) {
  std::vector<double> eps = eps_schedule;
  std::sort(eps.begin(), eps.end());
  if (eps.size() < 2) fail(ErrorKind::DegenerateFit, "eps schedule needs at least two values");
  if (!(eps.front() > 0.0) || eps.back() > 0.1 || std::log10(eps.back() / eps.front()) < 1.5) {
    fail(ErrorKind::DegenerateFit, "eps schedule must be positive, at most 0.1 and span 1.5 decades");
  }
  const Bubble v = canonical_bubble(params, 1.0);
  const Field base = bubble_like(params, v, perturbation);
  std::vector<double> rel(eps.size()), def(eps.size());
  exec::for_each_index(eps.size(), [&](std::size_t i) {
    const Field u = combine(1.0, base, eps[i], perturbation);
    def[i] = deficit(u, params);
    rel[i] = manifold_distance(u, params).distance / dap_norm(u, params);
  });
  for (std::size_t i = 1; i < eps.size(); ++i) {
    if (!(rel[i] > rel[i - 1])) fail(ErrorKind::DegenerateFit, "distance is not monotone in eps");
  }
  SlopeFitReport out = loglog_fit(rel, def);
  out.eps = eps;
  out.relative_distance = rel;
  out.deficit = def;
  return out;
}

MonotonicityRecord monotonicity_chain_check(const Field& u, const HatParams& hp) {
  const HatParams checked = derive_hat_params(hp.base.n, hp.base.p, hp.base.a, hp.base.b, hp.target.a, hp.target.b);
  if (checked.h < 1.0) fail(ErrorKind::RegionViolation, "the chain runs from smaller to larger a (h >= 1)");
  MonotonicityRecord out;
  out.hp = checked;
  const CknParams& t = checked.target;
  out.nu = 1.0 + std::max(1.0, t.p - 1.0) * t.gamma / t.n;
  const Field hat = hat_map(u, checked, Direction::forward);
  out.qnorm_residual = relative_gap(weighted_lq_norm(u, t), weighted_lq_norm(hat, checked.base));
  out.lhs = weighted_grad_pnorm(u, t);
  out.rhs = std::pow(checked.h, 1.0 - t.p - t.p / t.q) * weighted_grad_pnorm(hat, checked.base);
  out.grad_chain_gap = out.lhs == 0.0 ? 0.0 : (out.lhs - out.rhs) / out.lhs;
  return out;
}

ContinuityReport continuity_probe(const std::vector<CknParams>& sequence, const FamilySpec& family,
                                  int sample_count) {
  if (sequence.size() < 2) fail(ErrorKind::RegionViolation, "continuity probe needs a sequence and its limit");
  for (const CknParams& c : sequence) derive_params(c.n, c.p, c.a, c.b);
  ContinuityReport out;
  for (const CknParams& c : sequence) out.bounds.push_back(k_upper_scan(family, c, sample_count).upper_bound);
  const CknParams& limit = sequence.back();
  out.limit_bound = out.bounds.back();
  auto g = suggest_grid(limit);
  auto fine = RadialGrid::make(g->t_min(), g->t_max(), 2 * g->count(), g->panel_order());
  out.noise = std::fabs(k_upper_scan(family, limit, sample_count, false, fine).upper_bound - out.limit_bound);
  out.limsup_estimate = out.bounds[out.bounds.size() - 2];
  out.violation = out.limsup_estimate > out.limit_bound + 2.0 * out.noise;
  return out;
}

GapProbeReport translated_bubble_gap_probe(const CknParams& params, const std::vector<double>& shifts,
                                           int angle_count) {
  if (!(params.a > 0.0) || params.a != params.b) {
    fail(ErrorKind::RegionViolation, "gap probe needs a = b > 0, got " + params.describe());
  }
  const CknParams flat = derive_params(params.n, params.p, 0.0, 0.0);
  auto g = suggest_grid(flat);
  auto angles = AngularRule::make(params.n, angle_count);
  const Field u = sample_bubble(flat, canonical_bubble(flat, 1.0), g);
  const Field embedded = embed_axisym(u, angles);
  const double unorm = std::pow(weighted_lq_norm(u, flat), 1.0 / flat.q);
  const double s = sharp_constant(flat);

  GapProbeReport out;
  out.infimum = std::numeric_limits<double>::infinity();
  for (double shift : shifts) {
    if (shift == 0.0) {
      ++out.excluded;
      continue;
    }
    const Field moved = translate_axisym(u, shift, flat, angles);
    const double lhs = std::pow(weighted_grad_pnorm(moved, flat, params.k), 1.0 / flat.p) / unorm - s;
    const double core = std::pow(dap_norm(combine(1.0, embedded, -1.0, moved), flat) / unorm, 2.0);
    out.shifts.push_back(shift);
    out.lhs.push_back(lhs);
    out.rhs_core.push_back(core);
    out.ratios.push_back(lhs / core);
    out.infimum = std::min(out.infimum, lhs / core);
  }
  return out;
}

Field mollify_in_ball(const Field& u, double domain_radius) {
  return multiply_radial(u, SmoothCutoff(0.5 * domain_radius, 0.9 * domain_radius));
}

EmbeddingReport embedding_check(const Field& u, const CknParams& params, double domain_radius,
                                EmbeddingVariant variant, bool n_symmetric) {
  if (is_zero(u)) fail(ErrorKind::ZeroField, "embedding check of a zero field");
  const auto inside = u.grid->nodes_below_edge(std::log(domain_radius));
  if (!inside) fail(ErrorKind::BadGridSpec, "domain radius is not a panel edge of " + u.grid->describe());
  const std::size_t m = u.cols();
  for (std::size_t k = *inside * m; k < u.size(); ++k) {
    if (u.value[k] != 0.0 || u.grad_r[k] != 0.0 || (!u.grad_psi.empty() && u.grad_psi[k] != 0.0)) {
      fail(ErrorKind::UnsupportedField, "field '" + u.tag + "' is not supported inside the ball");
    }
  }
  const double n = params.n, p = params.p, a = params.a;
  EmbeddingReport out;
  out.p1 = n * (p - 1.0) / (n - p - a);
  out.p2 = n * (p - 1.0) / (n - a - 1.0);
  out.p3 = (n - p - p * a) / (n * p * (p - 1.0));
  out.alpha = stability_exponent(params, n_symmetric);

  const double grad = dap_norm(u, params);
  const double mass = std::pow(weighted_lq_norm(u, params), 1.0 / params.q);
  out.numerator = std::pow(grad, out.alpha) - std::pow(sharp_constant(params) * mass, out.alpha);

  auto r = u.grid->nodes();
  std::vector<double> magnitude(u.size());
  for (std::size_t i = 0; i < u.rows(); ++i) {
    const double weight = std::pow(r[i], -a);
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t k = i * m + j;
      if (variant == EmbeddingVariant::value) {
        magnitude[k] = weight * std::fabs(u.value[k]);
      } else {
        const double gt = u.grad_psi.empty() ? 0.0 : u.grad_psi[k] / r[i];
        magnitude[k] = weight * std::hypot(u.grad_r[k], gt);
      }
    }
  }
  const double exponent = variant == EmbeddingVariant::value ? out.p1 : out.p2;
  out.weak_norm = weak_lebesgue_norm(u, magnitude, exponent, domain_radius);
  const double volume = unit_ball_volume(params.n) * std::pow(domain_radius, n);
  out.constant = out.numerator / (std::pow(volume, -out.alpha * out.p3) * std::pow(out.weak_norm, out.alpha));
  return out;
}

}  // namespace ckn
