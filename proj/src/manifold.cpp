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


#include "ckn/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ckn/errors.hpp"
#include "ckn/exec.hpp"
#include "ckn/functionals.hpp"
#include "ckn/optimize.hpp"

namespace ckn {

double bubble_normalization(const CknParams& params) {
  // Both energies of A U are A^p G and A^q M, so equality fixes A in closed
  // form; no root solve is needed.
  const BubbleEnergies e = unit_bubble_energies(params);
  const double amplitude = std::exp((std::log(e.grad) - std::log(e.mass)) / (params.q - params.p));
  if (!std::isfinite(amplitude) || !(amplitude > 0.0)) {
    fail(ErrorKind::RootFindFailure, "bubble normalisation is not finite for " + params.describe());
  }
  return amplitude;
}

Bubble canonical_bubble(const CknParams& params, double scale, double axial_shift) {
  if (!(scale > 0.0)) fail(ErrorKind::RegionViolation, "bubble scale must be positive");
  if (axial_shift != 0.0 && !params.weights_vanish()) {
    fail(ErrorKind::TranslationForbidden, "axial shift of a weighted bubble " + params.describe());
  }
  Bubble b;
  b.amplitude = bubble_normalization(params) * std::exp(params.dilation_weight() * std::log(scale));
  b.scale = scale;
  b.axial_shift = axial_shift;
  return b;
}

Field bubble_like(const CknParams& params, const Bubble& bubble, const Field& like) {
  auto angles = like.angles;
  if (!angles && bubble.axial_shift != 0.0) angles = AngularRule::make(params.n);
  return sample_bubble(params, bubble, like.grid, angles);
}

double dap_norm(const Field& u, const CknParams& params) {
  return std::pow(weighted_grad_pnorm(u, params), 1.0 / params.p);
}

namespace {

// Brings f onto the layout of `like` (embedding radial profiles as needed).
Field on_layout(const Field& f, const std::shared_ptr<const AngularRule>& angles) {
  if (!angles || !f.is_radial()) return f;
  return embed_axisym(f, angles);
}

std::shared_ptr<const AngularRule> common_angles(std::initializer_list<const Field*> fields) {
  for (const Field* f : fields) {
    if (f->angles) return f->angles;
  }
  return nullptr;
}

// d/dx1 of V(|x - x0 e1|) sampled on (r, psi) with exact gradients.
Field sample_axial_derivative(const CknParams& params, const Bubble& bubble, std::shared_ptr<const RadialGrid> grid,
                              std::shared_ptr<const AngularRule> angles) {
  Bubble centered = bubble;
  centered.axial_shift = 0.0;
  const BubbleShape shape(params, centered);
  const double x0 = bubble.axial_shift;
  Field f;
  f.dim = params.n;
  f.grid = grid;
  f.angles = angles;
  const std::size_t m = angles->size();
  f.value.assign(f.size(), 0.0);
  f.grad_r.assign(f.size(), 0.0);
  f.grad_psi.assign(f.size(), 0.0);
  auto r = grid->nodes();
  auto c = angles->cos_psi();
  auto sn = angles->sin_psi();
  for (std::size_t i = 0; i < f.rows(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double w1 = r[i] * c[j] - x0;
      const double w2 = r[i] * sn[j];
      const double s = std::hypot(w1, w2);
      if (s == 0.0) continue;
      const double d1 = shape.deriv(s);
      const double g = d1 / s;                                // V'(s) / s
      const double dg = (shape.second(s) - g) / s;            // d/ds of V'(s)/s
      const std::size_t k = i * m + j;
      f.value[k] = g * w1;
      f.grad_r[k] = dg * w1 * (r[i] - x0 * c[j]) / s + g * c[j];
      f.grad_psi[k] = r[i] * (dg * w1 * x0 * sn[j] / s - g * sn[j]);
    }
  }
  f.tag = "axial_derivative(" + shape.tag() + ")";
  return f;
}

double relative_mass_mean(const Field& u, const CknParams& params, double* mass, double* axial_mean,
                          double* signed_pairing) {
  const std::vector<double> rw = u.grid->power_weights(u.dim - params.q * params.b);
  const std::vector<double> aw = u.angular_weights();
  auto t = u.grid->t();
  auto r = u.grid->nodes();
  const std::size_t m = u.cols();
  double total = 0.0, first = 0.0, axial = 0.0, sign = 0.0;
  for (std::size_t i = 0; i < u.rows(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double v = u.value[i * m + j];
      const double w = rw[i] * aw[j] * std::pow(std::fabs(v), params.q);
      total += w;
      first += w * t[i];
      if (u.angles) axial += w * r[i] * u.angles->cos_psi()[j];
      sign += v >= 0.0 ? w : -w;
    }
  }
  if (mass) *mass = total;
  if (axial_mean) *axial_mean = total > 0.0 ? axial / total : 0.0;
  if (signed_pairing) *signed_pairing = sign;
  return total > 0.0 ? first / total : 0.0;
}

}  // namespace

MomentSeed moment_seed(const Field& u, const CknParams& params) {
  double mass = 0.0, axial = 0.0, sign = 0.0;
  const double t_u = relative_mass_mean(u, params, &mass, &axial, &sign);
  if (!(mass > 0.0)) fail(ErrorKind::ZeroField, "moment seed of a zero field");
  Bubble unit;
  unit.amplitude = 1.0;
  const Field ref = sample_bubble(params, unit, u.grid);
  double ref_mass = 0.0;
  const double t_ref = relative_mass_mean(ref, params, &ref_mass, nullptr, nullptr);
  MomentSeed seed;
  // A bubble at scale lambda carries its q-mass around t_ref - log(lambda).
  seed.log_scale = t_ref - t_u;
  const double unit_mass = ref_mass * std::exp(-(params.n - params.q * params.b) * seed.log_scale);
  seed.amplitude = std::pow(mass / unit_mass, 1.0 / params.q) * (sign < 0.0 ? -1.0 : 1.0);
  seed.axial_shift = params.weights_vanish() ? axial : 0.0;
  return seed;
}

DistanceResult manifold_distance(const Field& u, const CknParams& params, const ProjectionOptions& options) {
  if (is_zero(u)) fail(ErrorKind::ZeroField, "distance of a zero field");
  const double unorm_p = weighted_grad_pnorm(u, params);
  if (!(unorm_p > 0.0)) fail(ErrorKind::ZeroField, "field has zero gradient energy");
  const double unorm = std::pow(unorm_p, 1.0 / params.p);
  const bool use_shift = params.weights_vanish() && !u.is_radial();
  const MomentSeed seed = moment_seed(u, params);
  const double seed_scale = std::exp(seed.log_scale);

  auto decode = [&](const std::vector<double>& x) {
    Bubble b;
    b.amplitude = seed.amplitude * x[0];
    b.scale = std::exp(seed.log_scale + x[1]);
    b.axial_shift = use_shift ? x[2] / seed_scale : 0.0;
    return b;
  };
  // Radial fields take a fused kernel: the bubble derivative is evaluated in
  // place instead of through a sampled Field.
  std::vector<double> fused_w, fused_t;
  if (u.is_radial()) {
    fused_w = u.grid->power_weights(u.dim - params.p * params.a);
    const double area = sphere_area(u.dim);
    for (double& w : fused_w) w *= area;
    fused_t.assign(u.grid->t().begin(), u.grid->t().end());
  }
  const double sigma = params.sigma();
  const double expo = params.profile_exponent();
  auto objective = [&](const std::vector<double>& x) {
    const Bubble b = decode(x);
    if (!u.is_radial()) {
      const Field v = bubble_like(params, b, u);
      return weighted_grad_pnorm(combine(1.0, u, -1.0, v), params, 1.0, exec::Policy::serial) / unorm_p;
    }
    if (!(b.scale > 0.0) || !std::isfinite(b.scale)) return std::numeric_limits<double>::infinity();
    const double log_scale = std::log(b.scale);
    const double front = b.amplitude * expo * sigma;
    double total = 0.0;
    for (std::size_t i = 0; i < fused_t.size(); ++i) {
      const double lz = sigma * (log_scale + fused_t[i]);
      const double dv = front * std::exp(lz - fused_t[i] + (expo - 1.0) * std::log1p(std::exp(lz)));
      const double diff = std::fabs(u.grad_r[i] - dv);
      if (diff > 0.0) total += fused_w[i] * std::pow(diff, params.p);
    }
    return total / unorm_p;
  };

  const std::vector<std::vector<double>> offsets = {
      {1.0, 0.0, 0.0}, {1.15, 0.4, 0.2}, {0.85, -0.4, -0.2}, {1.3, 0.8, -0.4}, {0.7, -0.8, 0.4}};
  const int restarts = std::clamp(options.restarts, 1, static_cast<int>(offsets.size()));
  const std::size_t dim = use_shift ? 3 : 2;
  const double shift_seed = use_shift ? seed.axial_shift * seed_scale : 0.0;

  std::vector<opt::SimplexResult> runs(restarts);
  exec::for_each_index(static_cast<std::size_t>(restarts), [&](std::size_t k) {
    std::vector<double> start(offsets[k].begin(), offsets[k].begin() + dim);
    if (use_shift) start[2] += shift_seed;
    std::vector<double> step = {0.1, 0.25, 0.1};
    step.resize(dim);
    opt::SimplexResult run = opt::nelder_mead(objective, start, step, options.size_tol, options.max_iter);
    // One restart from the converged point guards against simplex collapse.
    for (double& s : step) s *= 0.1;
    opt::SimplexResult polish = opt::nelder_mead(objective, run.x, step, options.size_tol, options.max_iter);
    runs[k] = polish.value <= run.value ? polish : run;
  });

  DistanceResult out;
  std::size_t best = 0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    out.restart_distances.push_back(unorm * std::pow(std::max(runs[k].value, 0.0), 1.0 / params.p));
    if (runs[k].value < runs[best].value) best = k;
  }
  out.distance = out.restart_distances[best];
  out.argmin = decode(runs[best].x);
  const double floor = 1e-7 * unorm;
  for (double d : out.restart_distances) {
    if (std::fabs(d - out.distance) <= options.agreement_tol * out.distance + floor) ++out.restarts_agreeing;
  }
  if (out.restarts_agreeing < std::min(options.agreeing, restarts)) {
    fail(ErrorKind::OptimizerStall, "only " + std::to_string(out.restarts_agreeing) +
                                        " restarts reproduce the best distance for '" + u.tag + "'");
  }
  return out;
}

namespace {

double pu_objective(const Field& u, const CknParams& params, double log_scale, double shift) {
  const Bubble w = canonical_bubble(params, std::exp(log_scale), shift);
  const Field v = bubble_like(params, w, u);
  const std::vector<double> rw = u.grid->power_weights(u.dim - params.q * params.b);
  const std::vector<double> aw = u.angular_weights();
  const bool v_radial = v.is_radial();
  const std::size_t m = u.cols();
  const double q = params.q;
  return exec::sum_rows(
      u.rows(),
      [&](std::size_t i) {
        double row = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          const double vv = v_radial ? v.value[i] : v.value[i * m + j];
          row += aw[j] * std::pow(vv, q - 1.0) * u.value[i * m + j];
        }
        return rw[i] * row;
      },
      exec::Policy::serial);
}

struct LineMax {
  double x = 0.0;
  double value = 0.0;
};

// Maximises g over [lo, hi]: scan, then golden-section refinement of the
// three best interior local maxima. Ties go to the smallest |x - origin|.
LineMax maximise_line(const std::function<double(double)>& g, double lo, double hi, int count, double origin,
                      const std::string& what) {
  std::vector<double> xs(count), ys(count);
  for (int i = 0; i < count; ++i) {
    xs[i] = lo + (hi - lo) * i / (count - 1);
    ys[i] = g(xs[i]);
  }
  const int top = static_cast<int>(std::max_element(ys.begin(), ys.end()) - ys.begin());
  if (top == 0 || top == count - 1) {
    fail(ErrorKind::OptimizerStall, what + ": maximiser sits on the search boundary");
  }
  std::vector<int> peaks;
  for (int i = 1; i + 1 < count; ++i) {
    if (ys[i] >= ys[i - 1] && ys[i] >= ys[i + 1]) peaks.push_back(i);
  }
  std::sort(peaks.begin(), peaks.end(), [&](int x, int y) { return ys[x] > ys[y]; });
  if (peaks.size() > 3) peaks.resize(3);
  std::vector<LineMax> found;
  for (int i : peaks) {
    const auto res = opt::golden_section([&](double x) { return -g(x); }, xs[i - 1], xs[i], xs[i + 1], 1e-10);
    found.push_back(-res.value >= ys[i] ? LineMax{res.x, -res.value} : LineMax{xs[i], ys[i]});
  }
  LineMax best = found.front();
  for (const LineMax& c : found) {
    const double tie = 1e-12 * std::fabs(best.value);
    if (c.value > best.value + tie ||
        (std::fabs(c.value - best.value) <= tie && std::fabs(c.x - origin) < std::fabs(best.x - origin))) {
      best = c;
    }
  }
  return best;
}

}  // namespace

Bubble select_Pu(const Field& u, const CknParams& params) {
  if (is_zero(u)) fail(ErrorKind::ZeroField, "P_u of a zero field");
  const MomentSeed seed = moment_seed(u, params);
  const bool use_shift = params.weights_vanish() && !u.is_radial();
  double shift = use_shift ? seed.axial_shift : 0.0;
  const double s0 = seed.log_scale;
  LineMax best = maximise_line([&](double s) { return pu_objective(u, params, s, shift); }, s0 - 8.0, s0 + 8.0, 65,
                               0.0, "P_u scale search");
  if (use_shift) {
    for (int sweep = 0; sweep < 3; ++sweep) {
      const double reach = 2.0 * std::exp(-best.x);
      const double s = best.x;
      const LineMax xs = maximise_line([&](double x0) { return pu_objective(u, params, s, x0); }, shift - reach,
                                       shift + reach, 33, 0.0, "P_u axial search");
      shift = xs.x;
      best = maximise_line([&](double sc) { return pu_objective(u, params, sc, shift); }, best.x - 1.0,
                           best.x + 1.0, 17, 0.0, "P_u scale search");
    }
  }
  return canonical_bubble(params, std::exp(best.x), shift);
}

double v_pairing(const Field& f, const Field& g, const Field& v, const CknParams& params) {
  require_compatible(f, g);
  require_compatible(f, v);
  const auto angles = common_angles({&f, &g, &v});
  const Field ff = on_layout(f, angles);
  const Field gg = on_layout(g, angles);
  const Field vv = on_layout(v, angles);
  const std::vector<double> rw = ff.grid->power_weights(ff.dim - params.q * params.b);
  const std::vector<double> aw = ff.angular_weights();
  const std::size_t m = ff.cols();
  const double q = params.q;
  return exec::sum_rows(ff.rows(), [&](std::size_t i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t k = i * m + j;
      const double vk = std::fabs(vv.value[k]);
      if (vk == 0.0) continue;
      row += aw[j] * std::pow(vk, q - 2.0) * ff.value[k] * gg.value[k];
    }
    return rw[i] * row;
  });
}

TangentBasis tangent_basis(const Bubble& V, const CknParams& params, const Field& like) {
  if (V.amplitude == 0.0) fail(ErrorKind::ZeroField, "tangent space at the zero bubble");
  TangentBasis basis;
  Bubble centered = V;
  centered.axial_shift = 0.0;
  auto dilation = std::make_shared<DilationTangent>(params, centered);
  const Field dil_profile = sample_radial(like.grid, params.n, dilation);

  if (!params.weights_vanish()) {
    basis.elements.push_back(bubble_like(params, V, like));
    basis.elements.push_back(on_layout(dil_profile, like.angles));
    basis.names = {"amplitude", "dilation"};
    return basis;
  }
  auto angles = like.angles ? like.angles : AngularRule::make(params.n);
  if (V.axial_shift == 0.0) {
    basis.elements.push_back(bubble_like(params, V, like));
    basis.elements.push_back(on_layout(dil_profile, like.angles));
  } else {
    basis.elements.push_back(sample_bubble(params, V, like.grid, angles));
    basis.elements.push_back(translate_axisym(dil_profile, -V.axial_shift, params, angles));
  }
  basis.elements.push_back(sample_axial_derivative(params, V, like.grid, angles));
  basis.names = {"amplitude", "dilation", "axial"};
  for (int d = 2; d <= params.n; ++d) basis.unrepresented.push_back("translation_e" + std::to_string(d));
  return basis;
}

std::vector<double> orthogonality_check(const Field& rho, const Bubble& V, const CknParams& params) {
  const TangentBasis basis = tangent_basis(V, params, rho);
  const Field v = bubble_like(params, V, rho);
  std::vector<double> out(basis.elements.size(), 0.0);
  const double rr = v_pairing(rho, rho, v, params);
  if (rr == 0.0) return out;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const Field& w = basis.elements[k];
    out[k] = v_pairing(rho, w, v, params) / std::sqrt(rr * v_pairing(w, w, v, params));
  }
  return out;
}

Field orthogonalize(const Field& f, const Bubble& V, const CknParams& params) {
  TangentBasis basis = tangent_basis(V, params, f);
  // Radial inputs are orthogonal to the axial direction of a centred bubble
  // by parity; keeping them radial avoids a needless angular axis.
  if (f.is_radial() && V.axial_shift == 0.0 && basis.elements.size() == 3) basis.elements.pop_back();
  const Field v = bubble_like(params, V, f);
  std::vector<Field> ortho;
  for (const Field& w : basis.elements) {
    Field e = w;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Field& o : ortho) e = combine(1.0, e, -v_pairing(e, o, v, params), o);
    }
    const double nn = v_pairing(e, e, v, params);
    if (nn > 0.0) ortho.push_back(scaled(e, 1.0 / std::sqrt(nn)));
  }
  Field out = f;
  for (int pass = 0; pass < 2; ++pass) {
    for (const Field& o : ortho) out = combine(1.0, out, -v_pairing(out, o, v, params), o);
  }
  out.tag = "orthogonalized(" + f.tag + ")";
  return out;
}

DecompositionRecord mu_rho_decompose(const Field& u, const Bubble& V, const CknParams& params) {
  if (V.amplitude == 0.0) fail(ErrorKind::ZeroField, "decomposition against the zero bubble");
  const Field v = bubble_like(params, V, u);
  DecompositionRecord out;
  out.V = V;
  out.mu = v_pairing(v, u, v, params) / v_pairing(v, v, v, params);
  out.rho = combine(1.0, u, -out.mu, v);
  out.rho.tag = "rho";
  out.tangent_residuals = orthogonality_check(out.rho, V, params);
  const TangentBasis basis = tangent_basis(V, params, out.rho);
  out.tangent_names = basis.names;
  out.unrepresented = basis.unrepresented;
  out.distance_estimate = dap_norm(out.rho, params);
  return out;
}

BubbleFit fit_radial_bubble(const Field& profile, const CknParams& params) {
  if (!profile.is_radial()) fail(ErrorKind::UnsupportedField, "bubble fit expects a radial profile");
  if (is_zero(profile)) fail(ErrorKind::ZeroField, "bubble fit of a zero profile");
  const double sigma = params.sigma();
  const double e = params.profile_exponent();
  auto r = profile.grid->nodes();
  auto t = profile.grid->t();
  const double sign = profile.value.front() < 0.0 ? -1.0 : 1.0;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < profile.rows(); ++i) {
    if (sign * profile.value[i] > 0.0 && std::isfinite(std::log(sign * profile.value[i]))) idx.push_back(i);
  }
  if (idx.size() < 2) fail(ErrorKind::DegenerateFit, "profile has too few positive samples");

  // Seeds: value near the origin and the radius where it drops by 2^e.
  double log_a = std::log(sign * profile.value[idx.front()]);
  double log_l = 0.0;
  for (std::size_t i : idx) {
    if (std::log(sign * profile.value[i]) <= log_a + e * std::log(2.0)) {
      log_l = -t[i];
      break;
    }
  }
  auto residual = [&](std::size_t i, double la, double ll) {
    const double lz = sigma * (ll + t[i]);
    const double l1p = lz > 35.0 ? lz + std::log1p(std::exp(-lz)) : std::log1p(std::exp(lz));
    return std::log(sign * profile.value[i]) - la - e * l1p;
  };
  for (int it = 0; it < 100; ++it) {
    // Gauss-Newton on the log residuals; d/d(log A) = -1.
    double j11 = 0, j12 = 0, j22 = 0, g1 = 0, g2 = 0;
    for (std::size_t i : idx) {
      const double res = residual(i, log_a, log_l);
      const double lz = sigma * (log_l + t[i]);
      const double dl = -e * sigma / (1.0 + std::exp(-lz));
      j11 += 1.0;
      j12 += dl;
      j22 += dl * dl;
      g1 += -res;
      g2 += dl * res;
    }
    // Normal equations for the Jacobian rows [-1, dl].
    const double det = j11 * j22 - j12 * j12;
    if (!(std::fabs(det) > 0.0)) break;
    const double d_la = -(j22 * g1 + j12 * g2) / det;
    const double d_ll = -(j12 * g1 + j11 * g2) / det;
    log_a += d_la;
    log_l += d_ll;
    if (std::fabs(d_la) + std::fabs(d_ll) < 1e-15) break;
  }
  BubbleFit fit;
  fit.bubble.amplitude = sign * std::exp(log_a);
  fit.bubble.scale = std::exp(log_l);
  const Field v = sample_bubble(params, fit.bubble, profile.grid);
  double umax = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < profile.rows(); ++i) {
    umax = std::max(umax, std::fabs(profile.value[i]));
    diff = std::max(diff, std::fabs(profile.value[i] - v.value[i]));
  }
  fit.residual = diff / umax;
  return fit;
}

}  // namespace ckn
