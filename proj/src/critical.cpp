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

#include "ckn/critical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <gsl/gsl_linalg.h>

#include "ckn/errors.hpp"
#include "ckn/exec.hpp"
#include "ckn/functionals.hpp"
#include "ckn/rng.hpp"

namespace ckn {

namespace {

Field on_layout(const Field& f, const std::shared_ptr<const AngularRule>& angles) {
  if (!angles || !f.is_radial()) return f;
  return embed_axisym(f, angles);
}

// Cartesian-like gradient components (d_r, r^-1 d_psi) and the D_a^p
// quadrature weight at every node of a layout.
struct GradientLayout {
  std::size_t size = 0;
  bool vector = false;
  std::vector<double> weight;

  static GradientLayout of(const Field& like, const CknParams& params) {
    GradientLayout out;
    out.size = like.size();
    out.vector = !like.is_radial();
    const std::vector<double> rw = like.grid->power_weights(like.dim - params.p * params.a);
    const std::vector<double> aw = like.angular_weights();
    const std::size_t m = like.cols();
    out.weight.resize(out.size);
    for (std::size_t i = 0; i < like.rows(); ++i) {
      for (std::size_t j = 0; j < m; ++j) out.weight[i * m + j] = rw[i] * aw[j];
    }
    return out;
  }
};

struct Gradient {
  std::vector<double> x, y;
};

Gradient gradient_of(const Field& f) {
  if (!f.has_gradient) fail(ErrorKind::MissingGradient, "field '" + f.tag + "' carries no gradient data");
  Gradient g;
  g.x = f.grad_r;
  if (!f.is_radial()) {
    g.y.resize(f.size());
    auto r = f.grid->nodes();
    const std::size_t m = f.cols();
    for (std::size_t k = 0; k < f.size(); ++k) g.y[k] = f.grad_psi[k] / r[k / m];
  }
  return g;
}

}  // namespace

double el_residual_pairing(const Field& u, const Field& phi, const CknParams& params) {
  require_compatible(u, phi);
  if (!u.has_gradient || !phi.has_gradient) fail(ErrorKind::MissingGradient, "residual pairing needs gradients");
  const auto angles = u.angles ? u.angles : phi.angles;
  const Field uu = on_layout(u, angles);
  const Field ff = on_layout(phi, angles);
  const double p = params.p;
  const double q = params.q;
  const std::vector<double> wa = uu.grid->power_weights(uu.dim - p * params.a);
  const std::vector<double> wb = uu.grid->power_weights(uu.dim - q * params.b);
  const std::vector<double> aw = uu.angular_weights();
  auto r = uu.grid->nodes();
  const std::size_t m = uu.cols();
  const bool radial = uu.is_radial();
  return exec::sum_rows(uu.rows(), [&](std::size_t i) {
    double flux = 0.0, mass = 0.0;
    const double inv_r2 = 1.0 / (r[i] * r[i]);
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t k = i * m + j;
      const double ur = uu.grad_r[k];
      double g2 = ur * ur;
      double dot = ur * ff.grad_r[k];
      if (!radial) {
        g2 += uu.grad_psi[k] * uu.grad_psi[k] * inv_r2;
        dot += uu.grad_psi[k] * ff.grad_psi[k] * inv_r2;
      }
      if (g2 > 0.0) flux += aw[j] * std::pow(g2, 0.5 * (p - 2.0)) * dot;
      const double v = uu.value[k];
      if (v != 0.0) mass += aw[j] * std::pow(std::fabs(v), q - 2.0) * v * ff.value[k];
    }
    return -wa[i] * flux + wb[i] * mass;
  });
}

namespace {

// Maximises F(c) = l.c - |sum c_i phi_i|^p / p. F is concave and its
// maximiser lies on the ray of the dual-norm optimum, where
// F = (1/p') (l.c / |G|)^{p'}. Damped Newton steps, with an exact
// coordinate sweep whenever a Newton step fails to increase F.
class DualSolver {
 public:
  DualSolver(const GradientLayout& layout, const std::vector<Gradient>& elements, const std::vector<double>& pairing,
             double p, int max_iterations)
      : layout_(layout), elements_(elements), pairing_(pairing), p_(p), max_iterations_(max_iterations) {}

  // Best ratio met along the iteration that starts from c (resized to K).
  double solve(std::size_t K, std::vector<double>& c) {
    c.resize(K, 0.0);
    rebuild(c);
    double best = ratio(c);
    double f = objective(c);
    std::vector<double> grad(K), hess(K * K), step(K), trial(K);
    for (int it = 0; it < max_iterations_; ++it) {
      derivatives(K, grad, hess);
      bool improved = false;
      if (newton_direction(K, grad, hess, step)) {
        double decrement = 0.0;
        for (std::size_t i = 0; i < K; ++i) decrement += grad[i] * step[i];
        if (!(decrement > 1e-15 * std::fabs(f))) {
          best = std::max(best, ratio(c));
          break;
        }
        for (double t = 1.0; t > 1e-12; t *= 0.5) {
          for (std::size_t i = 0; i < K; ++i) trial[i] = c[i] + t * step[i];
          rebuild(trial);
          const double ft = objective(trial);
          if (ft > f) {
            c = trial;
            f = ft;
            improved = true;
            break;
          }
        }
        rebuild(c);
      }
      if (!improved) {
        const double before = f;
        for (std::size_t i = 0; i < K; ++i) {
          const double s = line_step(i);
          if (s == 0.0) continue;
          c[i] += s;
          axpy(s, elements_[i]);
        }
        f = objective(c);
        if (!(f > before)) {
          best = std::max(best, ratio(c));
          break;
        }
      }
      best = std::max(best, ratio(c));
    }
    return best;
  }

  // Moves c along its own ray to the maximiser of F; flips sign if needed.
  void rescale(std::vector<double>& c) {
    rebuild(c);
    const double l = dot_pairing(c);
    const double g = norm_p();
    if (l == 0.0 || g == 0.0) return;
    const double t = std::copysign(std::pow(std::fabs(l) / g, 1.0 / (p_ - 1.0)), l);
    for (double& x : c) x *= t;
  }

 private:
  void rebuild(const std::vector<double>& c) {
    gx_.assign(layout_.size, 0.0);
    gy_.assign(layout_.vector ? layout_.size : 0, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] != 0.0) axpy(c[i], elements_[i]);
    }
  }

  void axpy(double s, const Gradient& g) {
    for (std::size_t k = 0; k < gx_.size(); ++k) gx_[k] += s * g.x[k];
    for (std::size_t k = 0; k < gy_.size(); ++k) gy_[k] += s * g.y[k];
  }

  double dot_pairing(const std::vector<double>& c) const {
    double l = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) l += c[i] * pairing_[i];
    return l;
  }

  // sum w |G|^p
  double norm_p() const {
    double total = 0.0;
    for (std::size_t k = 0; k < layout_.size; ++k) {
      const double h2 = gx_[k] * gx_[k] + (layout_.vector ? gy_[k] * gy_[k] : 0.0);
      if (h2 > 0.0) total += layout_.weight[k] * std::pow(h2, 0.5 * p_);
    }
    return total;
  }

  double objective(const std::vector<double>& c) const { return dot_pairing(c) - norm_p() / p_; }

  double ratio(const std::vector<double>& c) const {
    const double g = norm_p();
    return g > 0.0 ? std::fabs(dot_pairing(c)) / std::pow(g, 1.0 / p_) : 0.0;
  }

  // Gradient of F and the Hessian of -F at the current G.
  void derivatives(std::size_t K, std::vector<double>& grad, std::vector<double>& hess) const {
    std::fill(hess.begin(), hess.end(), 0.0);
    for (std::size_t i = 0; i < K; ++i) grad[i] = pairing_[i];
    std::vector<double> gi(K), hi(K);
    for (std::size_t k = 0; k < layout_.size; ++k) {
      const double hx = gx_[k];
      const double hy = layout_.vector ? gy_[k] : 0.0;
      const double h2 = hx * hx + hy * hy;
      if (h2 == 0.0) continue;
      const double w = layout_.weight[k] * std::pow(h2, 0.5 * (p_ - 2.0));
      const double w2 = w * (p_ - 2.0) / h2;
      for (std::size_t i = 0; i < K; ++i) {
        const double gxi = elements_[i].x[k];
        const double gyi = layout_.vector ? elements_[i].y[k] : 0.0;
        hi[i] = hx * gxi + hy * gyi;
        grad[i] -= w * hi[i];
        for (std::size_t j = 0; j <= i; ++j) {
          const double gxj = elements_[j].x[k];
          const double gyj = layout_.vector ? elements_[j].y[k] : 0.0;
          hess[i * K + j] += w * (gxi * gxj + gyi * gyj) + w2 * hi[i] * hi[j];
        }
      }
    }
    for (std::size_t i = 0; i < K; ++i) {
      for (std::size_t j = 0; j < i; ++j) hess[j * K + i] = hess[i * K + j];
    }
  }

  bool newton_direction(std::size_t K, const std::vector<double>& grad, const std::vector<double>& hess,
                        std::vector<double>& step) const {
    std::vector<double> m = hess;
    double trace = 0.0;
    for (std::size_t i = 0; i < K; ++i) trace += m[i * K + i];
    if (!(trace > 0.0) || !std::isfinite(trace)) return false;
    for (std::size_t i = 0; i < K; ++i) m[i * K + i] += 1e-14 * trace;
    gsl_matrix_view A = gsl_matrix_view_array(m.data(), K, K);
    step = grad;
    gsl_vector_view x = gsl_vector_view_array(step.data(), K);
    if (gsl_linalg_cholesky_decomp1(&A.matrix) != 0) return false;
    if (gsl_linalg_cholesky_svx(&A.matrix, &x.vector) != 0) return false;
    for (double s : step) {
      if (!std::isfinite(s)) return false;
    }
    return true;
  }

  // h'(s) and -h''(s) for h(s) = F(c + s e_i).
  void slope(std::size_t i, double s, double& d1, double& d2) const {
    const Gradient& g = elements_[i];
    double flux = 0.0, curv = 0.0;
    for (std::size_t k = 0; k < layout_.size; ++k) {
      const double hx = gx_[k] + s * g.x[k];
      const double hy = layout_.vector ? gy_[k] + s * g.y[k] : 0.0;
      const double gyk = layout_.vector ? g.y[k] : 0.0;
      const double h2 = hx * hx + hy * hy;
      if (h2 == 0.0) continue;
      const double hp2 = std::pow(h2, 0.5 * (p_ - 2.0));
      const double hg = hx * g.x[k] + hy * gyk;
      flux += layout_.weight[k] * hp2 * hg;
      curv += layout_.weight[k] * hp2 * ((g.x[k] * g.x[k] + gyk * gyk) + (p_ - 2.0) * hg * hg / h2);
    }
    d1 = pairing_[i] - flux;
    d2 = curv;
  }

  // Root of the decreasing function h' by Newton steps kept inside a bracket.
  double line_step(std::size_t i) const {
    double d1 = 0.0, d2 = 0.0;
    slope(i, 0.0, d1, d2);
    if (d1 == 0.0) return 0.0;
    const double dir = d1 > 0.0 ? 1.0 : -1.0;
    double step = (d2 > 0.0 && std::isfinite(d1 / d2)) ? std::fabs(d1 / d2) : 1.0;
    if (!(step > 0.0)) step = 1.0;
    double lo = 0.0, hi = dir * step;
    double e1 = 0.0, e2 = 0.0;
    for (int k = 0; k < 200; ++k) {
      slope(i, hi, e1, e2);
      if (e1 * dir <= 0.0) break;
      lo = hi;
      hi += dir * step;
      step *= 2.0;
    }
    if (e1 * dir > 0.0) return lo;
    // Invariant: h'(a) * dir > 0 >= h'(b) * dir.
    double a = lo, b = hi, s = lo;
    for (int it = 0; it < 100; ++it) {
      double f1 = 0.0, f2 = 0.0;
      slope(i, s, f1, f2);
      if (f1 == 0.0) return s;
      if (f1 * dir > 0.0) {
        a = s;
      } else {
        b = s;
      }
      double next = f2 > 0.0 ? s + f1 / f2 : 0.5 * (a + b);
      if (!((next - a) * (next - b) < 0.0)) next = 0.5 * (a + b);
      if (std::fabs(b - a) <= 1e-15 * std::fabs(a + b)) return next;
      if (std::fabs(next - s) <= 1e-15 * std::fabs(next)) return next;
      s = next;
    }
    return s;
  }

  const GradientLayout& layout_;
  const std::vector<Gradient>& elements_;
  const std::vector<double>& pairing_;
  double p_;
  int max_iterations_;
  std::vector<double> gx_, gy_;
};

struct TestBasis {
  std::vector<Field> elements;
  std::vector<std::string> names;
};

TestBasis build_test_basis(const Field& u, const CknParams& params, const Bubble& anchor,
                           const DualNormOptions& options) {
  TestBasis basis;
  TangentBasis tangent = tangent_basis(anchor, params, u);
  const std::size_t keep = (u.is_radial() && anchor.axial_shift == 0.0) ? 2 : tangent.elements.size();
  for (std::size_t k = 0; k < keep; ++k) {
    basis.elements.push_back(tangent.elements[k]);
    basis.names.push_back("tangent_" + tangent.names[k]);
  }
  const bool axial = !u.is_radial() && params.a == 0.0;
  const double t0 = -std::log(anchor.scale);
  const double lo = u.grid->t_min() + 4.0 * options.width;
  const double hi = u.grid->t_max() - 4.0 * options.width;
  const std::size_t want = static_cast<std::size_t>(options.basis_size);
  for (int k = 0; basis.elements.size() < want; ++k) {
    const int ring = (k + 1) / 2;
    const double center = t0 + (k % 2 == 1 ? ring : -ring) * options.spacing;
    if (ring * options.spacing > (hi - lo) + std::fabs(t0) + 1.0) {
      fail(ErrorKind::BasisTooSmall, "grid " + u.grid->describe() + " cannot host " +
                                         std::to_string(options.basis_size) + " test elements");
    }
    if (center < lo || center > hi) continue;
    auto bump = std::make_shared<LogGaussianBump>(center, options.width);
    basis.elements.push_back(on_layout(sample_radial(u.grid, params.n, bump), u.angles));
    basis.names.push_back(bump->tag());
    if (axial && basis.elements.size() < want) {
      basis.elements.push_back(sample_axisym(u.grid, u.angles, *bump, 1));
      basis.names.push_back(bump->tag() + "*cos");
    }
  }
  return basis;
}

}  // namespace

DualNormReport dual_norm_estimate(const Field& u, const CknParams& params, const DualNormOptions& options) {
  if (options.basis_size < 4) {
    fail(ErrorKind::BasisTooSmall, "basis_size " + std::to_string(options.basis_size) + " < 4");
  }
  DualNormReport out;
  if (is_zero(u)) return out;
  Bubble anchor;
  if (options.anchor) {
    anchor = *options.anchor;
  } else {
    const MomentSeed seed = moment_seed(u, params);
    anchor = canonical_bubble(params, std::exp(seed.log_scale), params.weights_vanish() ? seed.axial_shift : 0.0);
  }
  TestBasis basis = build_test_basis(u, params, anchor, options);
  out.basis_names = basis.names;
  const std::size_t K = basis.elements.size();

  const GradientLayout layout = GradientLayout::of(u, params);
  std::vector<Gradient> grads(K);
  std::vector<double> pairing(K);
  exec::for_each_index(K, [&](std::size_t k) {
    const double norm = dap_norm(basis.elements[k], params);
    if (!(norm > 0.0)) fail(ErrorKind::ZeroField, "test element " + basis.names[k] + " vanishes on the grid");
    pairing[k] = el_residual_pairing(u, basis.elements[k], params) / norm;
    grads[k] = gradient_of(basis.elements[k]);
    for (double& x : grads[k].x) x /= norm;
    for (double& y : grads[k].y) y /= norm;
  });

  DualSolver solver(layout, grads, pairing, params.p, options.max_iterations);
  SeedStream rng(options.seed);
  auto random_start = [&](std::size_t size) {
    std::vector<double> c(size);
    for (double& x : c) x = rng.uniform(-1.0, 1.0);
    solver.rescale(c);
    return c;
  };

  const std::size_t half = K / 2;
  std::vector<double> warm;
  out.half_estimate = solver.solve(half, warm);
  for (int r = 0; r < options.restarts; ++r) {
    std::vector<double> c = random_start(half);
    out.half_estimate = std::max(out.half_estimate, solver.solve(half, c));
  }

  out.estimate = solver.solve(K, warm);
  out.restart_values.push_back(out.estimate);
  for (int r = 0; r < options.restarts; ++r) {
    std::vector<double> c = random_start(K);
    const double v = solver.solve(K, c);
    out.restart_values.push_back(v);
    out.estimate = std::max(out.estimate, v);
  }
  out.estimate = std::max(out.estimate, out.half_estimate);
  return out;
}

double hessian_form(const Bubble& V, const Field& rho, const CknParams& params) {
  if (!(params.p > 2.0)) fail(ErrorKind::RegionViolation, "the degenerate Hessian form needs p > 2");
  if (!rho.has_gradient) fail(ErrorKind::MissingGradient, "hessian form needs the gradient of rho");
  const Field v = bubble_like(params, V, rho);
  const Field rr = on_layout(rho, v.angles);
  const double p = params.p;
  const std::vector<double> wa = rr.grid->power_weights(rr.dim - p * params.a);
  const std::vector<double> aw = rr.angular_weights();
  auto r = rr.grid->nodes();
  const std::size_t m = rr.cols();
  const bool radial = rr.is_radial();
  return exec::sum_rows(rr.rows(), [&](std::size_t i) {
    double row = 0.0;
    const double inv_r = 1.0 / r[i];
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t k = i * m + j;
      const double vx = v.grad_r[k], vy = radial ? 0.0 : v.grad_psi[k] * inv_r;
      const double fx = rr.grad_r[k], fy = radial ? 0.0 : rr.grad_psi[k] * inv_r;
      const double v2 = vx * vx + vy * vy;
      if (v2 == 0.0) continue;
      const double dot = vx * fx + vy * fy;
      row += aw[j] * (std::pow(v2, 0.5 * (p - 2.0)) * (fx * fx + fy * fy) +
                      (p - 2.0) * std::pow(v2, 0.5 * (p - 4.0)) * dot * dot);
    }
    return wa[i] * row;
  });
}

double hessian_form_radial(const Bubble& V, const Field& rho, const CknParams& params) {
  if (!(params.p > 2.0)) fail(ErrorKind::RegionViolation, "the degenerate Hessian form needs p > 2");
  if (!rho.is_radial() || V.axial_shift != 0.0) {
    fail(ErrorKind::UnsupportedField, "reduced Hessian form needs radial rho and a centred bubble");
  }
  const BubbleShape shape(params, V);
  const double p = params.p;
  const std::vector<double> wa = rho.grid->power_weights(rho.dim - p * params.a);
  auto r = rho.grid->nodes();
  const double area = sphere_area(rho.dim);
  return (p - 1.0) * area * exec::sum_rows(rho.rows(), [&](std::size_t i) {
           const double dv = std::fabs(shape.deriv(r[i]));
           return wa[i] * std::pow(dv, p - 2.0) * rho.grad_r[i] * rho.grad_r[i];
         });
}

SpectralReport spectral_gap_ratio(const Bubble& V, const Field& rho, const CknParams& params) {
  if (is_zero(rho)) fail(ErrorKind::ZeroField, "spectral ratio of a zero direction");
  const std::vector<double> cosines = orthogonality_check(rho, V, params);
  for (std::size_t k = 0; k < cosines.size(); ++k) {
    if (std::fabs(cosines[k]) > 1e-6) {
      fail(ErrorKind::NotOrthogonal, "tangent cosine " + std::to_string(cosines[k]) + " exceeds 1e-6");
    }
  }
  SpectralReport out;
  out.lhs = hessian_form(V, rho, params);
  const Field v = bubble_like(params, V, rho);
  out.rhs = (params.q - 1.0) * v_pairing(rho, rho, v, params);
  out.ratio = out.lhs / out.rhs;
  out.tau_estimate = out.ratio - 1.0;
  return out;
}

SpectralScan spectral_probe_scan(const CknParams& params, int count, std::shared_ptr<const RadialGrid> grid,
                                 double span, double width) {
  if (count < 1) fail(ErrorKind::EmptyFamily, "spectral scan needs at least one probe");
  if (!grid) grid = suggest_grid(params);
  const Bubble V = canonical_bubble(params, 1.0);
  SpectralScan out;
  out.centers.resize(count);
  out.ratios.resize(count);
  for (int k = 0; k < count; ++k) out.centers[k] = count == 1 ? 0.0 : -span + 2.0 * span * k / (count - 1);
  exec::for_each_index(static_cast<std::size_t>(count), [&](std::size_t k) {
    const Field f = sample_radial(grid, params.n, std::make_shared<LogGaussianBump>(out.centers[k], width));
    out.ratios[k] = spectral_gap_ratio(V, orthogonalize(f, V, params), params).ratio;
  });
  out.argmin = static_cast<std::size_t>(std::min_element(out.ratios.begin(), out.ratios.end()) - out.ratios.begin());
  out.min_ratio = out.ratios[out.argmin];
  out.tau_estimate = out.min_ratio - 1.0;
  return out;
}

Thm5Quantities thm5_quantities(const Field& u, const CknParams& params, const Thm5Options& options) {
  if (!(params.p > 2.0)) fail(ErrorKind::RegionViolation, "the two-sided estimates need p > 2");
  if (is_zero(u)) fail(ErrorKind::ZeroField, "two-sided estimates of a zero field");
  Thm5Quantities out;
  out.V = select_Pu(u, params);
  DecompositionRecord dec = mu_rho_decompose(u, out.V, params);
  const double unorm = dap_norm(u, params);
  out.distance_gate = options.gate * unorm;
  out.mu = dec.mu;
  // mu V lies on the manifold, so |rho| already bounds the distance.
  if (dec.distance_estimate > out.distance_gate) {
    const double dist = manifold_distance(u, params).distance;
    if (dist > out.distance_gate) {
      fail(ErrorKind::FarFromManifold, "distance " + std::to_string(dist) + " exceeds the gate " +
                                           std::to_string(out.distance_gate));
    }
  }
  // Below 1e-6 |u| rho is projection round-off (the P_u maximiser is only
  // resolved to about sqrt(machine epsilon)); report it as zero.
  if (dec.distance_estimate > 1e-6 * unorm) {
    out.rho_norm = dec.distance_estimate;
    out.N = std::pow(out.rho_norm, params.p);
    const Field v = bubble_like(params, out.V, dec.rho);
    const Field rr = on_layout(dec.rho, v.angles);
    const double p = params.p;
    const std::vector<double> wa = rr.grid->power_weights(rr.dim - p * params.a);
    const std::vector<double> aw = rr.angular_weights();
    auto r = rr.grid->nodes();
    const std::size_t m = rr.cols();
    const bool radial = rr.is_radial();
    out.Q = exec::sum_rows(rr.rows(), [&](std::size_t i) {
      double row = 0.0;
      const double inv_r2 = 1.0 / (r[i] * r[i]);
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t k = i * m + j;
        double v2 = v.grad_r[k] * v.grad_r[k];
        double f2 = rr.grad_r[k] * rr.grad_r[k];
        if (!radial) {
          v2 += v.grad_psi[k] * v.grad_psi[k] * inv_r2;
          f2 += rr.grad_psi[k] * rr.grad_psi[k] * inv_r2;
        }
        if (v2 > 0.0) row += aw[j] * std::pow(v2, 0.5 * (p - 2.0)) * f2;
      }
      return wa[i] * row;
    });
  }
  DualNormOptions dual = options.dual;
  dual.anchor = out.V;
  out.residual_pairing_norm = dual_norm_estimate(u, params, dual).estimate;
  out.residual_times_rho = out.residual_pairing_norm * out.rho_norm;
  return out;
}

std::string to_string(AlternativeBranch branch) {
  switch (branch) {
    case AlternativeBranch::degenerate:
      return "degenerate";
    case AlternativeBranch::uniform:
      return "uniform";
    case AlternativeBranch::interpolated:
      return "interpolated";
  }
  return "unknown";
}

double alternative_eta(double c1, double C1, double p) {
  if (!(c1 > 0.0) || !(C1 > 0.0)) fail(ErrorKind::ConfigError, "c1 and C1 must be positive");
  if (!(p > 2.0)) fail(ErrorKind::RegionViolation, "eta needs p > 2");
  return std::pow(c1 / (2.0 * C1), 2.0 / (p - 2.0));
}

AlternativeReport alternative_check(const Field& u, const CknParams& params, double c1, double C1,
                                    const Thm5Options& options, int t_count) {
  AlternativeReport out;
  out.eta = alternative_eta(c1, C1, params.p);
  out.lower = c1 / (2.0 * C1);
  out.upper = 2.0 * C1 / c1;
  out.quantities = thm5_quantities(u, params, options);
  const Thm5Quantities& q = out.quantities;
  const Field v = bubble_like(params, q.V, u);
  const double pm1 = params.p - 1.0;
  out.distance = dap_norm(combine(1.0, u, -1.0, v), params);
  out.residual = q.residual_pairing_norm;
  if (q.N == 0.0) {
    out.branch = AlternativeBranch::degenerate;
    return out;
  }
  out.A_u = q.N / q.Q;
  if (out.A_u < out.lower || out.A_u > out.upper) {
    out.branch = AlternativeBranch::uniform;
    out.kappa = out.distance > 0.0 ? out.residual / std::pow(out.distance, pm1) : 0.0;
    return out;
  }
  out.branch = AlternativeBranch::interpolated;
  out.kappa = std::numeric_limits<double>::infinity();
  DualNormOptions dual = options.dual;
  dual.anchor = q.V;
  for (int k = 1; k <= t_count; ++k) {
    const double t = out.eta * k / t_count;
    const Field ut = combine(t, u, 1.0 - t, v);
    const double res = dual_norm_estimate(ut, params, dual).estimate;
    const double dist = dap_norm(combine(1.0, ut, -1.0, v), params);
    out.t.push_back(t);
    out.t_residual.push_back(res);
    out.t_distance.push_back(dist);
    if (dist > 0.0) out.kappa = std::min(out.kappa, res / std::pow(dist, pm1));
  }
  return out;
}

namespace {

using ld = long double;

// (1+e)^m - 1 - m e without cancellation for small e.
ld binomial_remainder(ld m, ld e) {
  if (std::fabs(e) < 0.125L) {
    ld term = m * e;
    ld sum = 0.0L;
    for (int k = 2; k < 400; ++k) {
      term *= (m - (k - 1)) * e / k;
      sum += term;
      if (std::fabs(term) <= 1e-22L * std::fabs(sum)) break;
    }
    return sum;
  }
  return std::pow(1.0L + e, m) - 1.0L - m * e;
}

// (1+e)^m - 1
ld pow_minus_one(ld m, ld e) {
  if (e <= -1.0L) return -1.0L;
  return std::expm1(m * std::log1p(e));
}

ld signed_pow(ld s, ld e) { return std::copysign(std::pow(std::fabs(s), e), s); }

void check_case(int which, double exponent) {
  bool ok = false;
  switch (which) {
    case 1:
    case 3:
    case 5:
      ok = exponent > 2.0 && exponent <= 3.0;
      break;
    case 2:
    case 4:
    case 6:
      ok = exponent > 3.0 && std::isfinite(exponent);
      break;
    default:
      fail(ErrorKind::CaseRangeViolation, "elementary inequality case must be 1..6, got " + std::to_string(which));
  }
  if (!ok) {
    fail(ErrorKind::CaseRangeViolation,
         "exponent " + std::to_string(exponent) + " outside the range of case " + std::to_string(which));
  }
}

}  // namespace

double elementary_lhs(int which, double exponent, double x1, double x2, double y1, double y2) {
  check_case(which, exponent);
  const ld p = exponent;
  if (which >= 5) {
    const ld a = x1, b = y1;
    if (b == 0.0L) return 0.0;
    if (a != 0.0L && std::fabs(b) <= 0.5L * std::fabs(a)) {
      return static_cast<double>(std::fabs(std::pow(std::fabs(a), p - 1.0L) * binomial_remainder(p - 1.0L, b / a)));
    }
    return static_cast<double>(
        std::fabs(signed_pow(a + b, p - 1.0L) - signed_pow(a, p - 1.0L) - (p - 1.0L) * std::pow(std::fabs(a), p - 2.0L) * b));
  }
  const ld X = ld(x1) * x1 + ld(x2) * x2;
  const ld Y = ld(y1) * y1 + ld(y2) * y2;
  const ld xy = ld(x1) * y1 + ld(x2) * y2;
  if (Y == 0.0L) return 0.0;
  const ld m = 0.5L * (p - 2.0L);
  ld value = 0.0L;
  if (which <= 2) {
    if (Y <= X) {
      const ld e = (2.0L * xy + Y) / X;
      value = std::pow(X, m) * (m * xy * Y / X + m * Y * e + (xy + Y) * binomial_remainder(m, e));
    } else {
      const ld s2 = X + 2.0L * xy + Y;
      value = std::pow(std::max(s2, 0.0L), m) * (xy + Y) - std::pow(X, m) * (xy + Y) -
              (p - 2.0L) * std::pow(X, m - 1.0L) * xy * xy;
    }
  } else {
    if (Y <= X) {
      const ld e = (2.0L * xy + Y) / X;
      const ld pm = pow_minus_one(m, e);
      value = std::pow(X, m) * (pm * xy + (pm + 1.0L) * Y) - std::pow(Y, 0.5L * p);
    } else {
      const ld e = (2.0L * xy + X) / Y;
      value = std::pow(Y, m) * (pow_minus_one(m, e) * (xy + Y) + xy) - std::pow(X, m) * xy;
    }
  }
  return static_cast<double>(std::fabs(value));
}

double elementary_rhs(int which, double exponent, double x1, double x2, double y1, double y2) {
  check_case(which, exponent);
  const double p = exponent;
  const double nx = std::hypot(x1, x2);
  const double ny = std::hypot(y1, y2);
  switch (which) {
    case 1:
      return std::pow(ny, p);
    case 2:
      return std::pow(ny, p) + std::pow(nx, p - 3.0) * ny * ny * ny;
    case 3:
      return std::pow(nx, p - 2.0) * ny * ny;
    case 4:
      return std::pow(nx, p - 2.0) * ny * ny + nx * std::pow(ny, p - 1.0);
    case 5:
      return std::pow(std::fabs(y1), p - 1.0);
    default:
      return std::pow(std::fabs(y1), p - 1.0) + std::pow(std::fabs(x1), p - 3.0) * y1 * y1;
  }
}

ElementaryReport elementary_C_estimate(int which, double exponent, int samples) {
  check_case(which, exponent);
  if (samples < 2) fail(ErrorKind::ConfigError, "elementary scan needs at least 2 samples per axis");
  const bool scalar = which >= 5;
  const int angle_count = scalar ? 2 : samples;
  ElementaryReport out;
  constexpr double kScale = 7.0;
  for (int i = 0; i < samples; ++i) {
    const double norm = std::pow(10.0, -6.0 + 12.0 * i / (samples - 1));
    for (int j = 0; j < angle_count; ++j) {
      const double angle = std::numbers::pi * j / (angle_count - 1);
      const double y1 = norm * std::cos(angle);
      const double y2 = scalar ? 0.0 : norm * std::sin(angle);
      const double yy1 = scalar ? (j == 0 ? norm : -norm) : y1;
      const double ratio = elementary_lhs(which, exponent, 1.0, 0.0, yy1, y2) /
                           elementary_rhs(which, exponent, 1.0, 0.0, yy1, y2);
      if (ratio > out.C) {
        out.C = ratio;
        out.argmax_norm = norm;
        out.argmax_angle = angle;
      }
    }
  }
  // Joint scaling: the same grid evaluated with |x| = 7.
  for (int i = 0; i < samples; ++i) {
    const double norm = std::pow(10.0, -6.0 + 12.0 * i / (samples - 1));
    for (int j = 0; j < angle_count; ++j) {
      const double angle = std::numbers::pi * j / (angle_count - 1);
      const double y1 = scalar ? (j == 0 ? norm : -norm) : norm * std::cos(angle);
      const double y2 = scalar ? 0.0 : norm * std::sin(angle);
      const double r1 = elementary_lhs(which, exponent, 1.0, 0.0, y1, y2) / elementary_rhs(which, exponent, 1.0, 0.0, y1, y2);
      const double r7 = elementary_lhs(which, exponent, kScale, 0.0, kScale * y1, kScale * y2) /
                        elementary_rhs(which, exponent, kScale, 0.0, kScale * y1, kScale * y2);
      if (out.C > 0.0) out.scaling_error = std::max(out.scaling_error, std::fabs(r7 - r1) / out.C);
    }
  }
  return out;
}

}  // namespace ckn
