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


#include <doctest.h>

#include <gsl/gsl_roots.h>

#include <cmath>

#include "ckn/errors.hpp"
#include "ckn/field.hpp"
#include "ckn/functionals.hpp"
#include "ckn/manifold.hpp"
#include "support.hpp"

using namespace ckn;
using ckn::testing::rel_diff;

namespace {

const CknParams kWeighted = derive_params(4, 2.5, 0.2, 0.5);

Field bump(const CknParams& c, std::shared_ptr<const RadialGrid> g, double center, double width = 0.7) {
  return sample_radial(g, c.n, std::make_shared<LogGaussianBump>(center, width));
}

// Independent normalisation: root of A -> A^p G - A^q M with both energies
// from adaptive quadrature.
double oracle_normalization(const CknParams& c) {
  const testing::OracleEnergies e = testing::oracle_unit_bubble(c);
  struct Ctx {
    double g, m, p, q;
  } ctx{e.grad, e.mass, c.p, c.q};
  gsl_function fn;
  fn.function = [](double la, void* v) {
    const auto* x = static_cast<Ctx*>(v);
    return x->p * la + std::log(x->g) - (x->q * la + std::log(x->m));
  };
  fn.params = &ctx;
  gsl_root_fsolver* s = gsl_root_fsolver_alloc(gsl_root_fsolver_brent);
  gsl_root_fsolver_set(s, &fn, -50.0, 50.0);
  double root = 0.0;
  for (int it = 0; it < 200; ++it) {
    gsl_root_fsolver_iterate(s);
    root = gsl_root_fsolver_root(s);
    if (gsl_root_test_interval(gsl_root_fsolver_x_lower(s), gsl_root_fsolver_x_upper(s), 0, 1e-15) == GSL_SUCCESS) {
      break;
    }
  }
  gsl_root_fsolver_free(s);
  return std::exp(root);
}

}  // namespace

TEST_CASE("bubble normalisation") {
  for (auto [n, p, a, b] : {std::tuple{4, 3.0, 0.2, 0.4}, {3, 2.0, 0.0, 0.0}, {4, 2.5, 0.2, 0.5}, {5, 1.7, 0.3, 1.1}}) {
    const CknParams c = derive_params(n, p, a, b);
    CAPTURE(c.describe());
    CHECK(rel_diff(bubble_normalization(c), oracle_normalization(c)) < 1e-6);
    auto g = suggest_grid(c);
    const double level = std::pow(sharp_constant(c), c.p * c.q / (c.q - c.p));
    for (double lambda : {0.5, 1.0, 2.0}) {
      const Field v = sample_bubble(c, canonical_bubble(c, lambda), g);
      CHECK(rel_diff(weighted_grad_pnorm(v, c), level) < 1e-6);
      CHECK(rel_diff(weighted_lq_norm(v, c), level) < 1e-6);
    }
    const Field v1 = sample_bubble(c, canonical_bubble(c, 1.3), g);
    const Field v2 = sample_bubble(c, canonical_bubble(c, 2.6), g);
    CHECK(rel_diff(weighted_grad_pnorm(v1, c), weighted_grad_pnorm(v2, c)) < 1e-9);
    CHECK(rel_diff(weighted_lq_norm(v1, c), weighted_lq_norm(v2, c)) < 1e-9);
  }
}

TEST_CASE("distance of manifold elements") {
  auto g = suggest_grid(kWeighted);
  for (Bubble b : {Bubble{1.0, 1.0, 0.0}, Bubble{0.4, 3.0, 0.0}, canonical_bubble(kWeighted, 0.2)}) {
    const Field u = sample_bubble(kWeighted, b, g);
    const DistanceResult d = manifold_distance(u, kWeighted);
    CHECK(d.distance <= 1e-6);
    CHECK(rel_diff(d.argmin.amplitude, b.amplitude) < 1e-4);
    CHECK(rel_diff(d.argmin.scale, b.scale) < 1e-4);
    CHECK(d.upper_bound);
    const DistanceResult e = manifold_distance(scaled(u, 1.1), kWeighted);
    CHECK(e.distance <= 1e-6);
  }
}

TEST_CASE("distance of a perturbed bubble stays below the explicit competitor") {
  auto g = suggest_grid(kWeighted);
  const Field v = sample_bubble(kWeighted, canonical_bubble(kWeighted, 1.0), g);
  const Field z = bump(kWeighted, g, 0.5);
  const double eps = 1e-2;
  const DistanceResult d = manifold_distance(combine(1.0, v, eps, z), kWeighted);
  CHECK(d.distance <= eps * dap_norm(z, kWeighted) + 1e-6);
  CHECK(d.distance > 0.0);
  CHECK(d.restarts_agreeing >= 3);
}

TEST_CASE("distance is dilation invariant") {
  auto g = suggest_grid(kWeighted);
  const double lambda = 3.0;
  auto make = [&](double l) {
    const Field v = sample_bubble(kWeighted, canonical_bubble(kWeighted, l), g);
    const Field z = bump(kWeighted, g, -std::log(l) + 0.5);
    return combine(1.0, v, 0.05 * std::pow(l, kWeighted.dilation_weight()), z);
  };
  const DistanceResult d1 = manifold_distance(make(1.0), kWeighted);
  const DistanceResult d2 = manifold_distance(make(lambda), kWeighted);
  CHECK(rel_diff(d1.distance, d2.distance) < 1e-4);
  CHECK(rel_diff(d2.argmin.scale / d1.argmin.scale, lambda) < 1e-3);
}

TEST_CASE("zero field has no distance") {
  auto g = suggest_grid(kWeighted);
  const Field z = profile_from_values(g, 4, std::vector<double>(g->size(), 0.0));
  try {
    manifold_distance(z, kWeighted);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroField);
  }
  CHECK_THROWS_AS(select_Pu(z, kWeighted), Error);
}

TEST_CASE("P_u selection") {
  auto g = suggest_grid(kWeighted);
  for (double lambda : {1.0, 0.3, 4.0}) {
    const Bubble v = canonical_bubble(kWeighted, lambda);
    const Field u = sample_bubble(kWeighted, v, g);
    CHECK(rel_diff(select_Pu(u, kWeighted).scale, lambda) < 1e-4);
    CHECK(rel_diff(select_Pu(scaled(u, 3.0), kWeighted).scale, lambda) < 1e-4);
    const Field zeta = orthogonalize(bump(kWeighted, g, -std::log(lambda) + 0.3), v, kWeighted);
    const Bubble w = select_Pu(combine(1.0, u, 1e-2 * std::pow(lambda, kWeighted.dilation_weight()), zeta), kWeighted);
    CHECK(std::fabs(std::log(w.scale / lambda)) <= 0.1);
  }
}

TEST_CASE("mu rho decomposition") {
  auto g = suggest_grid(kWeighted);
  const Bubble v = canonical_bubble(kWeighted, 1.0);
  const Field vf = sample_bubble(kWeighted, v, g);
  const DecompositionRecord one = mu_rho_decompose(vf, v, kWeighted);
  CHECK(one.mu == doctest::Approx(1.0).epsilon(1e-14));
  for (double x : one.rho.value) CHECK(std::fabs(x) < 1e-14);
  CHECK(one.rho.value.size() == vf.value.size());
  const DecompositionRecord two = mu_rho_decompose(scaled(vf, 2.0), v, kWeighted);
  CHECK(two.mu == doctest::Approx(2.0).epsilon(1e-14));

  // W orthogonal to V in the pairing: mu stays 1 and rho = eps W.
  Field w = bump(kWeighted, g, 0.4);
  w = combine(1.0, w, -v_pairing(vf, w, vf, kWeighted) / v_pairing(vf, vf, vf, kWeighted), vf);
  const double eps = 0.03;
  const DecompositionRecord rec = mu_rho_decompose(combine(1.0, vf, eps, w), v, kWeighted);
  CHECK(std::fabs(rec.mu - 1.0) < 1e-10);
  double worst = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) worst = std::max(worst, std::fabs(rec.rho.value[i] - eps * w.value[i]));
  CHECK(worst < 1e-10);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(rec.rho.value[i] == combine(1.0, combine(1.0, vf, eps, w), -rec.mu, vf).value[i]);
  }
}

TEST_CASE("tangent basis") {
  auto g = suggest_grid(kWeighted);
  const Bubble v = canonical_bubble(kWeighted, 1.4);
  const Field like = sample_bubble(kWeighted, v, g);
  const TangentBasis basis = tangent_basis(v, kWeighted, like);
  CHECK(basis.elements.size() == 2);
  CHECK(basis.unrepresented.empty());
  CHECK(v_pairing(basis.elements[0], basis.elements[0], like, kWeighted) > 0.0);

  // Dilation direction against centred differences in log lambda.
  const double c = kWeighted.dilation_weight();
  auto dilated = [&](double h) {
    Bubble b = v;
    b.amplitude *= std::exp(c * h);
    b.scale *= std::exp(h);
    return sample_bubble(kWeighted, b, g);
  };
  std::vector<double> errs;
  for (double h : {1e-2, 5e-3}) {
    const Field up = dilated(h), dn = dilated(-h);
    double e = 0.0;
    for (std::size_t i = 0; i < like.size(); ++i) {
      e = std::max(e, std::fabs((up.value[i] - dn.value[i]) / (2 * h) - basis.elements[1].value[i]));
    }
    errs.push_back(e);
  }
  CHECK(errs[1] < errs[0] / 3.5);

  const CknParams flat = derive_params(3, 2, 0, 0);
  const Bubble vf = canonical_bubble(flat, 1.0);
  const TangentBasis fb = tangent_basis(vf, flat, sample_bubble(flat, vf, suggest_grid(flat)));
  CHECK(fb.elements.size() == 3);
  CHECK(fb.unrepresented.size() == 2);
}

TEST_CASE("axial tangent matches a shift difference") {
  const CknParams flat = derive_params(3, 2, 0, 0);
  auto g = RadialGrid::make(-12, 12, 768);
  auto angles = AngularRule::make(3, 32);
  const Bubble v = canonical_bubble(flat, 1.0, 0.3);
  const Field like = sample_bubble(flat, v, g, angles);
  const TangentBasis basis = tangent_basis(v, flat, like);
  const double h = 1e-5;
  Bubble up = v, dn = v;
  up.axial_shift += h;
  dn.axial_shift -= h;
  const Field fu = sample_bubble(flat, up, g, angles);
  const Field fd = sample_bubble(flat, dn, g, angles);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < like.size(); ++i) {
    // d/dx0 V(x - x0 e1) = -d_x1 V(x - x0 e1).
    const double diff = -(fu.value[i] - fd.value[i]) / (2 * h);
    worst = std::max(worst, std::fabs(diff - basis.elements[2].value[i]));
    scale = std::max(scale, std::fabs(diff));
  }
  CHECK(worst < 1e-6 * scale);
  // Gradient of the axial element against differences in r.
  const Field& ax = basis.elements[2];
  auto r = g->nodes();
  const std::size_t m = ax.cols();
  double gworst = 0.0, gscale = 0.0;
  for (std::size_t i = 200; i + 200 < ax.rows(); i += 37) {
    for (std::size_t j = 3; j + 3 < m; j += 5) {
      const double fdr = (ax.value[(i + 1) * m + j] - ax.value[(i - 1) * m + j]) / (r[i + 1] - r[i - 1]);
      gworst = std::max(gworst, std::fabs(fdr - ax.grad_r[i * m + j]));
      gscale = std::max(gscale, std::fabs(ax.grad_r[i * m + j]));
    }
  }
  CHECK(gworst < 1e-2 * gscale);
}

TEST_CASE("orthogonality check") {
  auto g = suggest_grid(kWeighted);
  const Bubble v = canonical_bubble(kWeighted, 1.0);
  const Field vf = sample_bubble(kWeighted, v, g);
  for (double r : orthogonality_check(scaled(vf, 0.0), v, kWeighted)) CHECK(r == 0.0);
  CHECK(orthogonality_check(vf, v, kWeighted)[0] == doctest::Approx(1.0).epsilon(1e-12));

  const Field zeta = orthogonalize(bump(kWeighted, g, 0.3), v, kWeighted);
  for (double r : orthogonality_check(zeta, v, kWeighted)) CHECK(std::fabs(r) < 1e-10);

  // P_u followed by the decomposition kills both pairings.
  const Field u = combine(1.0, vf, 0.02, bump(kWeighted, g, 0.8));
  const Bubble pu = select_Pu(u, kWeighted);
  const DecompositionRecord rec = mu_rho_decompose(u, pu, kWeighted);
  CHECK(std::fabs(rec.tangent_residuals[0]) < 1e-10);
  CHECK(std::fabs(rec.tangent_residuals[1]) <= 1e-4);
}

TEST_CASE("canonical bubbles have zero deficit across the region") {
  for (int s = 0; s < 20; ++s) {
    const CknParams c = testing::random_params();
    const Field v = sample_bubble(c, canonical_bubble(c, testing::uniform(0.1, 10)), suggest_grid(c));
    CAPTURE(c.describe());
    CHECK(std::fabs(deficit(v, c)) < 1e-6);
  }
}
