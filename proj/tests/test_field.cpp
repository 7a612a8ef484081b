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

#include <cmath>
#include <numeric>
#include <sstream>

#include "ckn/errors.hpp"
#include "ckn/field.hpp"
#include "ckn/functionals.hpp"
#include "ckn/manifold.hpp"
#include "support.hpp"

using namespace ckn;
using ckn::testing::rel_diff;

namespace {

double integrate(const RadialGrid& g, const std::function<double(double)>& f) {
  double s = 0.0;
  auto r = g.nodes();
  auto w = g.weights();
  for (std::size_t i = 0; i < g.size(); ++i) s += w[i] * f(r[i]);
  return s;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::FormatError;
}

}  // namespace

TEST_CASE("radial grid integrates a gamma integrand") {
  auto g = RadialGrid::make(-20, 20, 512);
  const double v = integrate(*g, [](double r) { return r * r * std::exp(-r); });
  CHECK(std::fabs(v - 2.0) < 1e-10);
  auto t = g->t();
  auto w = g->weights();
  for (std::size_t i = 1; i < g->size(); ++i) CHECK(t[i] > t[i - 1]);
  for (double x : w) CHECK(x > 0.0);
}

TEST_CASE("radial grid refinement order") {
  // The (-20, 20) integrand is already at rounding level with 512 nodes, so
  // the order is observed on coarse grids where the error is resolvable.
  const double exact = std::tgamma(3.0 - 0.5);  // r^{n-1-pa} e^{-r} with n - pa = 2.5
  std::vector<double> err;
  for (int count : {32, 64, 128}) {
    auto g = RadialGrid::make(-20, 20, count);
    err.push_back(std::fabs(integrate(*g, [](double r) { return std::pow(r, 1.5) * std::exp(-r); }) - exact));
  }
  CAPTURE(err[0]);
  CAPTURE(err[1]);
  CAPTURE(err[2]);
  CHECK(err[1] * 4.0 <= err[0]);
  CHECK(err[2] * 4.0 <= err[1]);
  // Rounding floor at the default sizes.
  auto g1 = RadialGrid::make(-20, 20, 512);
  auto g2 = RadialGrid::make(-20, 20, 1024);
  auto f = [](double r) { return r * r * std::exp(-r); };
  CHECK(std::fabs(integrate(*g2, f) - 2.0) < 1e-12);
  CHECK(std::fabs(integrate(*g1, f) - 2.0) < 1e-12);
}

TEST_CASE("bad grid specs") {
  CHECK(kind_of([] { RadialGrid::make(0, -1, 64); }) == ErrorKind::BadGridSpec);
  CHECK(kind_of([] { RadialGrid::make(-1, 1, 8); }) == ErrorKind::BadGridSpec);
  CHECK(kind_of([] { RadialGrid::make(-1, 1, 20); }) == ErrorKind::BadGridSpec);
}

TEST_CASE("truncation estimate flags tails past the grid window") {
  const CknParams inner = derive_params(4, 2.5, 0.2, 0.5);
  CHECK(truncation_estimate(inner) < 1e-15);
  // n - p - pa = 0.19: the bubble tail decays like e^{-0.08 t}.
  const CknParams edge = derive_params(4, 3.272, 0.164, 0.932);
  CHECK(truncation_estimate(edge) > 1e-7);
  CHECK(truncation_estimate(edge, 50.0) > truncation_estimate(edge, 150.0));
  // Beyond |t| = 690 / n the window stops growing.
  CHECK(truncation_estimate(edge, 200.0) == truncation_estimate(edge, 1000.0));
}

TEST_CASE("rescaled grids return to their parent") {
  auto g = RadialGrid::make(-30, 30, 256);
  auto h = g->rescaled(1.7);
  CHECK(h->t_min() == doctest::Approx(-30 / 1.7));
  CHECK(h->rescaled(1 / 1.7).get() == g.get());
  CHECK(g->rescaled(1.0).get() == g.get());
}

TEST_CASE("angular rule integrates to the sphere area") {
  for (int n : {2, 3, 4, 5, 7}) {
    auto a = AngularRule::make(n);
    auto w = a->weights();
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    CHECK(rel_diff(total, sphere_area(n)) < 1e-10);
    auto psi = a->psi();
    for (std::size_t j = 1; j < a->size(); ++j) CHECK(psi[j] > psi[j - 1]);
  }
}

TEST_CASE("bubble sampling") {
  const CknParams c = derive_params(4, 2.5, 0.2, 0.5);
  auto g = suggest_grid(c);
  Bubble zero;
  zero.amplitude = 0.0;
  const Field z = sample_bubble(c, zero, g);
  CHECK(is_zero(z));

  Bubble b{1.7, 2.3, 0.0};
  const Field f = sample_bubble(c, b, g);
  const BubbleShape shape(c, b);
  const double r_half = 1.0 / b.scale;
  CHECK(rel_diff(shape.value(r_half), b.amplitude * std::pow(2.0, c.profile_exponent())) < 1e-14);

  // Analytic derivative against centred differences in r, second order.
  std::vector<double> errs;
  for (double h : {1e-3, 5e-4}) {
    double e = 0.0;
    for (double r : {0.1, 0.5, 1.0, 3.0}) {
      const double fd = (shape.value(r + h) - shape.value(r - h)) / (2 * h);
      e = std::max(e, std::fabs(fd - shape.deriv(r)));
    }
    errs.push_back(e);
  }
  CHECK(errs[1] < errs[0] / 3.0);
}

TEST_CASE("finite difference derivative of a constant is zero") {
  auto g = RadialGrid::make(-10, 10, 256);
  const Field f = profile_from_values(g, 3, std::vector<double>(g->size(), 2.5));
  for (double d : f.grad_r) CHECK(std::fabs(d) < 1e-12);
  // Smooth profile: the three-point derivative is second order in t.
  std::vector<double> worst;
  for (int count : {512, 1024}) {
    auto gg = RadialGrid::make(-10, 10, count);
    std::vector<double> v(gg->size());
    auto r = gg->nodes();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(-r[i] * r[i]);
    const Field h = profile_from_values(gg, 3, v);
    double e = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (r[i] > 0.05 && r[i] < 3) e = std::max(e, std::fabs(h.grad_r[i] + 2 * r[i] * v[i]));
    }
    worst.push_back(e);
  }
  CHECK(worst[1] < 1e-3);
  CHECK(worst[1] < worst[0] / 3.0);
}

TEST_CASE("embedding keeps angular derivative zero and reproduces radial integrals") {
  const CknParams c = derive_params(4, 3, 0.1, 0.3);
  auto g = suggest_grid(c);
  const Field u = sample_bubble(c, canonical_bubble(c, 1.3), g);
  const Field e = embed_axisym(u, AngularRule::make(4));
  for (double x : e.grad_psi) CHECK(std::fabs(x) < 1e-10);
  CHECK(rel_diff(weighted_grad_pnorm(u, c), weighted_grad_pnorm(e, c)) < 1e-10);
  CHECK(rel_diff(weighted_lq_norm(u, c), weighted_lq_norm(e, c)) < 1e-10);
}

TEST_CASE("translations") {
  const CknParams c = derive_params(3, 2, 0, 0);
  auto g = suggest_grid(c);
  const Field u = sample_bubble(c, canonical_bubble(c, 1.0), g);
  const Field t0 = translate_axisym(u, 0.0, c);
  for (double x : t0.grad_psi) CHECK(std::fabs(x) < 1e-10);
  const double q0 = weighted_lq_norm(u, c);
  for (double shift : {0.3, 1.0, 2.5}) {
    const Field t = translate_axisym(u, shift, c);
    CHECK(rel_diff(weighted_lq_norm(t, c), q0) < 1e-6);
  }
  // Translated bubbles stay extremal.
  const Field t = translate_axisym(u, 0.8, c);
  CHECK(std::fabs(deficit(t, c)) < 1e-6);

  const CknParams w = derive_params(4, 2, 0.3, 0.3);
  const Field v = sample_bubble(w, canonical_bubble(w, 1.0), suggest_grid(w));
  CHECK(kind_of([&] { translate_axisym(v, 0.5, w); }) == ErrorKind::TranslationForbidden);
}

TEST_CASE("translation gradients agree with finite differences in the shift") {
  // d/d(shift) u(x + s e1) = d_x1 u; compare radial/angular chain rule with
  // differences of values across neighbouring nodes in a fine grid.
  const CknParams c = derive_params(3, 2, 0, 0);
  auto g = RadialGrid::make(-6, 6, 2048);
  const Field u = sample_bubble(c, canonical_bubble(c, 1.0), g);
  const Field t = translate_axisym(u, 0.7, c, AngularRule::make(3, 64));
  const std::size_t m = t.cols();
  auto r = g->nodes();
  double worst = 0.0;
  for (std::size_t i = 400; i + 400 < t.rows(); i += 97) {
    for (std::size_t j = 5; j + 5 < m; j += 11) {
      const double fd = (t.value[(i + 1) * m + j] - t.value[(i - 1) * m + j]) / (r[i + 1] - r[i - 1]);
      worst = std::max(worst, std::fabs(fd - t.grad_r[i * m + j]));
    }
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("combine requires matching grids") {
  const CknParams c = derive_params(3, 2, 0, 0);
  const Field u = sample_bubble(c, canonical_bubble(c, 1.0), RadialGrid::make(-10, 10, 256));
  const Field v = sample_bubble(c, canonical_bubble(c, 1.0), RadialGrid::make(-10, 10, 512));
  CHECK(kind_of([&] { combine(1, u, 1, v); }) == ErrorKind::GridMismatch);
}

TEST_CASE("snapshot round trip is bit exact") {
  const CknParams c = derive_params(3, 2, 0, 0);
  auto g = RadialGrid::make(-12, 12, 128);
  const Field u = translate_axisym(sample_bubble(c, canonical_bubble(c, 1.3), g), 0.4, c, AngularRule::make(3, 16));
  std::stringstream ss;
  write_field(ss, u);
  const Field v = read_field(ss);
  CHECK(same_grid(*u.grid, *v.grid));
  CHECK(v.cols() == u.cols());
  CHECK(v.value == u.value);
  CHECK(v.grad_r == u.grad_r);
  CHECK(v.grad_psi == u.grad_psi);
  CHECK(v.tag == u.tag);
  auto r1 = u.grid->nodes();
  auto r2 = v.grid->nodes();
  CHECK(std::equal(r1.begin(), r1.end(), r2.begin()));

  const Field radial = sample_bubble(c, canonical_bubble(c, 0.7), g);
  std::stringstream s2;
  write_field(s2, radial);
  const Field back = read_field(s2);
  CHECK(back.is_radial());
  CHECK(back.value == radial.value);

  std::stringstream bad("# ckn-field 1\n# dim 3\n# grid oops\n");
  CHECK(kind_of([&] { read_field(bad); }) == ErrorKind::FormatError);
}

TEST_CASE("monotone resampling") {
  const CknParams c = derive_params(3, 2, 0, 0);
  auto g = RadialGrid::make(-12, 12, 256);
  const Field u = sample_bubble(c, canonical_bubble(c, 1.0), g);
  double err = 0.0;
  const Field v = resample_radial(u, RadialGrid::make(-12, 12, 512), &err);
  CHECK(err >= 0.0);
  const Field exact = sample_bubble(c, canonical_bubble(c, 1.0), v.grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < v.rows(); ++i) worst = std::max(worst, std::fabs(v.value[i] - exact.value[i]));
  CHECK(worst < 1e-4);
  // Monotone data stays monotone.
  for (std::size_t i = 1; i < v.rows(); ++i) CHECK(v.value[i] <= v.value[i - 1] + 1e-15);
}
