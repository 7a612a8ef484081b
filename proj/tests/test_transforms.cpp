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

#include "ckn/errors.hpp"
#include "ckn/field.hpp"
#include "ckn/functionals.hpp"
#include "ckn/manifold.hpp"
#include "ckn/transforms.hpp"
#include "support.hpp"

using namespace ckn;
using ckn::testing::rel_diff;

namespace {

// Non-radial axisymmetric field: a bump translated off the origin. The
// translation itself is geometric, so it is built with unweighted params.
Field translated_bump(const CknParams& c, std::shared_ptr<const RadialGrid> g, double center, double shift) {
  const CknParams flat = derive_params(c.n, c.p, 0.0, 0.0);
  const Field radial = sample_radial(g, c.n, std::make_shared<LogGaussianBump>(center, 0.8));
  return translate_axisym(radial, shift, flat, AngularRule::make(c.n, 64));
}

Field tilted(const CknParams& c, std::shared_ptr<const RadialGrid> g) {
  const LogGaussianBump bump(0.3, 1.0);
  const Field radial = sample_radial(g, c.n, std::make_shared<LogGaussianBump>(0.3, 1.0));
  const Field odd = sample_axisym(g, AngularRule::make(c.n, 64), bump, 1);
  return combine(1.0, radial, 0.4, odd);
}

}  // namespace

TEST_CASE("k = 1 is the identity") {
  const CknParams c = derive_params(4, 2.5, 0.0, 0.3);
  auto g = suggest_grid(c);
  const Field u = sample_bubble(c, Bubble{1.3, 0.7, 0.0}, g);
  const Field v = horiuchi_map(u, c, Direction::forward);
  CHECK(v.grid.get() == u.grid.get());
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::fabs(v.value[i] - u.value[i]) <= 1e-14);
}

TEST_CASE("k-map sends weighted bubbles to unweighted bubbles") {
  for (auto [n, p, a, b] : {std::tuple{4, 2.5, 0.2, 0.5}, {4, 3.0, 0.1, 0.3}, {5, 2.0, 0.4, 0.4}}) {
    const CknParams c = derive_params(n, p, a, b);
    const CknParams target = horiuchi_target(c);
    const Field u = sample_bubble(c, Bubble{1.7, 1.9, 0.0}, suggest_grid(c));
    const Field bar = horiuchi_map(u, c, Direction::forward);
    const BubbleFit fit = fit_radial_bubble(bar, target);
    CAPTURE(c.describe());
    CHECK(fit.residual < 1e-8);
    // The fitted member is the predicted one: amplitude k^{1/q} A, scale lambda^{1/k}.
    CHECK(rel_diff(fit.bubble.amplitude, std::pow(c.k, 1 / c.q) * 1.7) < 1e-8);
    CHECK(rel_diff(fit.bubble.scale, std::pow(1.9, 1 / c.k)) < 1e-8);
  }
}

TEST_CASE("k-map round trip") {
  const CknParams c = derive_params(4, 2.5, 0.2, 0.5);
  auto g = suggest_grid(c);
  const Field u = tilted(c, g);
  const Field back = horiuchi_map(horiuchi_map(u, c, Direction::forward), c, Direction::inverse);
  CHECK(back.grid.get() == u.grid.get());
  double worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    worst = std::max({worst, std::fabs(back.value[i] - u.value[i]), std::fabs(back.grad_psi[i] - u.grad_psi[i])});
  }
  CHECK(worst <= 1e-12);
  // Gradients come back up to rounding relative to their size.
  for (std::size_t i = 0; i < u.size(); ++i) {
    CHECK(std::fabs(back.grad_r[i] - u.grad_r[i]) <= 1e-12 * (std::fabs(u.grad_r[i]) + 1e-300));
  }
}

TEST_CASE("k-map identities") {
  const CknParams c = derive_params(4, 2.5, 0.2, 0.5);
  auto g = suggest_grid(c);
  std::vector<Field> fields = {sample_bubble(c, canonical_bubble(c, 1.0), g),
                               sample_bubble(c, Bubble{-0.4, 6.0, 0.0}, g), tilted(c, g),
                               translated_bump(c, g, 0.0, 0.8)};
  for (const Field& u : fields) {
    const TransformReport rep = transform_identity_check(u, c);
    CAPTURE(u.tag);
    CHECK(rep.q_norm_residual <= 1e-8);
    CHECK(rep.grad_identity_residual <= 1e-8);
    if (u.is_radial()) {
      CHECK(std::fabs(rep.drop_gap) <= 1e-12);
    } else {
      CHECK(rep.drop_gap > 0.0);
    }
  }
  const Field zero = scaled(fields[0], 0.0);
  const TransformReport rep = transform_identity_check(zero, c);
  CHECK(rep.lhs_grad == 0.0);
  CHECK(rep.rhs_grad == 0.0);
  CHECK(rep.q_norm_residual == 0.0);
  CHECK_THROWS_AS(transform_identity_check(fields[0], derive_params(4, 2.5, 0, 0.3)), Error);
}

TEST_CASE("q-norm identity on random fields") {
  for (int s = 0; s < 10; ++s) {
    const CknParams c = testing::random_params();
    if (c.a == 0.0) continue;
    auto g = suggest_grid(c);
    const Field u = combine(1.0, sample_bubble(c, canonical_bubble(c, testing::uniform(0.2, 5)), g),
                            testing::uniform(-1, 1),
                            sample_radial(g, c.n, std::make_shared<LogGaussianBump>(testing::uniform(-3, 3), 1.0)));
    const TransformReport rep = transform_identity_check(u, c);
    CAPTURE(c.describe());
    CHECK(rep.q_norm_residual <= 1e-8);
    CHECK(rep.grad_identity_residual <= 1e-8);
  }
}

TEST_CASE("hat map") {
  const HatParams id = derive_hat_params(4, 2.5, 0.3, 0.6, 0.3, 0.6);
  auto g = suggest_grid(id.target);
  const Field u = tilted(id.target, g);
  const Field same = hat_map(u, id, Direction::forward);
  CHECK(same.value == u.value);

  const HatParams hp = derive_hat_params(4, 2.5, 0.1, 0.4, 0.3, 0.6);
  CHECK(hp.h > 1.0);
  const Field hat = hat_map(u, hp, Direction::forward);
  const double lhs = weighted_lq_norm(u, hp.target);
  const double rhs = weighted_lq_norm(hat, hp.base);
  CHECK(rel_diff(lhs, rhs) < 1e-8);
  const Field back = hat_map(hat, hp, Direction::inverse);
  CHECK(back.grid.get() == u.grid.get());
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::fabs(back.value[i] - u.value[i]) <= 1e-12);
}
