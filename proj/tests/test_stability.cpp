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
#include <functional>

#include "ckn/errors.hpp"
#include "ckn/field.hpp"
#include "ckn/functionals.hpp"
#include "ckn/manifold.hpp"
#include "ckn/stability.hpp"
#include "support.hpp"

using namespace ckn;
using ckn::testing::rel_diff;

namespace {

const CknParams kWeighted = derive_params(4, 2.5, 0.2, 0.5);

Field orthogonal_bump(const CknParams& c, std::shared_ptr<const RadialGrid> g, double center, double width) {
  const Bubble v = canonical_bubble(c, 1.0);
  Field z = orthogonalize(sample_radial(g, c.n, std::make_shared<LogGaussianBump>(center, width)), v, c);
  return scaled(z, 1.0 / dap_norm(z, c));
}

Field perturbed(const CknParams& c, std::shared_ptr<const RadialGrid> g, double eps, double center = 0.0) {
  return combine(1.0, sample_bubble(c, canonical_bubble(c, 1.0), g), eps, orthogonal_bump(c, g, center, 0.7));
}

// Bubble plus a cos^2(psi)-modulated bump: axisymmetric, not radial.
Field tilted(const CknParams& c, std::shared_ptr<const RadialGrid> g) {
  auto angles = AngularRule::make(c.n, 32);
  const Field v = sample_bubble(c, canonical_bubble(c, 1.0), g);
  return combine(1.0, v, 0.3, sample_axisym(g, angles, LogGaussianBump(0.0, 0.8), 2));
}

void check_error(ErrorKind kind, const std::function<void()>& f) {
  try {
    f();
    FAIL("expected " << to_string(kind));
  } catch (const Error& e) {
    CHECK(e.kind() == kind);
  }
}

}  // namespace

TEST_CASE("exponent rule") {
  const CknParams equal = derive_params(4, 3.0, 0.3, 0.3);
  CHECK(stability_exponent(equal, false) == 6.0);
  CHECK(stability_exponent(equal, true) == 3.0);
  CHECK(stability_exponent(derive_params(4, 2.0, 0.3, 0.3), false) == 2.0);
  CHECK(stability_exponent(kWeighted, false) == 2.5);
  CHECK(stability_exponent(derive_params(3, 1.5, 0.0, 0.0), false) == 2.0);
}

TEST_CASE("stability ratio") {
  auto g = suggest_grid(kWeighted);
  const Field u = perturbed(kWeighted, g, 1e-2);
  const StabilityRecord rec = stability_ratio(u, kWeighted, false);
  CHECK(rec.ratio > 0.0);
  CHECK(rec.alpha == 2.5);
  CHECK_FALSE(rec.caveat);
  const StabilityRecord twice = stability_ratio(scaled(u, 2.0), kWeighted, false);
  CHECK(rel_diff(twice.ratio, rec.ratio) < 1e-8);

  const Field v = sample_bubble(kWeighted, canonical_bubble(kWeighted, 1.7), g);
  check_error(ErrorKind::OnManifold, [&] { stability_ratio(v, kWeighted, false); });
  check_error(ErrorKind::ZeroField, [&] { stability_ratio(scaled(v, 0.0), kWeighted, false); });
}

TEST_CASE("upper-bound scan") {
  FamilySpec family;
  family.eps = {1e-2, 3e-2};
  family.centers = {0.5};
  const ScanReport two = k_upper_scan(family, kWeighted, 2);
  const ScanReport one = k_upper_scan(family, kWeighted, 1);
  CHECK(two.upper_bound > 0.0);
  CHECK(two.label == "upper bound");
  CHECK(two.upper_bound <= one.upper_bound);
  CHECK(two.records.size() == 2);

  FamilySpec bubbles;
  bubbles.name = "exact_bubbles";
  bubbles.eps = {0.5, 2.0};
  check_error(ErrorKind::EmptyFamily, [&] { k_upper_scan(bubbles, kWeighted, 2); });
  check_error(ErrorKind::EmptyFamily, [&] { k_upper_scan(family, kWeighted, 0); });

  FamilySpec unknown;
  unknown.name = "nonsense";
  check_error(ErrorKind::ConfigError, [&] { k_upper_scan(unknown, kWeighted, 2); });

  const CknParams equal = derive_params(4, 3.0, 0.1, 0.1);
  CHECK(k_upper_scan(family, equal, 1).caveat);
}

TEST_CASE("random family is reproducible") {
  FamilySpec spec;
  spec.name = "random_bumps";
  spec.count = 4;
  spec.seed = 99;
  auto g = suggest_grid(kWeighted);
  const auto x = generate_family(spec, kWeighted, g);
  const auto y = generate_family(spec, kWeighted, g);
  REQUIRE(x.size() == 4);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(x[i].tag == y[i].tag);
    CHECK(x[i].field.value == y[i].field.value);
  }
  spec.seed = 100;
  CHECK(generate_family(spec, kWeighted, g)[0].tag != x[0].tag);
}

TEST_CASE("exponent slope fit") {
  const std::vector<double> schedule = {3e-3, 1e-2, 3e-2, 1e-1};
  {
    auto g = suggest_grid(kWeighted);
    const SlopeFitReport fit = exponent_slope_fit(kWeighted, schedule, orthogonal_bump(kWeighted, g, -10.0, 0.5));
    CHECK(std::fabs(fit.slope - 2.5) < 0.25);
  }
  {
    const CknParams flat = derive_params(3, 2.0, 0.0, 0.0);
    auto g = suggest_grid(flat);
    const SlopeFitReport fit = exponent_slope_fit(flat, schedule, orthogonal_bump(flat, g, 0.0, 0.7));
    CHECK(std::fabs(fit.slope - 2.0) < 0.2);
  }
  auto g = suggest_grid(kWeighted);
  const Field z = orthogonal_bump(kWeighted, g, 0.0, 0.7);
  check_error(ErrorKind::DegenerateFit, [&] { exponent_slope_fit(kWeighted, {1e-2}, z); });
  check_error(ErrorKind::DegenerateFit, [&] { exponent_slope_fit(kWeighted, {1e-2, 3e-2}, z); });
  check_error(ErrorKind::DegenerateFit, [&] { exponent_slope_fit(kWeighted, {1e-2, 0.5}, z); });
}

TEST_CASE("log-log fit oracle") {
  std::vector<double> x, y;
  for (int i = 0; i < 6; ++i) {
    x.push_back(std::pow(10.0, -3.0 + 0.4 * i));
    y.push_back(3.0 * std::pow(x.back(), 2.7));
  }
  const SlopeFitReport fit = loglog_fit(x, y);
  CHECK(std::fabs(fit.slope - 2.7) < 1e-12);
  CHECK(std::fabs(fit.intercept - std::log(3.0)) < 1e-11);
  check_error(ErrorKind::DegenerateFit, [&] { loglog_fit({1.0, 2.0}, {1.0, -1.0}); });
}

TEST_CASE("monotonicity chain") {
  const HatParams hp = derive_hat_params(4, 2.5, 0.1, 0.4, 0.3, 0.6);
  auto g = suggest_grid(hp.target);
  const Field radial = sample_bubble(hp.target, canonical_bubble(hp.target, 1.3), g);
  const MonotonicityRecord r = monotonicity_chain_check(radial, hp);
  CHECK(r.qnorm_residual <= 1e-8);
  CHECK(std::fabs(r.grad_chain_gap) <= 1e-8);
  CHECK(r.nu == doctest::Approx(1.0 + 1.5 * hp.target.gamma / 4.0).epsilon(1e-14));

  const MonotonicityRecord t = monotonicity_chain_check(tilted(hp.target, g), hp);
  CHECK(t.qnorm_residual <= 1e-8);
  CHECK(t.grad_chain_gap > 0.0);

  const HatParams id = derive_hat_params(4, 2.5, 0.3, 0.6, 0.3, 0.6);
  const MonotonicityRecord i = monotonicity_chain_check(tilted(id.target, g), id);
  CHECK(i.qnorm_residual <= 1e-10);
  CHECK(std::fabs(i.grad_chain_gap) <= 1e-10);

  const HatParams down = derive_hat_params(4, 2.5, 0.3, 0.6, 0.1, 0.4);
  check_error(ErrorKind::RegionViolation, [&] { monotonicity_chain_check(radial, down); });
}

TEST_CASE("continuity probe") {
  FamilySpec family;
  family.eps = {2e-2};
  family.centers = {0.5};
  const CknParams c = derive_params(4, 2.5, 0.2, 0.5);
  const ContinuityReport constant = continuity_probe({c, c, c}, family, 1);
  CHECK(constant.bounds[0] == constant.bounds[1]);
  CHECK(constant.bounds[1] == constant.bounds[2]);
  CHECK(constant.limsup_estimate == constant.limit_bound);
  CHECK_FALSE(constant.violation);

  CknParams outside = c;
  outside.a = 3.0;
  check_error(ErrorKind::RegionViolation, [&] { continuity_probe({outside, c}, family, 1); });
  check_error(ErrorKind::RegionViolation, [&] { continuity_probe({c}, family, 1); });
}

TEST_CASE("translated bubble gap probe") {
  const CknParams c = derive_params(4, 2.5, 0.3, 0.3);
  const std::vector<double> shifts = {0.0, 0.01, 0.02, 0.04, 0.08};
  const GapProbeReport rep = translated_bubble_gap_probe(c, shifts, 64);
  CHECK(rep.excluded == 1);
  REQUIRE(rep.ratios.size() == 4);
  for (double r : rep.ratios) CHECK(r > 0.0);
  CHECK(std::fabs(testing::loglog_slope(rep.shifts, rep.lhs) - 2.0) < 0.2);
  CHECK(std::fabs(testing::loglog_slope(rep.shifts, rep.rhs_core) - 2.0) < 0.2);
  CHECK(rep.infimum > 0.0);
  check_error(ErrorKind::RegionViolation, [&] { translated_bubble_gap_probe(kWeighted, shifts); });
  check_error(ErrorKind::RegionViolation,
              [&] { translated_bubble_gap_probe(derive_params(4, 2.5, 0.0, 0.0), shifts); });
}

TEST_CASE("embedding checks") {
  const CknParams c = kWeighted;
  auto g = suggest_grid(c);
  const Field v = mollify_in_ball(sample_bubble(c, canonical_bubble(c, 3.0), g), 1.0);
  for (EmbeddingVariant variant : {EmbeddingVariant::value, EmbeddingVariant::grad}) {
    const EmbeddingReport rep = embedding_check(v, c, 1.0, variant);
    CHECK(rep.constant > 0.0);
    CHECK(rep.numerator >= -1e-8);
    const EmbeddingReport twice = embedding_check(scaled(v, 3.5), c, 1.0, variant);
    CHECK(rel_diff(twice.constant, rep.constant) < 1e-8);
  }
  const EmbeddingReport rep = embedding_check(v, c, 1.0, EmbeddingVariant::value);
  CHECK(rep.p1 == doctest::Approx(4.0 * 1.5 / (4.0 - 2.5 - 0.2)));
  CHECK(rep.p2 == doctest::Approx(4.0 * 1.5 / (4.0 - 0.2 - 1.0)));
  CHECK(rep.p3 == doctest::Approx((4.0 - 2.5 - 0.5) / (4.0 * 2.5 * 1.5)));

  const Field whole = sample_bubble(c, canonical_bubble(c, 1.0), g);
  check_error(ErrorKind::UnsupportedField, [&] { embedding_check(whole, c, 1.0, EmbeddingVariant::value); });
  check_error(ErrorKind::ZeroField, [&] { embedding_check(scaled(v, 0.0), c, 1.0, EmbeddingVariant::grad); });
}
