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

#include "operations.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "ckn/critical.hpp"
#include "ckn/field.hpp"
#include "ckn/functionals.hpp"
#include "ckn/manifold.hpp"
#include "ckn/rng.hpp"
#include "ckn/stability.hpp"
#include "ckn/transforms.hpp"

namespace ckn::experiment {

namespace {

using detail::OperationInfo;
using detail::Outcome;

const std::vector<std::pair<std::string, OperationInfo>>& table() {
  static const std::vector<std::pair<std::string, OperationInfo>> ops = {
      {"constants", {"params-core", "sharp_constant", {}, {{"agreement", 1e-6}}}},
      {"transform-check",
       {"transforms",
        "transform_identity_check",
        {"radial_fields", "axisym_fields"},
        {{"q_norm_residual", 1e-8}, {"grad_identity_residual", 1e-8}, {"drop_gap_min", 0.0}}}},
      {"project",
       {"extremal-manifold",
        "manifold_distance",
        {"amplitudes", "scales", "dual_basis"},
        {{"deficit", 1e-6}, {"dual_norm", 1e-5}}}},
      {"stability-scan",
       {"stability-lab", "stability_ratio", {"samples", "n_symmetric"}, {{"ratio_min", 0.0}}, true}},
      {"slope-fit",
       {"stability-lab",
        "exponent_slope_fit",
        {"eps", "center", "width", "expected_slope", "assert", "n_symmetric"},
        {{"slope_relative", 0.1}}}},
      {"chain-check",
       {"stability-lab",
        "monotonicity_chain_check",
        {"target", "radial_fields", "axisym_fields"},
        {{"q_norm_residual", 1e-8}, {"gap_floor", 1e-8}, {"radial_gap", 1e-8}}}},
      {"embedding-check",
       {"stability-lab",
        "embedding_check",
        {"domain_radius", "scales", "homogeneity_factor", "n_symmetric"},
        {{"constant_min", 0.0}, {"homogeneity", 1e-8}}}},
      {"spectral-gap",
       {"critical-lab",
        "spectral_gap_ratio",
        {"count", "span", "width"},
        {{"ratio_min", 1.0}, {"grid_doubling", 0.02}}}},
      {"thm5",
       {"critical-lab",
        "thm5_quantities",
        {"eps", "center", "width", "gate", "dual_basis"},
        {{"Q_slope", 0.1}, {"N_slope", 0.1}, {"residual_rho_slope", 0.15}}}},
      {"alt-check",
       {"critical-lab",
        "alternative_check",
        {"eps", "center", "width", "c1", "C1", "gate", "dual_basis", "t_count"},
        {{"residual_slope", 0.1}}}},
      {"ineq-const",
       {"critical-lab",
        "elementary_C_estimate",
        {"cases", "samples"},
        {{"grid_doubling", 0.01}, {"scaling", 1e-10}},
        false,
        false}},
  };
  return ops;
}

// Typed access to config.options with field-path errors.
class Options {
 public:
  explicit Options(const json& j) : j_(j) {}

  double number(const std::string& key, double fallback) const {
    if (!j_.contains(key)) return fallback;
    if (!j_[key].is_number()) bad(key, "expected a number");
    return j_[key].get<double>();
  }

  int integer(const std::string& key, int fallback, int min_value = 1) const {
    if (!j_.contains(key)) return fallback;
    if (!j_[key].is_number_integer()) bad(key, "expected an integer");
    const long long v = j_[key].get<long long>();
    if (v < min_value) bad(key, "must be >= " + std::to_string(min_value));
    return static_cast<int>(v);
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!j_.contains(key)) return fallback;
    if (!j_[key].is_boolean()) bad(key, "expected a boolean");
    return j_[key].get<bool>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
    if (!j_.contains(key)) return fallback;
    if (!j_[key].is_array() || j_[key].empty()) bad(key, "expected a non-empty array of numbers");
    std::vector<double> out;
    for (const json& v : j_[key]) {
      if (!v.is_number()) bad(key, "expected a non-empty array of numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }

  const json& raw(const std::string& key) const { return j_[key]; }
  bool has(const std::string& key) const { return j_.contains(key); }

  [[noreturn]] static void bad(const std::string& key, const std::string& what) {
    fail(ErrorKind::ConfigError, "config.options." + key + ": " + what);
  }

 private:
  const json& j_;
};

double tolerance(const ExperimentConfig& c, const OperationInfo& info, const std::string& key) {
  const auto it = c.tolerances.find(key);
  return it != c.tolerances.end() ? it->second : info.tolerances.at(key);
}

Check make_check(const std::string& name, double value, const std::string& relation, double limit) {
  bool pass = false;
  if (relation == "<=") pass = value <= limit;
  if (relation == ">=") pass = value >= limit;
  if (relation == "<") pass = value < limit;
  if (relation == ">") pass = value > limit;
  // NaN fails every relation above.
  return {name, value, relation, limit, pass};
}

double rel_diff(double x, double y) {
  const double s = std::max(std::fabs(x), std::fabs(y));
  return s == 0.0 ? 0.0 : std::fabs(x - y) / s;
}

// Tuples whose bubble tails the log grid cannot hold to this accuracy are
// redrawn.
constexpr double kSampleTruncation = 1e-10;

// Admissible tuple whose extremal fits on the suggested grid.
CknParams draw_params(SeedStream& rng, double t_cap) {
  for (;;) {
    const int n = 3 + static_cast<int>(rng.next() % 4);
    const double p = rng.uniform(1.3, std::min(4.0, n - 0.6));
    const double a = rng.uniform(0.0, 0.8 * (n - p) / p);
    const double b = a + rng.uniform(0.0, 0.8);
    try {
      const CknParams c = derive_params(n, p, a, b);
      if (truncation_estimate(c, t_cap) <= kSampleTruncation) return c;
    } catch (const Error&) {
    }
  }
}

std::vector<CknParams> tuples(const ExperimentConfig& c) {
  std::vector<CknParams> out = c.params;
  SeedStream rng(c.seed);
  for (int i = 0; i < c.random_params; ++i) out.push_back(draw_params(rng, c.grid.t_cap));
  return out;
}

int refinement(const ExperimentConfig& c, TolProfile profile) {
  return c.grid.refine * (profile == TolProfile::strict ? 2 : 1);
}

std::shared_ptr<const RadialGrid> refine_grid(std::shared_ptr<const RadialGrid> g, int factor) {
  if (factor == 1) return g;
  return RadialGrid::make(g->t_min(), g->t_max(), g->count() * factor, g->panel_order());
}

std::shared_ptr<const RadialGrid> grid_for(const ExperimentConfig& c, const CknParams& params, TolProfile profile,
                                           Outcome& out) {
  auto g = refine_grid(suggest_grid(params, c.grid.panel_width, c.grid.t_cap), refinement(c, profile));
  out.grids.push_back(g->describe());
  return g;
}

std::shared_ptr<const AngularRule> angles_for(const ExperimentConfig& c, const CknParams& params,
                                              TolProfile profile, Outcome& out) {
  const int count = c.grid.angles * (profile == TolProfile::strict ? 2 : 1);
  out.grids.push_back("angles " + std::to_string(count));
  return AngularRule::make(params.n, count);
}

void push(json& series, const std::string& key, const json& value) { series[key].push_back(value); }

void push_params(json& series, const CknParams& c) {
  push(series, "n", c.n);
  push(series, "p", c.p);
  push(series, "a", c.a);
  push(series, "b", c.b);
}

// Short (n, p, a, b) label for check names.
std::string tuple_tag(const CknParams& c) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "[%d,%g,%g,%g]", c.n, c.p, c.a, c.b);
  return buf;
}

double max_of(const std::vector<double>& v) {
  double m = -HUGE_VAL;
  for (double x : v) m = std::max(m, x);
  return m;
}

double min_of(const std::vector<double>& v) {
  double m = HUGE_VAL;
  for (double x : v) m = std::min(m, x);
  return m;
}

// Orthogonalised log-Gaussian bump at the canonical unit bubble, scaled to
// weighted gradient norm `norm`.
Field orthogonal_bump(const CknParams& c, std::shared_ptr<const RadialGrid> g, double center, double width,
                      double norm) {
  const Field z = orthogonalize(sample_radial(g, c.n, std::make_shared<LogGaussianBump>(center, width)),
                                canonical_bubble(c, 1.0), c);
  return scaled(z, norm / dap_norm(z, c));
}

Outcome run_constants(const ExperimentConfig& cfg, const OperationInfo& info, TolProfile profile) {
  Outcome out;
  std::vector<double> diffs;
  for (const CknParams& c : tuples(cfg)) {
    auto g = grid_for(cfg, c, profile, out);
    const Field v = sample_bubble(c, canonical_bubble(c, 1.0), g);
    const double closed = sharp_constant(c);
    const double rayleigh =
        std::pow(weighted_grad_pnorm(v, c), 1.0 / c.p) / std::pow(weighted_lq_norm(v, c), 1.0 / c.q);
    const CknParams base = derive_params(c.n, c.p, 0.0, c.b - c.a);
    const double law = std::pow(c.k, 1.0 / c.p - 1.0 - 1.0 / c.q) * sharp_constant(base);
    const double d = std::max({rel_diff(closed, rayleigh), rel_diff(closed, law), rel_diff(rayleigh, law)});
    diffs.push_back(d);
    push_params(out.series, c);
    push(out.series, "q", c.q);
    push(out.series, "k", c.k);
    push(out.series, "S_closed", closed);
    push(out.series, "S_rayleigh", rayleigh);
    push(out.series, "S_law", law);
    push(out.series, "max_rel_diff", d);
    push(out.series, "truncation_estimate", truncation_estimate(c, cfg.grid.t_cap));
  }
  out.summary["tuples"] = diffs.size();
  out.summary["q"] = out.series["q"][0];
  out.summary["sharp_constant"] = out.series["S_closed"][0];
  out.summary["max_rel_diff"] = max_of(diffs);
  out.checks.push_back(make_check("max_pairwise_rel_diff", max_of(diffs), "<=", tolerance(cfg, info, "agreement")));
  return out;
}

Outcome run_transform_check(const ExperimentConfig& cfg, const OperationInfo& info, TolProfile profile) {
  Outcome out;
  const Options opt(cfg.options);
  const int radial = opt.integer("radial_fields", 5, 0);
  const int axisym = opt.integer("axisym_fields", 3, 0);
  SeedStream rng(cfg.seed);
  std::vector<double> qres, gres, drops;
  for (const CknParams& c : tuples(cfg)) {
    auto g = grid_for(cfg, c, profile, out);
    auto angles = angles_for(cfg, c, profile, out);
    for (int i = 0; i < radial + axisym; ++i) {
      const Bubble bubble{rng.uniform(0.5, 2.0) * (i % 2 ? -1.0 : 1.0), rng.uniform(0.3, 3.0), 0.0};
      const double weight = rng.uniform(-0.5, 0.5);
      const double center = rng.uniform(-2.0, 2.0);
      const Field base = sample_bubble(c, bubble, g);
      Field u = i < radial ? combine(1.0, base, weight, sample_radial(g, c.n, std::make_shared<LogGaussianBump>(center, 1.0)))
                           : combine(1.0, base, weight, sample_axisym(g, angles, LogGaussianBump(center, 0.8), 1 + i % 3));
      const TransformReport rep = transform_identity_check(u, c);
      qres.push_back(rep.q_norm_residual);
      gres.push_back(rep.grad_identity_residual);
      if (i >= radial) drops.push_back(rep.drop_gap);
      push_params(out.series, c);
      push(out.series, "axisymmetric", i >= radial ? 1 : 0);
      push(out.series, "q_norm_residual", rep.q_norm_residual);
      push(out.series, "grad_identity_residual", rep.grad_identity_residual);
      push(out.series, "drop_gap", rep.drop_gap);
    }
  }
  out.summary["fields"] = qres.size();
  out.summary["max_q_norm_residual"] = max_of(qres);
  out.summary["max_grad_identity_residual"] = max_of(gres);
  out.checks.push_back(make_check("max_q_norm_residual", max_of(qres), "<=", tolerance(cfg, info, "q_norm_residual")));
  out.checks.push_back(
      make_check("max_grad_identity_residual", max_of(gres), "<=", tolerance(cfg, info, "grad_identity_residual")));
  if (!drops.empty()) {
    out.summary["min_drop_gap"] = min_of(drops);
    out.checks.push_back(make_check("min_axisym_drop_gap", min_of(drops), ">=", tolerance(cfg, info, "drop_gap_min")));
  }
  return out;
}

Outcome run_project(const ExperimentConfig& cfg, const OperationInfo& info, TolProfile profile) {
  Outcome out;
  const Options opt(cfg.options);
  const std::vector<double> amplitudes = opt.numbers("amplitudes", {1.0, -0.5});
  const std::vector<double> scales = opt.numbers("scales", {0.3, 0.7, 1.0, 2.0, 5.0});
  DualNormOptions dual;
  dual.basis_size = opt.integer("dual_basis", 16, 4);
  dual.seed = cfg.seed;
  std::vector<double> deficits, duals;
  for (const CknParams& c : tuples(cfg)) {
    auto g = grid_for(cfg, c, profile, out);
    for (double amp : amplitudes) {
      for (double scale : scales) {
        const Field u = sample_bubble(c, Bubble{amp, scale, 0.0}, g);
        const double d = deficit(u, c);
        const DistanceResult dist = manifold_distance(u, c);
        deficits.push_back(d);
        push_params(out.series, c);
        push(out.series, "amplitude", amp);
        push(out.series, "scale", scale);
        push(out.series, "deficit", d);
        push(out.series, "relative_distance", dist.distance / dap_norm(u, c));
        push(out.series, "restarts_agreeing", dist.restarts_agreeing);
      }
    }
    const Bubble V = canonical_bubble(c, 1.0);
    dual.anchor = V;
    const DualNormReport rep = dual_norm_estimate(sample_bubble(c, V, g), c, dual);
    duals.push_back(rep.estimate);
  }
  out.summary["bubbles"] = deficits.size();
  out.summary["max_abs_deficit"] = 0.0;
  double worst = 0.0;
  for (double d : deficits) worst = std::max(worst, std::fabs(d));
  out.summary["max_abs_deficit"] = worst;
  out.summary["max_dual_norm"] = max_of(duals);
  out.series["canonical_dual_norm"] = duals;
  out.checks.push_back(make_check("max_abs_deficit", worst, "<=", tolerance(cfg, info, "deficit")));
  out.checks.push_back(make_check("canonical_dual_norm", max_of(duals), "<=", tolerance(cfg, info, "dual_norm")));
  return out;
}

Outcome run_stability_scan(const ExperimentConfig& cfg, const OperationInfo& info, TolProfile profile) {
  Outcome out;
  const Options opt(cfg.options);
  const int samples = opt.integer("samples", 30);
  const bool n_symmetric = opt.flag("n_symmetric", false);
  FamilySpec family;
  if (cfg.family) {
    family = *cfg.family;
  } else {
    family.name = "random_bumps";
    family.count = samples;
  }
  family.seed = cfg.seed;
  std::vector<double> bounds;
  std::size_t total = 0;
  for (const CknParams& c : tuples(cfg)) {
    auto g = grid_for(cfg, c, profile, out);
    const ScanReport scan = k_upper_scan(family, c, samples, n_symmetric, g);
    bounds.push_back(scan.upper_bound);
    for (const StabilityRecord& r : scan.records) {
      push_params(out.series, c);
      push(out.series, "alpha", r.alpha);
      push(out.series, "ratio", r.ratio);
      push(out.series, "relative_distance", r.relative_distance);
      push(out.series, "deficit", r.deficit);
      push(out.series, "family_tag", r.family_tag);
      ++total;
    }
    push(out.series, "upper_bound", scan.upper_bound);
    push(out.series, "excluded", scan.excluded);
    push(out.series, "caveat", scan.caveat ? 1 : 0);
  }
  out.labels["family"] = family.describe();
  out.labels["bound"] = "upper bound on K";
  out.summary["samples"] = total;
  out.summary["min_ratio"] = min_of(bounds);
  out.checks.push_back(make_check("min_ratio", min_of(bounds), ">", tolerance(cfg, info, "ratio_min")));
  return out;
}

Outcome run_slope_fit(const ExperimentConfig& cfg, const OperationInfo& info, TolProfile profile) {
  Outcome out;
  const Options opt(cfg.options);
  const std::vector<double> eps = opt.numbers("eps", {3e-3, 1e-2, 3e-2, 1e-1});
  const double center = opt.number("center", 0.0);
  const double width = opt.number("width", 0.7);
  const bool assert_slope = opt.flag("assert", true);
  const bool n_symmetric = opt.flag("n_symmetric", false);
  const auto list = tuples(cfg);
  for (const CknParams& c : list) {
    auto g = grid_for(cfg, c, profile, out);
    const SlopeFitReport fit = exponent_slope_fit(c, eps, orthogonal_bump(c, g, center, width, 1.0));
    const double expected = opt.number("expected_slope", stability_exponent(c, n_symmetric));
    for (std::size_t i = 0; i < fit.eps.size(); ++i) {
      push_params(out.series, c);
      push(out.series, "eps", fit.eps[i]);
      push(out.series, "relative_distance", fit.relative_distance[i]);
      push(out.series, "deficit", fit.deficit[i]);
      push(out.series, "plot_x", fit.relative_distance[i]);
      push(out.series, "plot_y", fit.deficit[i]);
    }
    push(out.series, "slope", fit.slope);
    push(out.series, "expected_slope", expected);
    if (assert_slope) {
      out.checks.push_back(make_check("slope_relative_error" + tuple_tag(c),
                                      std::fabs(fit.slope - expected) / expected, "<=",
                                      tolerance(cfg, info, "slope_relative")));
    }
  }
  out.summary["slope"] = out.series["slope"][0];
  out.summary["expected_slope"] = out.series["expected_slope"][0];
  out.labels["assertion"] = assert_slope ? "slope asserted" : "recorded without a slope assertion";
  return out;
}

Outcome run_chain_check(const ExperimentConfig& cfg, const OperationInfo& info, TolProfile profile) {
  Outcome out;
  const Options opt(cfg.options);
  if (!opt.has("target") || !opt.raw("target").is_object() || !opt.raw("target").contains("a") ||
      !opt.raw("target").contains("b") || !opt.raw("target")["a"].is_number() ||
      !opt.raw("target")["b"].is_number()) {
    Options::bad("target", "expected {\"a\": number, \"b\": number}");
  }
  const double a2 = opt.raw("target")["a"].get<double>();
  const double b2 = opt.raw("target")["b"].get<double>();
  const int radial = opt.integer("radial_fields", 5, 0);
  const int axisym = opt.integer("axisym_fields", 5, 0);
  SeedStream rng(cfg.seed);
  std::vector<double> qres, gaps, radial_gaps;
  for (const CknParams& base : tuples(cfg)) {
    const HatParams hp = derive_hat_params(base.n, base.p, base.a, base.b, a2, b2);
    auto g = grid_for(cfg, hp.target, profile, out);
    auto angles = angles_for(cfg, hp.target, profile, out);
    for (int i = 0; i < radial + axisym; ++i) {
      const Field v = sample_bubble(hp.target, canonical_bubble(hp.target, rng.uniform(0.3, 3.0)), g);
      const double weight = rng.uniform(-0.5, 0.5);
      const double center = rng.uniform(-2.0, 2.0);
      const Field u = i < radial ? combine(1.0, v, weight, sample_radial(g, base.n, std::make_shared<LogGaussianBump>(center, 1.0)))
                                 : combine(1.0, v, weight, sample_axisym(g, angles, LogGaussianBump(center, 0.8), 1 + i % 3));
      const MonotonicityRecord r = monotonicity_chain_check(u, hp);
      qres.push_back(r.qnorm_residual);
      gaps.push_back(r.grad_chain_gap);
      if (i < radial) radial_gaps.push_back(std::fabs(r.grad_chain_gap));
      push_params(out.series, base);
      push(out.series, "a2", a2);
      push(out.series, "b2", b2);
      push(out.series, "axisymmetric", i >= radial ? 1 : 0);
      push(out.series, "nu", r.nu);
      push(out.series, "q_norm_residual", r.qnorm_residual);
      push(out.series, "grad_chain_gap", r.grad_chain_gap);
    }
  }
  out.summary["fields"] = gaps.size();
  out.summary["max_q_norm_residual"] = max_of(qres);
  out.summary["min_grad_chain_gap"] = min_of(gaps);
  out.checks.push_back(make_check("max_q_norm_residual", max_of(qres), "<=", tolerance(cfg, info, "q_norm_residual")));
  out.checks.push_back(make_check("min_grad_chain_gap", min_of(gaps), ">=", -tolerance(cfg, info, "gap_floor")));
  if (!radial_gaps.empty()) {
    out.summary["max_radial_gap"] = max_of(radial_gaps);
    out.checks.push_back(make_check("max_radial_abs_gap", max_of(radial_gaps), "<=", tolerance(cfg, info, "radial_gap")));
  }
  return out;
}

Outcome run_embedding_check(const ExperimentConfig& cfg, const OperationInfo& info, TolProfile profile) {
  Outcome out;
  const Options opt(cfg.options);
  const double radius = opt.number("domain_radius", 1.0);
  const std::vector<double> scales = opt.numbers("scales", {1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 7.0, 10.0, 15.0, 20.0});
  const double factor = opt.number("homogeneity_factor", 3.5);
  const bool n_symmetric = opt.flag("n_symmetric", false);
  std::vector<double> constants, homogeneity;
  for (const CknParams& c : tuples(cfg)) {
    auto g = grid_for(cfg, c, profile, out);
    for (double scale : scales) {
      const Field u = mollify_in_ball(sample_bubble(c, canonical_bubble(c, scale), g), radius);
      for (EmbeddingVariant variant : {EmbeddingVariant::value, EmbeddingVariant::grad}) {
        const EmbeddingReport rep = embedding_check(u, c, radius, variant, n_symmetric);
        const EmbeddingReport twice = embedding_check(scaled(u, factor), c, radius, variant, n_symmetric);
        constants.push_back(rep.constant);
        homogeneity.push_back(rel_diff(rep.constant, twice.constant));
        push_params(out.series, c);
        push(out.series, "scale", scale);
        push(out.series, "variant", variant == EmbeddingVariant::value ? "value" : "grad");
        push(out.series, "constant", rep.constant);
        push(out.series, "numerator", rep.numerator);
        push(out.series, "weak_norm", rep.weak_norm);
        push(out.series, "homogeneity_error", homogeneity.back());
      }
    }
  }
  out.summary["fields"] = constants.size() / 2;
  out.summary["min_constant"] = min_of(constants);
  out.summary["max_homogeneity_error"] = max_of(homogeneity);
  out.checks.push_back(make_check("min_constant", min_of(constants), ">", tolerance(cfg, info, "constant_min")));
  out.checks.push_back(
      make_check("max_homogeneity_error", max_of(homogeneity), "<=", tolerance(cfg, info, "homogeneity")));
  return out;
}

Outcome run_spectral_gap(const ExperimentConfig& cfg, const OperationInfo& info, TolProfile profile) {
  Outcome out;
  const Options opt(cfg.options);
  const int count = opt.integer("count", 20);
  const double span = opt.number("span", 4.75);
  const double width = opt.number("width", 0.6);
  std::vector<double> mins, drifts;
  for (const CknParams& c : tuples(cfg)) {
    auto g = grid_for(cfg, c, profile, out);
    auto fine = refine_grid(g, 2);
    out.grids.push_back(fine->describe());
    const SpectralScan scan = spectral_probe_scan(c, count, g, span, width);
    const SpectralScan doubled = spectral_probe_scan(c, count, fine, span, width);
    mins.push_back(scan.min_ratio);
    drifts.push_back(rel_diff(scan.min_ratio, doubled.min_ratio));
    for (std::size_t i = 0; i < scan.centers.size(); ++i) {
      push_params(out.series, c);
      push(out.series, "center", scan.centers[i]);
      push(out.series, "ratio", scan.ratios[i]);
      push(out.series, "ratio_doubled", doubled.ratios[i]);
    }
    push(out.series, "min_ratio", scan.min_ratio);
    push(out.series, "min_ratio_doubled", doubled.min_ratio);
    push(out.series, "tau_estimate", scan.tau_estimate);
  }
  out.summary["min_ratio"] = min_of(mins);
  out.summary["max_doubling_drift"] = max_of(drifts);
  out.checks.push_back(make_check("min_ratio", min_of(mins), ">", tolerance(cfg, info, "ratio_min")));
  out.checks.push_back(make_check("grid_doubling_drift", max_of(drifts), "<=", tolerance(cfg, info, "grid_doubling")));
  return out;
}

Thm5Options thm5_options(const ExperimentConfig& cfg, const Options& opt, int basis_default) {
  Thm5Options o;
  o.gate = opt.number("gate", 0.1);
  o.dual.basis_size = opt.integer("dual_basis", basis_default, 4);
  o.dual.seed = cfg.seed;
  return o;
}

Outcome run_thm5(const ExperimentConfig& cfg, const OperationInfo& info, TolProfile profile) {
  Outcome out;
  const Options opt(cfg.options);
  const std::vector<double> eps = opt.numbers("eps", {1e-3, 3e-3, 1e-2, 3e-2, 1e-1});
  const double center = opt.number("center", 0.5);
  const double width = opt.number("width", 0.7);
  const Thm5Options o = thm5_options(cfg, opt, 16);
  for (const CknParams& c : tuples(cfg)) {
    auto g = grid_for(cfg, c, profile, out);
    const Field v = sample_bubble(c, canonical_bubble(c, 1.0), g);
    const Field z = orthogonal_bump(c, g, center, width, dap_norm(v, c));
    std::vector<double> Q, N, R;
    for (double e : eps) {
      const Thm5Quantities t = thm5_quantities(combine(1.0, v, e, z), c, o);
      Q.push_back(t.Q);
      N.push_back(t.N);
      R.push_back(t.residual_times_rho);
      push_params(out.series, c);
      push(out.series, "eps", e);
      push(out.series, "Q", t.Q);
      push(out.series, "N", t.N);
      push(out.series, "residual", t.residual_pairing_norm);
      push(out.series, "rho_norm", t.rho_norm);
      push(out.series, "residual_times_rho", t.residual_times_rho);
      push(out.series, "mu", t.mu);
      push(out.series, "plot_x", e);
      push(out.series, "plot_y", t.residual_times_rho);
    }
    const double qs = loglog_fit(eps, Q).slope;
    const double ns = loglog_fit(eps, N).slope;
    const double rs = loglog_fit(eps, R).slope;
    const std::string tag = tuple_tag(c);
    out.summary["Q_slope"] = qs;
    out.summary["N_slope"] = ns;
    out.summary["residual_rho_slope"] = rs;
    out.checks.push_back(make_check("Q_slope_relative_error" + tag, std::fabs(qs - 2.0) / 2.0, "<=",
                                    tolerance(cfg, info, "Q_slope")));
    out.checks.push_back(make_check("N_slope_relative_error" + tag, std::fabs(ns - c.p) / c.p, "<=",
                                    tolerance(cfg, info, "N_slope")));
    out.checks.push_back(make_check("residual_rho_slope_relative_error" + tag, std::fabs(rs - 2.0) / 2.0, "<=",
                                    tolerance(cfg, info, "residual_rho_slope")));
  }
  return out;
}

Outcome run_alt_check(const ExperimentConfig& cfg, const OperationInfo& info, TolProfile profile) {
  Outcome out;
  const Options opt(cfg.options);
  const std::vector<double> eps = opt.numbers("eps", {1e-3, 3e-3, 1e-2, 3e-2, 1e-1});
  const double center = opt.number("center", -10.0);
  const double width = opt.number("width", 0.5);
  const double c1 = opt.number("c1", 1.0);
  const double C1 = opt.number("C1", 2.0);
  const int t_count = opt.integer("t_count", 5);
  const Thm5Options o = thm5_options(cfg, opt, 24);
  for (const CknParams& c : tuples(cfg)) {
    auto g = grid_for(cfg, c, profile, out);
    const Field v = sample_bubble(c, canonical_bubble(c, 1.0), g);
    const Field z = orthogonal_bump(c, g, center, width, dap_norm(v, c));
    std::vector<double> dist, res;
    for (double e : eps) {
      const AlternativeReport rep = alternative_check(combine(1.0, v, e, z), c, c1, C1, o, t_count);
      dist.push_back(rep.distance);
      res.push_back(rep.residual);
      push_params(out.series, c);
      push(out.series, "eps", e);
      push(out.series, "branch", to_string(rep.branch));
      push(out.series, "A_u", rep.A_u);
      push(out.series, "kappa", rep.kappa);
      push(out.series, "distance", rep.distance);
      push(out.series, "residual", rep.residual);
      push(out.series, "plot_x", rep.distance);
      push(out.series, "plot_y", rep.residual);
    }
    const double slope = loglog_fit(dist, res).slope;
    out.summary["residual_slope"] = slope;
    out.summary["expected_slope"] = c.p - 1.0;
    out.summary["eta"] = alternative_eta(c1, C1, c.p);
    out.checks.push_back(make_check("residual_slope_relative_error" + tuple_tag(c),
                                    std::fabs(slope - (c.p - 1.0)) / (c.p - 1.0), "<=",
                                    tolerance(cfg, info, "residual_slope")));
  }
  return out;
}

Outcome run_ineq_const(const ExperimentConfig& cfg, const OperationInfo& info, TolProfile profile) {
  Outcome out;
  const Options opt(cfg.options);
  const int samples = opt.integer("samples", 200, 8) * (profile == TolProfile::strict ? 2 : 1);
  if (!opt.has("cases") || !opt.raw("cases").is_array() || opt.raw("cases").empty()) {
    Options::bad("cases", "expected a non-empty array of {\"case\", \"exponent\"}");
  }
  std::vector<double> drifts, scaling;
  const json& cases = opt.raw("cases");
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const json& e = cases[i];
    if (!e.is_object() || !e.contains("case") || !e["case"].is_number_integer() || !e.contains("exponent") ||
        !e["exponent"].is_number() || e.size() != 2) {
      Options::bad("cases[" + std::to_string(i) + "]", "expected {\"case\": integer, \"exponent\": number}");
    }
    const int which = e["case"].get<int>();
    const double exponent = e["exponent"].get<double>();
    const ElementaryReport coarse = elementary_C_estimate(which, exponent, samples);
    const ElementaryReport fine = elementary_C_estimate(which, exponent, 2 * samples);
    drifts.push_back(rel_diff(coarse.C, fine.C));
    scaling.push_back(std::max(coarse.scaling_error, fine.scaling_error));
    push(out.series, "case", which);
    push(out.series, "exponent", exponent);
    push(out.series, "C", coarse.C);
    push(out.series, "C_doubled", fine.C);
    push(out.series, "argmax_norm", coarse.argmax_norm);
    push(out.series, "argmax_angle", coarse.argmax_angle);
    push(out.series, "doubling_drift", drifts.back());
    push(out.series, "scaling_error", scaling.back());
  }
  out.grids.push_back("samples " + std::to_string(samples));
  out.summary["max_doubling_drift"] = max_of(drifts);
  out.summary["max_scaling_error"] = max_of(scaling);
  out.checks.push_back(make_check("max_doubling_drift", max_of(drifts), "<=", tolerance(cfg, info, "grid_doubling")));
  out.checks.push_back(make_check("max_scaling_error", max_of(scaling), "<=", tolerance(cfg, info, "scaling")));
  return out;
}

using Runner = std::function<Outcome(const ExperimentConfig&, const OperationInfo&, TolProfile)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> r = {
      {"constants", run_constants},         {"transform-check", run_transform_check},
      {"project", run_project},             {"stability-scan", run_stability_scan},
      {"slope-fit", run_slope_fit},         {"chain-check", run_chain_check},
      {"embedding-check", run_embedding_check}, {"spectral-gap", run_spectral_gap},
      {"thm5", run_thm5},                   {"alt-check", run_alt_check},
      {"ineq-const", run_ineq_const},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& operations() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, info] : table()) out.push_back(name);
    return out;
  }();
  return names;
}

namespace detail {

const OperationInfo& operation_info(const std::string& name, const std::string& path) {
  for (const auto& [key, info] : table()) {
    if (key == name) return info;
  }
  fail(ErrorKind::ConfigError, path + ": unknown operation '" + name + "'");
}

Outcome execute(const ExperimentConfig& config, TolProfile profile) {
  const OperationInfo& info = operation_info(config.operation, "config.operation");
  return runners().at(config.operation)(config, info, profile);
}

}  // namespace detail

}  // namespace ckn::experiment
