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


#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ckn/field.hpp"
#include "ckn/manifold.hpp"
#include "ckn/params.hpp"

namespace ckn {

/// Declarative description of a sample family, persisted with results.
///   bubble_plus_bump  V + eps * zeta for every eps x center pair
///   random_bumps      `count` seeded draws of (eps, sign, center, width)
///   exact_bubbles     canonical bubbles at the scales listed in `eps`
struct FamilySpec {
  std::string name = "bubble_plus_bump";
  std::vector<double> eps = {1e-2};
  std::vector<double> centers = {0.0};
  double width = 0.7;
  double scale = 1.0;
  int count = 0;
  double eps_min = 1e-3;
  double eps_max = 1e-1;
  double center_min = -3.0;
  double center_max = 3.0;
  bool orthogonalize = true;
  std::uint64_t seed = 1;

  std::string describe() const;
};

struct FamilyMember {
  Field field;
  std::string tag;
};

std::vector<FamilyMember> generate_family(const FamilySpec& spec, const CknParams& params,
                                          std::shared_ptr<const RadialGrid> grid);

struct StabilityRecord {
  CknParams params;
  double alpha = 0.0;
  double ratio = 0.0;
  double distance = 0.0;
  double relative_distance = 0.0;
  double deficit = 0.0;
  double grad_norm = 0.0;
  std::string family_tag;
  /// Set for a = b > 0, where the stability constant may vanish.
  bool caveat = false;
};

/// Throws ZeroField, or OnManifold when the distance is at most 1e-6 ||u||.
StabilityRecord stability_ratio(const Field& u, const CknParams& params, bool n_symmetric,
                                const std::string& family_tag = "");

struct ScanReport {
  /// Smallest ratio over the admissible samples: an upper bound on K.
  double upper_bound = 0.0;
  std::string label = "upper bound";
  std::size_t argmin = 0;
  std::size_t excluded = 0;
  bool caveat = false;
  std::vector<StabilityRecord> records;
};

ScanReport k_upper_scan(const FamilySpec& family, const CknParams& params, int sample_count,
                        bool n_symmetric = false, std::shared_ptr<const RadialGrid> grid = nullptr);

struct SlopeFitReport {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> eps;
  std::vector<double> relative_distance;
  std::vector<double> deficit;
};

/// Fits log deficit(V + eps perturbation) against log relative distance,
/// with V the canonical unit-scale bubble.
SlopeFitReport exponent_slope_fit(const CknParams& params, const std::vector<double>& eps_schedule,
                                  const Field& perturbation);

/// Least-squares slope of log y on log x; DegenerateFit for fewer than two
/// points or non-positive data.
SlopeFitReport loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

struct MonotonicityRecord {
  HatParams hp;
  double nu = 0.0;
  /// (lhs - rhs) / lhs of the dropped-angular-factor gradient inequality.
  double grad_chain_gap = 0.0;
  double qnorm_residual = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// u lives in the target (a2) space. Requires a1 <= a2.
MonotonicityRecord monotonicity_chain_check(const Field& u, const HatParams& hp);

struct ContinuityReport {
  std::vector<double> bounds;
  double limit_bound = 0.0;
  double noise = 0.0;
  double limsup_estimate = 0.0;
  bool violation = false;
};

/// The last element of `sequence` is taken as the limit.
ContinuityReport continuity_probe(const std::vector<CknParams>& sequence, const FamilySpec& family,
                                  int sample_count);

struct GapProbeReport {
  std::vector<double> shifts;
  std::vector<double> lhs;
  std::vector<double> rhs_core;
  std::vector<double> ratios;
  std::size_t excluded = 0;
  double infimum = 0.0;
};

GapProbeReport translated_bubble_gap_probe(const CknParams& params, const std::vector<double>& shifts,
                                           int angle_count = AngularRule::kDefaultCount);

enum class EmbeddingVariant { value, grad };

struct EmbeddingReport {
  double constant = 0.0;
  double numerator = 0.0;
  double weak_norm = 0.0;
  double p1 = 0.0, p2 = 0.0, p3 = 0.0;
  double alpha = 0.0;
};

EmbeddingReport embedding_check(const Field& u, const CknParams& params, double domain_radius,
                                EmbeddingVariant variant, bool n_symmetric = false);

/// u multiplied by a smooth cutoff that vanishes on the outer 10% of the
/// ball of given radius.
Field mollify_in_ball(const Field& u, double domain_radius);

}  // namespace ckn
