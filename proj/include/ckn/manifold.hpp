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

#include <memory>
#include <string>
#include <vector>

#include "ckn/field.hpp"
#include "ckn/params.hpp"
#include "ckn/profiles.hpp"

namespace ckn {

/// A_{p,a,b}: amplitude of the unit-scale bubble whose gradient and mass
/// energies both equal S^{pq/(q-p)}.
double bubble_normalization(const CknParams& params);

/// Member of M^s at scale lambda: amplitude A_{p,a,b} lambda^{(n-p-pa)/p}.
Bubble canonical_bubble(const CknParams& params, double scale, double axial_shift = 0.0);

/// Bubble sampled on the layout of `like` (radial, or axisymmetric if `like`
/// is or the bubble is shifted).
Field bubble_like(const CknParams& params, const Bubble& bubble, const Field& like);

struct ProjectionOptions {
  int restarts = 5;
  int agreeing = 3;
  double agreement_tol = 1e-4;
  double size_tol = 1e-10;
  int max_iter = 4000;
};

struct DistanceResult {
  /// Best value found of the weighted gradient distance; an upper bound on
  /// the infimum over the manifold.
  double distance = 0.0;
  Bubble argmin;
  std::vector<double> restart_distances;
  int restarts_agreeing = 0;
  bool upper_bound = true;
};

DistanceResult manifold_distance(const Field& u, const CknParams& params, const ProjectionOptions& options = {});

/// log-lambda and amplitude seeds from the q-mass of u.
struct MomentSeed {
  double log_scale = 0.0;
  double amplitude = 0.0;
  double axial_shift = 0.0;
};
MomentSeed moment_seed(const Field& u, const CknParams& params);

/// Maximiser of the pairing of u with |W|^{q-2} W over canonical bubbles W.
Bubble select_Pu(const Field& u, const CknParams& params);

/// <f, g>_V = integral of |x|^{-qb} |V|^{q-2} f g.
double v_pairing(const Field& f, const Field& g, const Field& v, const CknParams& params);

struct TangentBasis {
  std::vector<Field> elements;
  std::vector<std::string> names;
  /// Tangent directions the axisymmetric discretisation cannot carry.
  std::vector<std::string> unrepresented;
};

/// Amplitude and dilation directions, plus the axial translation when
/// a = b = 0. Sampled on the layout of `like`.
TangentBasis tangent_basis(const Bubble& V, const CknParams& params, const Field& like);

/// Cosine of rho against each tangent element in the V-pairing; 0 for rho = 0.
std::vector<double> orthogonality_check(const Field& rho, const Bubble& V, const CknParams& params);

/// Removes the tangent components of f at V by Gram-Schmidt in the V-pairing.
Field orthogonalize(const Field& f, const Bubble& V, const CknParams& params);

struct DecompositionRecord {
  Bubble V;
  double mu = 0.0;
  Field rho;
  std::vector<double> tangent_residuals;
  std::vector<std::string> tangent_names;
  std::vector<std::string> unrepresented;
  /// Weighted gradient norm of rho.
  double distance_estimate = 0.0;
};

DecompositionRecord mu_rho_decompose(const Field& u, const Bubble& V, const CknParams& params);

struct BubbleFit {
  Bubble bubble;
  /// max |u - v| / max |u| over the grid.
  double residual = 0.0;
};

/// Least-squares fit of a radial profile by A (1 + (lambda r)^sigma)^e.
BubbleFit fit_radial_bubble(const Field& profile, const CknParams& params);

/// Weighted gradient norm ||x|^{-a} grad u|_p.
double dap_norm(const Field& u, const CknParams& params);

}  // namespace ckn
