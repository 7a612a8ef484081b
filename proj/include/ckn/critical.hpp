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
#include <optional>
#include <string>
#include <vector>

#include "ckn/field.hpp"
#include "ckn/manifold.hpp"
#include "ckn/params.hpp"
#include "ckn/profiles.hpp"

namespace ckn {

/// Weak form of the Euler-Lagrange operator applied to phi:
///   -int |x|^{-pa} |grad u|^{p-2} grad u . grad phi + int |x|^{-qb} |u|^{q-2} u phi.
double el_residual_pairing(const Field& u, const Field& phi, const CknParams& params);

struct DualNormOptions {
  int basis_size = 16;
  int restarts = 5;
  std::uint64_t seed = 1;
  /// Spacing and width (in log r) of the bump part of the test basis.
  double spacing = 1.25;
  double width = 1.0;
  /// Bubble whose tangent elements open the basis and whose scale centres
  /// the bumps; moment-seeded from u when absent.
  std::optional<Bubble> anchor;
  int max_iterations = 200;
};

struct DualNormReport {
  /// sup of pairing / ||phi|| over the test span: a lower bound on the dual norm.
  double estimate = 0.0;
  /// Same supremum over the first basis_size / 2 elements.
  double half_estimate = 0.0;
  std::vector<double> restart_values;
  std::vector<std::string> basis_names;
};

/// Throws BasisTooSmall for fewer than four elements.
DualNormReport dual_norm_estimate(const Field& u, const CknParams& params, const DualNormOptions& options = {});

/// int |x|^{-pa} (|grad V|^{p-2} |grad rho|^2 + (p-2) |grad V|^{p-4} (grad V . grad rho)^2).
/// Requires p > 2.
double hessian_form(const Bubble& V, const Field& rho, const CknParams& params);

/// (p-1) int |V'|^{p-2} |rho'|^2 r^{n-1-pa} dr |S^{n-1}| for radial rho.
double hessian_form_radial(const Bubble& V, const Field& rho, const CknParams& params);

struct SpectralReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double tau_estimate = 0.0;
};

/// Throws ZeroField for rho == 0 and NotOrthogonal when a tangent cosine
/// exceeds 1e-6.
SpectralReport spectral_gap_ratio(const Bubble& V, const Field& rho, const CknParams& params);

struct SpectralScan {
  std::vector<double> centers;
  std::vector<double> ratios;
  double min_ratio = 0.0;
  std::size_t argmin = 0;
  double tau_estimate = 0.0;
};

/// Ratios of `count` orthogonalised log-Gaussian bumps with centres evenly
/// spread over [-span, span] around the canonical unit-scale bubble.
SpectralScan spectral_probe_scan(const CknParams& params, int count, std::shared_ptr<const RadialGrid> grid,
                                 double span = 4.75, double width = 0.6);

struct Thm5Options {
  /// Relative distance gate: u must lie within gate * ||u|| of the manifold.
  double gate = 0.1;
  DualNormOptions dual;
};

struct Thm5Quantities {
  /// Dual-norm lower-bound estimate of the Euler-Lagrange residual of u.
  double residual_pairing_norm = 0.0;
  double rho_norm = 0.0;
  double residual_times_rho = 0.0;
  double Q = 0.0;
  double N = 0.0;
  double mu = 0.0;
  double distance_gate = 0.0;
  Bubble V;
};

/// Throws RegionViolation for p <= 2 and FarFromManifold past the gate.
Thm5Quantities thm5_quantities(const Field& u, const CknParams& params, const Thm5Options& options = {});

enum class AlternativeBranch { degenerate, uniform, interpolated };
std::string to_string(AlternativeBranch branch);

struct AlternativeReport {
  AlternativeBranch branch = AlternativeBranch::degenerate;
  double A_u = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double eta = 0.0;
  /// residual / ||u - V||^{p-1}, or its minimum over the t grid.
  double kappa = 0.0;
  double residual = 0.0;
  double distance = 0.0;
  std::vector<double> t;
  std::vector<double> t_residual;
  std::vector<double> t_distance;
  Thm5Quantities quantities;
};

double alternative_eta(double c1, double C1, double p);

AlternativeReport alternative_check(const Field& u, const CknParams& params, double c1, double C1,
                                    const Thm5Options& options = {}, int t_count = 5);

/// Left-hand side of elementary inequality `which` (1..6) at x = (x1, x2),
/// y = (y1, y2); the scalar cases 5 and 6 read a = x1, b = y1.
double elementary_lhs(int which, double exponent, double x1, double x2, double y1, double y2);
double elementary_rhs(int which, double exponent, double x1, double x2, double y1, double y2);

struct ElementaryReport {
  double C = 0.0;
  double argmax_norm = 0.0;
  double argmax_angle = 0.0;
  /// max relative change of LHS / RHS when (x, y) is scaled to |x| = 7.
  double scaling_error = 0.0;
};

/// sup LHS / RHS with |x| = 1, |y| on logspace[-6, 6] (`samples` points) and
/// the relative angle on `samples` points of [0, pi]. Throws
/// CaseRangeViolation outside the exponent range of the case.
ElementaryReport elementary_C_estimate(int which, double exponent, int samples);

}  // namespace ckn
