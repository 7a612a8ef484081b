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

#include <string>
#include <vector>

#include "ckn/exec.hpp"
#include "ckn/field.hpp"
#include "ckn/params.hpp"

namespace ckn {

/// Polar form of the gradient energy, the p-th power of the weighted norm:
/// sum over the sphere of (u_r^2 + k^2 r^-2 u_psi^2)^{p/2} r^{n-1-pa}.
double weighted_grad_pnorm(const Field& u, const CknParams& params, double k_factor = 1.0,
                           exec::Policy policy = exec::default_policy());

/// q-th power of the weighted Lebesgue norm, integral of |x|^{-qb} |u|^q.
double weighted_lq_norm(const Field& u, const CknParams& params, exec::Policy policy = exec::default_policy());

struct FunctionalReport {
  double grad_term = 0.0;
  double q_term = 0.0;
  double deficit = 0.0;
  bool clamped = false;
  std::string diagnostic;
  std::string grid_meta;
};

/// Throws ZeroField for u == 0. Values in [-1e-8, 0) are clamped to zero with
/// a diagnostic; anything below is returned raw so callers see the violation.
FunctionalReport evaluate_functionals(const Field& u, const CknParams& params);

double deficit(const Field& u, const CknParams& params);

/// sup_t t |{x in B_R : f(x) > t}|^{1/exponent} for sampled magnitudes f laid
/// out like `layout`. R must be a panel edge of the radial grid.
double weak_lebesgue_norm(const Field& layout, const std::vector<double>& magnitude, double exponent,
                          double domain_radius);

/// Weak norm of |u| itself.
double weak_lebesgue_norm(const Field& u, double exponent, double domain_radius);

/// Measure of the ball of given radius as seen by the quadrature.
double quadrature_ball_measure(const Field& layout, double domain_radius);

}  // namespace ckn
