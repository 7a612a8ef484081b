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

namespace ckn {

/// Validated exponent tuple (n, p, a, b) of the weighted inequality
///   || |x|^{-a} grad u ||_p >= S(p,a,b) || |x|^{-b} u ||_q
/// together with the derived exponents. Only derive_params() builds one.
struct CknParams {
  int n = 0;
  double p = 0.0;
  double a = 0.0;
  double b = 0.0;
  double q = 0.0;      // np / (n - p * gamma), stored once
  double gamma = 0.0;  // 1 + a - b
  double k = 0.0;      // (n - p) / (n - p - a p)

  /// n - p - p a; positive on the admissible region.
  double weight_gap() const { return n - p - p * a; }
  /// Radial power sigma of the extremal profile (1 + B r^sigma)^(1 - n/(p gamma)).
  double sigma() const;
  /// Exponent 1 - n / (p gamma) of the extremal profile.
  double profile_exponent() const { return 1.0 - n / (p * gamma); }
  /// Dilation weight (n - p - p a) / p of the scaling u -> s^c u(s x).
  double dilation_weight() const { return weight_gap() / p; }

  bool weights_vanish() const { return a == 0.0 && b == 0.0; }

  std::string describe() const;
};

bool operator==(const CknParams& x, const CknParams& y);

/// Throws RegionViolation naming the violated constraint.
CknParams derive_params(int n, double p, double a, double b);

/// Closed-form sharp constant S(p, a, b).
double sharp_constant(const CknParams& params);

/// Pair of tuples sharing p and gamma, related by the radial power map r -> r^h.
struct HatParams {
  CknParams base;    // (a1, b1)
  CknParams target;  // (a2, b2)
  double h = 1.0;    // (n - p - a1 p) / (n - p - a2 p)
};

HatParams derive_hat_params(int n, double p, double a1, double b1, double a2, double b2);

/// Exponent used by the stability estimates: max{4, 2p} when p != 2 and
/// 0 < a = b (unless the field is n-symmetric), max{2, p} otherwise.
double stability_exponent(const CknParams& params, bool n_symmetric);

/// |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2).
double sphere_area(int n);
/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

}  // namespace ckn
