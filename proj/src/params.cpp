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

#include "ckn/params.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ckn/errors.hpp"

namespace ckn {

double CknParams::sigma() const {
  return p * gamma * weight_gap() / ((p - 1.0) * (n - p * gamma));
}

std::string CknParams::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "(n=" << n << ", p=" << p << ", a=" << a << ", b=" << b << ")";
  return os.str();
}

bool operator==(const CknParams& x, const CknParams& y) {
  return x.n == y.n && x.p == y.p && x.a == y.a && x.b == y.b;
}

CknParams derive_params(int n, double p, double a, double b) {
  auto tuple = [&] {
    std::ostringstream os;
    os.precision(17);
    os << "(n=" << n << ", p=" << p << ", a=" << a << ", b=" << b << ")";
    return os.str();
  };
  if (!std::isfinite(p) || !std::isfinite(a) || !std::isfinite(b)) {
    fail(ErrorKind::RegionViolation, "non-finite exponent in " + tuple());
  }
  // Report every violated constraint so boundary cases name all causes.
  std::string broken;
  auto require = [&](bool ok, const char* what) {
    if (!ok) broken += std::string(broken.empty() ? "" : "; ") + what;
  };
  require(n >= 2, "n >= 2");
  require(p > 1.0, "1 < p");
  require(p < n, "p < n");
  require(a >= 0.0, "0 <= a");
  require(a < (n - p) / p, "a < (n-p)/p");
  require(a <= b, "a <= b (b < a)");
  require(b < a + 1.0, "b < a+1");
  if (!broken.empty()) fail(ErrorKind::RegionViolation, "requires " + broken + " " + tuple());

  CknParams out;
  out.n = n;
  out.p = p;
  out.a = a;
  out.b = b;
  out.gamma = 1.0 + a - b;
  out.q = n * p / (n - p * out.gamma);
  out.k = (n - p) / (n - p - a * p);
  return out;
}

double sharp_constant(const CknParams& c) {
  const double n = c.n;
  const double p = c.p;
  const double g = c.gamma;
  const double e = g / n;
  const double log_s =
      std::log(n) / p + (e - 1.0 + 1.0 / p) * std::log(p - 1.0) + (e - 1.0 / p) * std::log(n - g * p) +
      (1.0 - e) * std::log(c.weight_gap()) +
      e * (std::log(2.0) + 0.5 * n * std::log(std::numbers::pi) - std::log(p * g)) +
      e * (std::lgamma(n / (g * p)) + std::lgamma(n * (p - 1.0) / (g * p)) - std::lgamma(n / 2.0) -
           std::lgamma(n / g));
  return std::exp(log_s);
}

HatParams derive_hat_params(int n, double p, double a1, double b1, double a2, double b2) {
  if (std::fabs((b1 - a1) - (b2 - a2)) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "b1-a1=" << b1 - a1 << " differs from b2-a2=" << b2 - a2;
    fail(ErrorKind::GammaMismatch, os.str());
  }
  HatParams hp;
  hp.base = derive_params(n, p, a1, b1);
  hp.target = derive_params(n, p, a2, b2);
  hp.h = hp.base.weight_gap() / hp.target.weight_gap();
  return hp;
}

double stability_exponent(const CknParams& c, bool n_symmetric) {
  const bool weighted_diagonal = c.p != 2.0 && c.a > 0.0 && c.a == c.b;
  if (weighted_diagonal && !n_symmetric) return std::max(4.0, 2.0 * c.p);
  return std::max(2.0, c.p);
}

double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double unit_ball_volume(int n) { return sphere_area(n) / n; }

}  // namespace ckn
