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


// Shared helpers for the unit tests: parameter generators and independent
// quadrature oracles built on adaptive GSL integration.

#pragma once

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "ckn/params.hpp"

namespace ckn::testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(20261017);
  return engine;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

/// Random admissible tuple, kept away from the region boundary.
inline CknParams random_params(bool weighted = true) {
  for (;;) {
    const int n = 3 + static_cast<int>(rng()() % 4);
    const double p = uniform(1.3, std::min(4.0, n - 0.6));
    const double a_max = (n - p) / p;
    const double a = weighted ? uniform(0.0, 0.8 * a_max) : 0.0;
    const double b = a + uniform(0.0, 0.8);
    try {
      return derive_params(n, p, a, b);
    } catch (...) {
    }
  }
}

/// Integral of f over (0, inf) by adaptive quadrature split at r = 1.
inline double integrate_half_line(const std::function<double(double)>& f, double rel = 1e-12) {
  gsl_set_error_handler_off();
  gsl_function fn;
  fn.function = [](double x, void* ctx) { return (*static_cast<const std::function<double(double)>*>(ctx))(x); };
  fn.params = const_cast<std::function<double(double)>*>(&f);
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(4000);
  double inner = 0, outer = 0, err = 0;
  gsl_integration_qags(&fn, 0.0, 1.0, 0.0, rel, 4000, ws, &inner, &err);
  gsl_integration_qagiu(&fn, 1.0, 0.0, rel, 4000, ws, &outer, &err);
  gsl_integration_workspace_free(ws);
  return inner + outer;
}

struct OracleEnergies {
  double grad = 0.0;  // radial integral, without the sphere factor
  double mass = 0.0;
};

/// Energies of (1 + r^sigma)^e written out from scratch.
inline OracleEnergies oracle_unit_bubble(const CknParams& c) {
  const double n = c.n, p = c.p, q = c.q;
  const double g = 1.0 + c.a - c.b;
  const double sigma = p * g * (n - p - p * c.a) / ((p - 1.0) * (n - p * g));
  const double e = 1.0 - n / (p * g);
  OracleEnergies out;
  out.grad = integrate_half_line([&](double r) {
    if (r == 0.0) return 0.0;
    const double d = std::fabs(e * sigma) * std::pow(r, sigma - 1.0) * std::pow(1.0 + std::pow(r, sigma), e - 1.0);
    return std::pow(d, p) * std::pow(r, n - 1.0 - p * c.a);
  });
  out.mass = integrate_half_line([&](double r) {
    if (r == 0.0) return 0.0;
    return std::pow(1.0 + std::pow(r, sigma), q * e) * std::pow(r, n - 1.0 - q * c.b);
  });
  return out;
}

inline double surface(int n) { return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n); }

/// Rayleigh quotient of the extremal by adaptive quadrature.
inline double oracle_rayleigh(const CknParams& c) {
  const OracleEnergies e = oracle_unit_bubble(c);
  const double area = surface(c.n);
  return std::pow(area * e.grad, 1.0 / c.p) / std::pow(area * e.mass, 1.0 / c.q);
}

inline double rel_diff(double x, double y) {
  const double s = std::max(std::fabs(x), std::fabs(y));
  return s == 0.0 ? 0.0 : std::fabs(x - y) / s;
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace ckn::testing
