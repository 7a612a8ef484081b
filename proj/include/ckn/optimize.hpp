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

#include <functional>
#include <vector>

namespace ckn::opt {

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead (GSL nmsimplex2) from `start` with initial step sizes `step`.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> start,
                          std::vector<double> step, double size_tol = 1e-10, int max_iter = 4000);

struct LineResult {
  double x = 0.0;
  double value = 0.0;
  bool converged = false;
};

/// Golden-section minimisation of f on [lo, hi] given an interior point with
/// f(mid) below both end values.
LineResult golden_section(const std::function<double(double)>& f, double lo, double mid, double hi,
                          double tol = 1e-10, int max_iter = 200);

/// Scan f on `count` evenly spaced points of [lo, hi], then refine the best
/// interior point by golden section. `bracketed` is false when the best scan
/// point sits on an end.
struct ScanResult {
  LineResult best;
  bool bracketed = true;
};
ScanResult scan_and_refine(const std::function<double(double)>& f, double lo, double hi, int count,
                           double tol = 1e-10);

}  // namespace ckn::opt
