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

// Row-parallel reductions over the radial axis of a sampled field.
//
// Every reduction computes one partial sum per radial row and folds the
// partials in row order afterwards, so the parallel kernels return the same
// bits as the serial reference for any thread count.

#include <cstddef>
#include <exception>
#include <vector>

namespace ckn::exec {

enum class Policy { serial, parallel };

/// Process-wide default used by the functionals; tests flip it to compare
/// the two code paths.
Policy default_policy();
void set_default_policy(Policy policy);

void set_threads(int threads);
int max_threads();

/// Fold of partial[i] in index order.
double ordered_sum(const std::vector<double>& partial);

/// sum_i row(i), i in [0, rows), row sums evaluated concurrently under
/// Policy::parallel and folded in order.
template <class RowFn>
double sum_rows(std::size_t rows, RowFn&& row, Policy policy = default_policy()) {
  std::vector<double> partial(rows);
  if (policy == Policy::parallel) {
    const long n = static_cast<long>(rows);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) partial[static_cast<std::size_t>(i)] = row(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < rows; ++i) partial[i] = row(i);
  }
  return ordered_sum(partial);
}

/// Calls body(i) for i in [0, count); iterations must be independent.
/// Runs body(i) for every index; the first exception (in index order) is
/// rethrown after the loop so none escapes a parallel region.
template <class Body>
void for_each_index(std::size_t count, Body&& body, Policy policy = default_policy()) {
  std::vector<std::exception_ptr> errors(count);
  auto guarded = [&](std::size_t i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (policy == Policy::parallel) {
    const long n = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) guarded(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < count; ++i) guarded(i);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace ckn::exec
