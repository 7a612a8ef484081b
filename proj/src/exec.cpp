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

#include "ckn/exec.hpp"

#include <omp.h>

#include <atomic>

namespace ckn::exec {
namespace {
std::atomic<Policy> g_policy{Policy::parallel};
}

Policy default_policy() { return g_policy.load(std::memory_order_relaxed); }

void set_default_policy(Policy policy) { g_policy.store(policy, std::memory_order_relaxed); }

void set_threads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int max_threads() { return omp_get_max_threads(); }

double ordered_sum(const std::vector<double>& partial) {
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

}  // namespace ckn::exec
