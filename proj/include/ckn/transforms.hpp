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

#include "ckn/field.hpp"
#include "ckn/params.hpp"

namespace ckn {

enum class Direction { forward, inverse };

std::string to_string(Direction direction);

/// v(r theta) = scale * u(r^power theta), realised by moving every sample to
/// the node exp(t / power) of a rescaled grid. No interpolation is involved.
Field power_remap(const Field& u, double power, double scale);

/// Parameters (p, 0, b - a) of the unweighted problem reached by the k-map.
CknParams horiuchi_target(const CknParams& params);

/// Forward: k^{1/q} u(r^k theta). Inverse undoes it exactly.
Field horiuchi_map(const Field& u, const CknParams& params, Direction direction);

/// Forward: h^{1/q} u(r^h theta), from the target (a2) space to the base (a1)
/// space. Inverse undoes it exactly.
Field hat_map(const Field& u, const HatParams& hp, Direction direction);

struct TransformReport {
  double q_norm_residual = 0.0;
  /// Relative mismatch of the gradient change of variables with the
  /// k-modified functional.
  double grad_identity_residual = 0.0;
  /// Relative gap k^{1-p-p/q} (modified - plain) / lhs, nonnegative when the
  /// angular factor k^2 is dropped to 1.
  double drop_gap = 0.0;
  double lhs_grad = 0.0;
  double rhs_grad = 0.0;
  Direction direction = Direction::forward;
};

TransformReport transform_identity_check(const Field& u, const CknParams& params);

}  // namespace ckn
