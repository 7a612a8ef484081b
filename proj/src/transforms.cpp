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


#include "ckn/transforms.hpp"

#include <cmath>
#include <sstream>

#include "ckn/errors.hpp"
#include "ckn/functionals.hpp"

namespace ckn {

std::string to_string(Direction direction) { return direction == Direction::forward ? "forward" : "inverse"; }

Field power_remap(const Field& u, double power, double scale) {
  if (!(power > 0.0) || !std::isfinite(power)) fail(ErrorKind::RegionViolation, "remap power must be positive");
  if (power == 1.0 && scale == 1.0) return u;
  Field v = u;
  v.source = nullptr;
  v.grid = u.grid->rescaled(power);
  auto r_old = u.grid->nodes();
  auto r_new = v.grid->nodes();
  const std::size_t m = u.cols();
  for (std::size_t i = 0; i < u.rows(); ++i) {
    // d/dr [u(r^power)] = power r^{power-1} u_r(r^power), r^power = r_old.
    const double chain = scale * power * r_old[i] / r_new[i];
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t k = i * m + j;
      v.value[k] = scale * u.value[k];
      v.grad_r[k] = chain * u.grad_r[k];
      if (!v.grad_psi.empty()) v.grad_psi[k] = scale * u.grad_psi[k];
    }
  }
  std::ostringstream os;
  os.precision(17);
  os << "remap(" << u.tag << ",power=" << power << ")";
  v.tag = os.str();
  return v;
}

CknParams horiuchi_target(const CknParams& params) {
  return derive_params(params.n, params.p, 0.0, params.b - params.a);
}

Field horiuchi_map(const Field& u, const CknParams& params, Direction direction) {
  horiuchi_target(params);  // the inverse lands on (p, 0, b - a), which must be admissible
  const double k = params.k;
  if (direction == Direction::forward) return power_remap(u, k, std::pow(k, 1.0 / params.q));
  return power_remap(u, 1.0 / k, std::pow(k, -1.0 / params.q));
}

Field hat_map(const Field& u, const HatParams& hp, Direction direction) {
  derive_hat_params(hp.base.n, hp.base.p, hp.base.a, hp.base.b, hp.target.a, hp.target.b);
  const double h = hp.h;
  const double q = hp.base.q;
  if (direction == Direction::forward) return power_remap(u, h, std::pow(h, 1.0 / q));
  return power_remap(u, 1.0 / h, std::pow(h, -1.0 / q));
}

namespace {

double relative_gap(double x, double y) {
  const double scale = std::max(std::fabs(x), std::fabs(y));
  return scale == 0.0 ? 0.0 : std::fabs(x - y) / scale;
}

}  // namespace

TransformReport transform_identity_check(const Field& u, const CknParams& params) {
  if (!(params.a > 0.0)) fail(ErrorKind::RegionViolation, "transform identities need a > 0 " + params.describe());
  const CknParams target = horiuchi_target(params);
  const Field bar = horiuchi_map(u, params, Direction::forward);
  const double k = params.k;
  const double factor = std::pow(k, 1.0 - params.p - params.p / params.q);

  TransformReport out;
  out.direction = Direction::forward;
  out.q_norm_residual = relative_gap(weighted_lq_norm(u, params), weighted_lq_norm(bar, target));
  out.lhs_grad = weighted_grad_pnorm(u, params);
  out.rhs_grad = factor * weighted_grad_pnorm(bar, target, k);
  out.grad_identity_residual = relative_gap(out.lhs_grad, out.rhs_grad);
  const double dropped = factor * weighted_grad_pnorm(bar, target, 1.0);
  out.drop_gap = out.lhs_grad == 0.0 ? 0.0 : (out.rhs_grad - dropped) / out.lhs_grad;
  return out;
}

}  // namespace ckn
