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

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ckn/grid.hpp"
#include "ckn/params.hpp"
#include "ckn/profiles.hpp"

namespace ckn {

/// A function on R^n sampled on a log-radial grid.
///
/// Radial profiles have no angular rule: one column, the angular integral is
/// the factor |S^{n-1}| and grad_psi is empty. Axisymmetric fields carry an
/// AngularRule in the polar angle psi measured from the e1 axis and store
/// values row-major as [radial node][angle]. grad_psi holds d/dpsi, so the
/// tangential gradient magnitude is |grad_psi| / r.
struct Field {
  int dim = 0;
  std::shared_ptr<const RadialGrid> grid;
  std::shared_ptr<const AngularRule> angles;
  std::vector<double> value;
  std::vector<double> grad_r;
  std::vector<double> grad_psi;
  bool has_gradient = true;
  /// Closed-form source of a radial profile, when known.
  std::shared_ptr<const RadialFunction> source;
  std::string tag;

  bool is_radial() const { return angles == nullptr; }
  std::size_t rows() const { return grid->size(); }
  std::size_t cols() const { return angles ? angles->size() : 1; }
  std::size_t size() const { return rows() * cols(); }
  double at(std::size_t i, std::size_t j = 0) const { return value[i * cols() + j]; }
  /// Angular weights of one row; {|S^{n-1}|} for radial profiles.
  std::vector<double> angular_weights() const;
};

/// Samples `fn` and its analytic derivative at every node.
Field sample_radial(std::shared_ptr<const RadialGrid> grid, int dim, std::shared_ptr<const RadialFunction> fn);

/// Radial profile from raw values; the derivative is taken by centered
/// three-point differences in t.
Field profile_from_values(std::shared_ptr<const RadialGrid> grid, int dim, std::vector<double> values);

/// f(r) cos^m(psi) on an axisymmetric grid.
Field sample_axisym(std::shared_ptr<const RadialGrid> grid, std::shared_ptr<const AngularRule> angles,
                    const RadialFunction& fn, int cos_power = 0);

/// A(1 + B r^sigma)^{1 - n/(p gamma)} with B = scale^sigma. A nonzero axial
/// shift needs `angles` and produces V(|x - shift e1|).
Field sample_bubble(const CknParams& params, const Bubble& bubble, std::shared_ptr<const RadialGrid> grid,
                    std::shared_ptr<const AngularRule> angles = nullptr);

/// u(x + shift e1) for a radial profile u. Only the unweighted (a = 0)
/// manifold is translation invariant; other tuples raise TranslationForbidden.
Field translate_axisym(const Field& profile, double shift, const CknParams& params,
                       std::shared_ptr<const AngularRule> angles = nullptr);

/// Radial profile copied onto every angle of `angles`.
Field embed_axisym(const Field& profile, std::shared_ptr<const AngularRule> angles);

/// alpha u + beta v; grids must agree (GridMismatch). A radial operand is
/// embedded when the other one is axisymmetric.
Field combine(double alpha, const Field& u, double beta, const Field& v);
Field scaled(const Field& u, double factor);

/// Pointwise product with a radial function (used for cutoffs).
Field multiply_radial(const Field& u, const RadialFunction& fn);

bool is_zero(const Field& u);

void require_compatible(const Field& u, const Field& v);

/// Monotone (Fritsch-Carlson) cubic interpolation of a radial profile in t,
/// evaluated on `grid`; nodes outside the source range take the end values.
/// `error_estimate` receives the largest gap between cubic and linear
/// interpolation, a proxy for the interpolation error.
Field resample_radial(const Field& profile, std::shared_ptr<const RadialGrid> grid,
                      double* error_estimate = nullptr);

/// Columnar text snapshot: header with grid metadata, then one row per node
/// with r, psi, value, grad_r, grad_psi. Values are written with 17
/// significant digits so a read reproduces every double.
void write_field(std::ostream& os, const Field& u);
Field read_field(std::istream& is);

}  // namespace ckn
