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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ckn/params.hpp"

namespace ckn {

/// Composite Gauss-Legendre rule in t = log r on [t_min, t_max].
///
/// Nodes are r_i = exp(t_i). weights() integrates g over (0, inf) in r, i.e.
/// sum_i weights()[i] g(r_i) ~ int g(r) dr, with the Jacobian e^t folded in.
/// Integrands carrying a large radial power should use power_weights() which
/// combines the power with the Jacobian in the exponent.
class RadialGrid : public std::enable_shared_from_this<RadialGrid> {
 public:
  static constexpr int kDefaultPanelOrder = 8;

  /// Throws BadGridSpec unless t_min < t_max, count >= 16 and count is a
  /// multiple of panel_order.
  static std::shared_ptr<const RadialGrid> make(double t_min, double t_max, int count,
                                                int panel_order = kDefaultPanelOrder);

  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  int count() const { return static_cast<int>(t_.size()); }
  int panel_order() const { return panel_order_; }
  std::size_t size() const { return t_.size(); }

  std::span<const double> t() const { return t_; }
  std::span<const double> nodes() const { return r_; }
  std::span<const double> weights() const { return w_; }
  /// Gauss weights in t (without the Jacobian).
  std::span<const double> t_weights() const { return tw_; }

  /// w_i with sum_i w_i g(r_i) ~ int g(r) r^{power-1} dr.
  std::vector<double> power_weights(double power) const;

  /// Number of nodes with t_i below the panel edge at `t`, if `t` is a panel
  /// edge (or one of the end points) to within 1e-12.
  std::optional<std::size_t> nodes_below_edge(double t) const;

  /// Same rule on [t_min/scale, t_max/scale]. Rescaling a rescaled grid back
  /// by the reciprocal factor returns the original grid object.
  std::shared_ptr<const RadialGrid> rescaled(double scale) const;

  std::string describe() const;

 private:
  RadialGrid() = default;

  double t_min_ = 0.0;
  double t_max_ = 0.0;
  int panel_order_ = kDefaultPanelOrder;
  std::vector<double> t_, tw_, r_, w_;
  std::shared_ptr<const RadialGrid> parent_;
  double parent_scale_ = 1.0;
};

bool same_grid(const RadialGrid& x, const RadialGrid& y);

/// Grid whose truncation error at both ends is below ~1e-15 for the bubble
/// integrals of `params` (bounded by |t| <= t_cap), with panels no wider than
/// `panel_width`.
std::shared_ptr<const RadialGrid> suggest_grid(const CknParams& params, double panel_width = 0.25,
                                               double t_cap = 150.0);

/// Relative size of the bubble energy left outside the suggest_grid window,
/// e^{-rate * window} at the worse end. Near the region boundary the tails
/// outrun the window double precision can represent (|t| <= 690 / n).
double truncation_estimate(const CknParams& params, double t_cap = 150.0);

/// Gauss rule for the polar angle psi in [0, pi] against sin^{n-2}(psi) dpsi,
/// with the factor |S^{n-2}| folded into the weights so that the weights sum
/// to |S^{n-1}|.
class AngularRule {
 public:
  static constexpr int kDefaultCount = 128;

  static std::shared_ptr<const AngularRule> make(int dim, int count = kDefaultCount);

  int dim() const { return dim_; }
  std::size_t size() const { return psi_.size(); }
  std::span<const double> psi() const { return psi_; }
  std::span<const double> cos_psi() const { return cos_; }
  std::span<const double> sin_psi() const { return sin_; }
  std::span<const double> weights() const { return w_; }

 private:
  AngularRule() = default;

  int dim_ = 0;
  std::vector<double> psi_, cos_, sin_, w_;
};

bool same_rule(const AngularRule& x, const AngularRule& y);

}  // namespace ckn
