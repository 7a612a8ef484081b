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

#include <memory>
#include <string>

#include "ckn/params.hpp"

namespace ckn {

/// Closed-form radial function r -> f(r) with first and second derivatives.
class RadialFunction {
 public:
  virtual ~RadialFunction() = default;
  virtual double value(double r) const = 0;
  virtual double deriv(double r) const = 0;
  virtual double second(double r) const = 0;
  virtual std::string tag() const = 0;
};

/// Member of the extremal family:
///   amplitude * (1 + (scale * |x - axial_shift e1|)^sigma)^(1 - n/(p gamma)),
/// so the (A, B) parameterization has B = scale^sigma.
struct Bubble {
  double amplitude = 0.0;
  double scale = 1.0;
  double axial_shift = 0.0;
};

class BubbleShape final : public RadialFunction {
 public:
  BubbleShape(const CknParams& params, const Bubble& bubble);

  double value(double r) const override;
  double deriv(double r) const override;
  double second(double r) const override;
  std::string tag() const override;

 private:
  double amplitude_, log_scale_, sigma_, exponent_;
};

/// d/ds|_{s=1} s^c V(s x) = c V + r V' with c = (n - p - p a) / p.
class DilationTangent final : public RadialFunction {
 public:
  DilationTangent(const CknParams& params, const Bubble& bubble);

  double value(double r) const override;
  double deriv(double r) const override;
  double second(double r) const override;
  std::string tag() const override;

 private:
  BubbleShape shape_;
  double weight_;
};

/// Gaussian in log r: exp(-(log r - center)^2 / (2 width^2)).
class LogGaussianBump final : public RadialFunction {
 public:
  LogGaussianBump(double center, double width);

  double value(double r) const override;
  double deriv(double r) const override;
  double second(double r) const override;
  std::string tag() const override;

 private:
  double center_, width_;
};

/// Smooth cutoff: 1 for r <= inner, 0 for r >= outer, C-infinity in between.
class SmoothCutoff final : public RadialFunction {
 public:
  SmoothCutoff(double inner, double outer);

  double value(double r) const override;
  double deriv(double r) const override;
  double second(double r) const override;
  std::string tag() const override;

 private:
  double inner_, outer_;
};

/// f(r) * g(r).
class ProductFunction final : public RadialFunction {
 public:
  ProductFunction(std::shared_ptr<const RadialFunction> f, std::shared_ptr<const RadialFunction> g);

  double value(double r) const override;
  double deriv(double r) const override;
  double second(double r) const override;
  std::string tag() const override;

 private:
  std::shared_ptr<const RadialFunction> f_, g_;
};

/// Integrals of the amplitude-one, scale-one bubble over R^n:
/// grad = int |x|^{-pa} |grad V|^p, mass = int |x|^{-qb} |V|^q, via Beta functions.
struct BubbleEnergies {
  double grad = 0.0;
  double mass = 0.0;
};

BubbleEnergies unit_bubble_energies(const CknParams& params);

}  // namespace ckn
