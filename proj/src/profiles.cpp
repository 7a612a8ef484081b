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

#include "ckn/profiles.hpp"

#include <cmath>
#include <sstream>

#include "ckn/errors.hpp"

namespace ckn {
namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// int_0^inf r^{alpha-1} (1 + r^sigma)^{-beta} dr = B(alpha/sigma, beta - alpha/sigma) / sigma.
double log_power_beta(double alpha, double beta, double sigma) {
  const double x = alpha / sigma;
  const double y = beta - x;
  if (!(x > 0.0) || !(y > 0.0)) fail(ErrorKind::RegionViolation, "divergent bubble integral");
  return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y) - std::log(sigma);
}

}  // namespace

BubbleShape::BubbleShape(const CknParams& params, const Bubble& bubble)
    : amplitude_(bubble.amplitude),
      log_scale_(std::log(bubble.scale)),
      sigma_(params.sigma()),
      exponent_(params.profile_exponent()) {
  if (!(bubble.scale > 0.0)) fail(ErrorKind::RegionViolation, "bubble scale must be positive");
}

double BubbleShape::value(double r) const {
  if (r <= 0.0) return amplitude_;
  const double z = std::exp(sigma_ * (log_scale_ + std::log(r)));
  return amplitude_ * std::exp(exponent_ * std::log1p(z));
}

double BubbleShape::deriv(double r) const {
  if (r <= 0.0 || amplitude_ == 0.0) return 0.0;
  const double lz = sigma_ * (log_scale_ + std::log(r));
  const double z = std::exp(lz);
  return amplitude_ * exponent_ * sigma_ * std::exp(lz - std::log(r) + (exponent_ - 1.0) * std::log1p(z));
}

double BubbleShape::second(double r) const {
  if (r <= 0.0 || amplitude_ == 0.0) return 0.0;
  const double lz = sigma_ * (log_scale_ + std::log(r));
  const double z = std::exp(lz);
  const double base =
      amplitude_ * exponent_ * sigma_ * std::exp(lz - 2.0 * std::log(r) + (exponent_ - 2.0) * std::log1p(z));
  return base * ((sigma_ - 1.0) * (1.0 + z) + (exponent_ - 1.0) * sigma_ * z);
}

std::string BubbleShape::tag() const {
  return "bubble(A=" + fmt(amplitude_) + ",log_scale=" + fmt(log_scale_) + ",sigma=" + fmt(sigma_) +
         ",exponent=" + fmt(exponent_) + ")";
}

DilationTangent::DilationTangent(const CknParams& params, const Bubble& bubble)
    : shape_(params, bubble), weight_(params.dilation_weight()) {}

double DilationTangent::value(double r) const { return weight_ * shape_.value(r) + r * shape_.deriv(r); }

double DilationTangent::deriv(double r) const {
  return (weight_ + 1.0) * shape_.deriv(r) + r * shape_.second(r);
}

double DilationTangent::second(double r) const {
  // Third derivative of the bubble by a centered difference in log r; only
  // consumed by finite-difference diagnostics.
  const double h = 1e-4;
  const double up = r * std::exp(h);
  const double dn = r * std::exp(-h);
  return (deriv(up) - deriv(dn)) / (up - dn);
}

std::string DilationTangent::tag() const { return "dilation(" + shape_.tag() + ")"; }

LogGaussianBump::LogGaussianBump(double center, double width) : center_(center), width_(width) {
  if (!(width > 0.0)) fail(ErrorKind::RegionViolation, "bump width must be positive");
}

double LogGaussianBump::value(double r) const {
  if (r <= 0.0) return 0.0;
  const double s = (std::log(r) - center_) / width_;
  return std::exp(-0.5 * s * s);
}

double LogGaussianBump::deriv(double r) const {
  if (r <= 0.0) return 0.0;
  const double s = (std::log(r) - center_) / width_;
  return -std::exp(-0.5 * s * s) * s / (width_ * r);
}

double LogGaussianBump::second(double r) const {
  if (r <= 0.0) return 0.0;
  const double s = (std::log(r) - center_) / width_;
  const double g = std::exp(-0.5 * s * s);
  // d/dr [-g s / (w r)] with ds/dr = 1/(w r).
  return g / (width_ * r * r) * (s * s / width_ - 1.0 / width_ + s);
}

std::string LogGaussianBump::tag() const { return "log_gauss(center=" + fmt(center_) + ",width=" + fmt(width_) + ")"; }

namespace {

// psi(x) = exp(-1/x) for x > 0, the standard C-infinity building block.
double bump_core(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
double bump_core_d1(double x) { return x > 0.0 ? std::exp(-1.0 / x) / (x * x) : 0.0; }
double bump_core_d2(double x) {
  return x > 0.0 ? std::exp(-1.0 / x) * (1.0 - 2.0 * x) / (x * x * x * x) : 0.0;
}

}  // namespace

SmoothCutoff::SmoothCutoff(double inner, double outer) : inner_(inner), outer_(outer) {
  if (!(0.0 < inner && inner < outer)) fail(ErrorKind::RegionViolation, "cutoff needs 0 < inner < outer");
}

double SmoothCutoff::value(double r) const {
  if (r <= inner_) return 1.0;
  if (r >= outer_) return 0.0;
  const double s = (outer_ - r) / (outer_ - inner_);
  return bump_core(s) / (bump_core(s) + bump_core(1.0 - s));
}

double SmoothCutoff::deriv(double r) const {
  if (r <= inner_ || r >= outer_) return 0.0;
  const double len = outer_ - inner_;
  const double s = (outer_ - r) / len;
  const double f = bump_core(s);
  const double g = bump_core(1.0 - s);
  const double df = bump_core_d1(s);
  const double dg = -bump_core_d1(1.0 - s);
  const double dh_ds = (df * (f + g) - f * (df + dg)) / ((f + g) * (f + g));
  return -dh_ds / len;
}

double SmoothCutoff::second(double r) const {
  if (r <= inner_ || r >= outer_) return 0.0;
  const double len = outer_ - inner_;
  const double s = (outer_ - r) / len;
  const double f = bump_core(s);
  const double g = bump_core(1.0 - s);
  const double df = bump_core_d1(s);
  const double dg = -bump_core_d1(1.0 - s);
  const double d2f = bump_core_d2(s);
  const double d2g = bump_core_d2(1.0 - s);
  const double den = f + g;
  const double dden = df + dg;
  const double d2den = d2f + d2g;
  // h = f / den.
  const double d2h = (d2f * den - f * d2den) / (den * den) - 2.0 * dden * (df * den - f * dden) / (den * den * den);
  return d2h / (len * len);
}

std::string SmoothCutoff::tag() const { return "cutoff(inner=" + fmt(inner_) + ",outer=" + fmt(outer_) + ")"; }

ProductFunction::ProductFunction(std::shared_ptr<const RadialFunction> f, std::shared_ptr<const RadialFunction> g)
    : f_(std::move(f)), g_(std::move(g)) {}

double ProductFunction::value(double r) const { return f_->value(r) * g_->value(r); }

double ProductFunction::deriv(double r) const {
  return f_->deriv(r) * g_->value(r) + f_->value(r) * g_->deriv(r);
}

double ProductFunction::second(double r) const {
  return f_->second(r) * g_->value(r) + 2.0 * f_->deriv(r) * g_->deriv(r) + f_->value(r) * g_->second(r);
}

std::string ProductFunction::tag() const { return "product(" + f_->tag() + "," + g_->tag() + ")"; }

BubbleEnergies unit_bubble_energies(const CknParams& c) {
  const double n = c.n;
  const double p = c.p;
  const double sigma = c.sigma();
  const double e = c.profile_exponent();
  const double area = sphere_area(c.n);
  BubbleEnergies out;
  // |V'|^p = |e sigma|^p r^{p(sigma-1)} (1 + r^sigma)^{p(e-1)}.
  const double log_grad = p * std::log(std::fabs(e * sigma)) +
                          log_power_beta(p * (sigma - 1.0) + n - p * c.a, p * (1.0 - e), sigma);
  const double log_mass = log_power_beta(n - c.q * c.b, -c.q * e, sigma);
  out.grad = area * std::exp(log_grad);
  out.mass = area * std::exp(log_mass);
  return out;
}

}  // namespace ckn
