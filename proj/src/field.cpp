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

#include "ckn/field.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "ckn/errors.hpp"

namespace ckn {

std::vector<double> Field::angular_weights() const {
  if (angles) {
    auto w = angles->weights();
    return {w.begin(), w.end()};
  }
  return {sphere_area(dim)};
}

namespace {

Field empty_like(std::shared_ptr<const RadialGrid> grid, int dim, std::shared_ptr<const AngularRule> angles) {
  Field f;
  f.dim = dim;
  f.grid = std::move(grid);
  f.angles = std::move(angles);
  const std::size_t n = f.size();
  f.value.assign(n, 0.0);
  f.grad_r.assign(n, 0.0);
  if (f.angles) f.grad_psi.assign(n, 0.0);
  return f;
}

// Derivative in t of samples on a nonuniform grid by three-point Lagrange
// stencils (centered inside, one-sided at the ends).
std::vector<double> t_derivative(std::span<const double> t, const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<double> d(n, 0.0);
  auto stencil = [&](std::size_t i0, std::size_t at) {
    const double x0 = t[i0], x1 = t[i0 + 1], x2 = t[i0 + 2], x = t[at];
    const double l0 = ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2));
    const double l2 = ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
    // The weights sum to zero; differencing against the middle sample keeps
    // constants exact.
    return l0 * (v[i0] - v[i0 + 1]) + l2 * (v[i0 + 2] - v[i0 + 1]);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t i0 = i == 0 ? 0 : (i + 1 == n ? n - 3 : i - 1);
    d[i] = stencil(i0, i);
  }
  return d;
}

// Fritsch-Carlson monotone cubic Hermite interpolant.
class MonotoneCubic {
 public:
  MonotoneCubic(std::span<const double> x, std::vector<double> y) : x_(x.begin(), x.end()), y_(std::move(y)) {
    const std::size_t n = x_.size();
    std::vector<double> delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    m_.assign(n, 0.0);
    m_[0] = delta[0];
    m_[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      m_[i] = (delta[i - 1] * delta[i] <= 0.0) ? 0.0 : 0.5 * (delta[i - 1] + delta[i]);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (delta[i] == 0.0) {
        m_[i] = 0.0;
        m_[i + 1] = 0.0;
        continue;
      }
      const double a = m_[i] / delta[i];
      const double b = m_[i + 1] / delta[i];
      const double s = a * a + b * b;
      if (s > 9.0) {
        const double tau = 3.0 / std::sqrt(s);
        m_[i] = tau * a * delta[i];
        m_[i + 1] = tau * b * delta[i];
      }
    }
  }

  double operator()(double x) const {
    if (x <= x_.front()) return y_.front();
    if (x >= x_.back()) return y_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    const double s = (x - x_[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
  }

  double linear(double x) const {
    if (x <= x_.front()) return y_.front();
    if (x >= x_.back()) return y_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double s = (x - x_[i]) / (x_[i + 1] - x_[i]);
    return (1 - s) * y_[i] + s * y_[i + 1];
  }

 private:
  std::vector<double> x_, y_, m_;
};

}  // namespace

Field sample_radial(std::shared_ptr<const RadialGrid> grid, int dim, std::shared_ptr<const RadialFunction> fn) {
  Field f = empty_like(grid, dim, nullptr);
  auto r = grid->nodes();
  for (std::size_t i = 0; i < f.rows(); ++i) {
    f.value[i] = fn->value(r[i]);
    f.grad_r[i] = fn->deriv(r[i]);
  }
  f.tag = fn->tag();
  f.source = std::move(fn);
  return f;
}

Field profile_from_values(std::shared_ptr<const RadialGrid> grid, int dim, std::vector<double> values) {
  if (values.size() != grid->size()) fail(ErrorKind::GridMismatch, "value count does not match the grid");
  Field f = empty_like(grid, dim, nullptr);
  const std::vector<double> dt = t_derivative(grid->t(), values);
  auto r = grid->nodes();
  for (std::size_t i = 0; i < f.rows(); ++i) f.grad_r[i] = dt[i] / r[i];
  f.value = std::move(values);
  f.tag = "samples";
  return f;
}

Field sample_axisym(std::shared_ptr<const RadialGrid> grid, std::shared_ptr<const AngularRule> angles,
                    const RadialFunction& fn, int cos_power) {
  Field f = empty_like(grid, angles->dim(), angles);
  auto r = grid->nodes();
  auto c = angles->cos_psi();
  auto s = angles->sin_psi();
  const std::size_t m = f.cols();
  for (std::size_t i = 0; i < f.rows(); ++i) {
    const double v = fn.value(r[i]);
    const double dv = fn.deriv(r[i]);
    for (std::size_t j = 0; j < m; ++j) {
      const double y = std::pow(c[j], cos_power);
      const double dy = cos_power == 0 ? 0.0 : -cos_power * std::pow(c[j], cos_power - 1) * s[j];
      f.value[i * m + j] = v * y;
      f.grad_r[i * m + j] = dv * y;
      f.grad_psi[i * m + j] = v * dy;
    }
  }
  f.tag = fn.tag() + "*cos^" + std::to_string(cos_power);
  return f;
}

Field sample_bubble(const CknParams& params, const Bubble& bubble, std::shared_ptr<const RadialGrid> grid,
                    std::shared_ptr<const AngularRule> angles) {
  if (!(bubble.scale > 0.0)) fail(ErrorKind::RegionViolation, "bubble scale must be positive");
  Bubble centered = bubble;
  centered.axial_shift = 0.0;
  Field radial = sample_radial(grid, params.n, std::make_shared<BubbleShape>(params, centered));
  if (bubble.axial_shift != 0.0) {
    if (!params.weights_vanish()) {
      fail(ErrorKind::TranslationForbidden, "axial shift of a weighted bubble " + params.describe());
    }
    return translate_axisym(radial, -bubble.axial_shift, params, angles);
  }
  if (angles) return embed_axisym(radial, angles);
  return radial;
}

Field translate_axisym(const Field& profile, double shift, const CknParams& params,
                       std::shared_ptr<const AngularRule> angles) {
  if (params.a != 0.0) {
    fail(ErrorKind::TranslationForbidden, "translations only act on the unweighted manifold " + params.describe());
  }
  if (!profile.is_radial()) fail(ErrorKind::UnsupportedField, "translate_axisym expects a radial profile");
  if (!angles) angles = AngularRule::make(profile.dim);

  std::function<double(double)> value, deriv;
  std::optional<MonotoneCubic> vi, di;
  if (profile.source) {
    value = [src = profile.source](double s) { return src->value(s); };
    deriv = [src = profile.source](double s) { return src->deriv(s); };
  } else {
    std::vector<double> dt(profile.rows());
    auto r = profile.grid->nodes();
    for (std::size_t i = 0; i < dt.size(); ++i) dt[i] = profile.grad_r[i] * r[i];
    vi.emplace(profile.grid->t(), profile.value);
    di.emplace(profile.grid->t(), std::move(dt));
    value = [&vi](double s) { return (*vi)(std::log(s)); };
    deriv = [&di](double s) { return (*di)(std::log(s)) / s; };
  }

  Field f = empty_like(profile.grid, profile.dim, angles);
  auto r = profile.grid->nodes();
  auto c = angles->cos_psi();
  auto sn = angles->sin_psi();
  const std::size_t m = f.cols();
  for (std::size_t i = 0; i < f.rows(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      // |x + shift e1| with x = r (cos psi, sin psi, 0, ...).
      const double along = r[i] * c[j] + shift;
      const double across = r[i] * sn[j];
      const double s = std::hypot(along, across);
      const std::size_t k = i * m + j;
      if (s == 0.0) {
        f.value[k] = value(std::numeric_limits<double>::min());
        continue;
      }
      const double dv = deriv(s);
      f.value[k] = value(s);
      f.grad_r[k] = dv * (r[i] + shift * c[j]) / s;
      f.grad_psi[k] = -dv * r[i] * shift * sn[j] / s;
    }
  }
  std::ostringstream os;
  os.precision(17);
  os << "translate(" << profile.tag << ",shift=" << shift << ")";
  f.tag = os.str();
  return f;
}

Field embed_axisym(const Field& profile, std::shared_ptr<const AngularRule> angles) {
  if (!profile.is_radial()) {
    if (!same_rule(*profile.angles, *angles)) fail(ErrorKind::GridMismatch, "angular rules differ");
    return profile;
  }
  if (angles->dim() != profile.dim) fail(ErrorKind::GridMismatch, "angular rule dimension differs");
  Field f = empty_like(profile.grid, profile.dim, angles);
  const std::size_t m = f.cols();
  for (std::size_t i = 0; i < f.rows(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      f.value[i * m + j] = profile.value[i];
      f.grad_r[i * m + j] = profile.grad_r[i];
    }
  }
  f.has_gradient = profile.has_gradient;
  f.tag = profile.tag;
  return f;
}

void require_compatible(const Field& u, const Field& v) {
  if (u.dim != v.dim) fail(ErrorKind::GridMismatch, "fields live in different dimensions");
  if (!same_grid(*u.grid, *v.grid)) {
    fail(ErrorKind::GridMismatch, "radial grids differ: " + u.grid->describe() + " vs " + v.grid->describe());
  }
  if (u.angles && v.angles && !same_rule(*u.angles, *v.angles)) {
    fail(ErrorKind::GridMismatch, "angular rules differ");
  }
}

Field combine(double alpha, const Field& u, double beta, const Field& v) {
  require_compatible(u, v);
  if (u.is_radial() != v.is_radial()) {
    return u.is_radial() ? combine(alpha, embed_axisym(u, v.angles), beta, v)
                         : combine(alpha, u, beta, embed_axisym(v, u.angles));
  }
  Field f = empty_like(u.grid, u.dim, u.angles);
  for (std::size_t k = 0; k < f.size(); ++k) {
    f.value[k] = alpha * u.value[k] + beta * v.value[k];
    f.grad_r[k] = alpha * u.grad_r[k] + beta * v.grad_r[k];
  }
  for (std::size_t k = 0; k < f.grad_psi.size(); ++k) f.grad_psi[k] = alpha * u.grad_psi[k] + beta * v.grad_psi[k];
  f.has_gradient = u.has_gradient && v.has_gradient;
  f.tag = "combination";
  return f;
}

Field scaled(const Field& u, double factor) {
  Field f = u;
  for (double& x : f.value) x *= factor;
  for (double& x : f.grad_r) x *= factor;
  for (double& x : f.grad_psi) x *= factor;
  f.source = nullptr;
  return f;
}

Field multiply_radial(const Field& u, const RadialFunction& fn) {
  Field f = u;
  f.source = nullptr;
  auto r = u.grid->nodes();
  const std::size_t m = u.cols();
  for (std::size_t i = 0; i < u.rows(); ++i) {
    const double c = fn.value(r[i]);
    const double dc = fn.deriv(r[i]);
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t k = i * m + j;
      f.grad_r[k] = u.grad_r[k] * c + u.value[k] * dc;
      f.value[k] = u.value[k] * c;
      if (!f.grad_psi.empty()) f.grad_psi[k] = u.grad_psi[k] * c;
    }
  }
  f.tag = "product(" + u.tag + "," + fn.tag() + ")";
  return f;
}

bool is_zero(const Field& u) {
  return std::all_of(u.value.begin(), u.value.end(), [](double x) { return x == 0.0; });
}

Field resample_radial(const Field& profile, std::shared_ptr<const RadialGrid> grid, double* error_estimate) {
  if (!profile.is_radial()) fail(ErrorKind::UnsupportedField, "resample_radial expects a radial profile");
  std::vector<double> dt(profile.rows());
  auto r0 = profile.grid->nodes();
  for (std::size_t i = 0; i < dt.size(); ++i) dt[i] = profile.grad_r[i] * r0[i];
  const MonotoneCubic vi(profile.grid->t(), profile.value);
  const MonotoneCubic di(profile.grid->t(), dt);
  Field f = empty_like(grid, profile.dim, nullptr);
  auto t = grid->t();
  auto r = grid->nodes();
  double err = 0.0;
  for (std::size_t i = 0; i < f.rows(); ++i) {
    f.value[i] = vi(t[i]);
    f.grad_r[i] = di(t[i]) / r[i];
    err = std::max(err, std::fabs(f.value[i] - vi.linear(t[i])));
  }
  if (error_estimate) *error_estimate = err;
  f.has_gradient = profile.has_gradient;
  f.tag = "resampled(" + profile.tag + ")";
  return f;
}

namespace {
constexpr const char* kMagic = "# ckn-field 1";
}

void write_field(std::ostream& os, const Field& u) {
  const auto old_precision = os.precision(17);
  os << kMagic << '\n';
  os << "# dim " << u.dim << '\n';
  os << "# grid " << u.grid->t_min() << ' ' << u.grid->t_max() << ' ' << u.grid->count() << ' '
     << u.grid->panel_order() << '\n';
  os << "# angles " << (u.angles ? u.angles->size() : 0) << '\n';
  os << "# gradient " << (u.has_gradient ? 1 : 0) << '\n';
  os << "# tag " << u.tag << '\n';
  os << "# columns r psi value grad_r grad_psi\n";
  auto r = u.grid->nodes();
  const std::size_t m = u.cols();
  for (std::size_t i = 0; i < u.rows(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t k = i * m + j;
      os << r[i] << ' ' << (u.angles ? u.angles->psi()[j] : 0.0) << ' ' << u.value[k] << ' ' << u.grad_r[k] << ' '
         << (u.angles ? u.grad_psi[k] : 0.0) << '\n';
    }
  }
  os.precision(old_precision);
}

Field read_field(std::istream& is) {
  std::string line;
  auto header = [&](const std::string& key) {
    if (!std::getline(is, line)) fail(ErrorKind::FormatError, "missing header '" + key + "'");
    const std::string prefix = "# " + key;
    if (line.rfind(prefix, 0) != 0) fail(ErrorKind::FormatError, "expected header '" + key + "', got '" + line + "'");
    return line.size() > prefix.size() ? line.substr(prefix.size() + 1) : std::string();
  };
  if (!std::getline(is, line) || line != kMagic) fail(ErrorKind::FormatError, "not a field snapshot");
  Field f;
  f.dim = std::stoi(header("dim"));
  std::istringstream gs(header("grid"));
  double t_min = 0, t_max = 0;
  int count = 0, order = 0;
  if (!(gs >> t_min >> t_max >> count >> order)) fail(ErrorKind::FormatError, "bad grid header");
  f.grid = RadialGrid::make(t_min, t_max, count, order);
  const int m = std::stoi(header("angles"));
  if (m > 0) f.angles = AngularRule::make(f.dim, m);
  f.has_gradient = std::stoi(header("gradient")) != 0;
  f.tag = header("tag");
  header("columns");
  const std::size_t cols = f.cols();
  const std::size_t n = f.size();
  f.value.resize(n);
  f.grad_r.resize(n);
  if (f.angles) f.grad_psi.resize(n);
  auto r = f.grid->nodes();
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::getline(is, line)) fail(ErrorKind::FormatError, "truncated field at row " + std::to_string(k));
    std::istringstream rs(line);
    double rr = 0, psi = 0, v = 0, gr = 0, gp = 0;
    if (!(rs >> rr >> psi >> v >> gr >> gp)) fail(ErrorKind::FormatError, "bad row " + std::to_string(k));
    if (rr != r[k / cols]) fail(ErrorKind::FormatError, "radius column disagrees with the grid at row " + std::to_string(k));
    f.value[k] = v;
    f.grad_r[k] = gr;
    if (f.angles) f.grad_psi[k] = gp;
  }
  return f;
}

}  // namespace ckn
