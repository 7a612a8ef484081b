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


#include "ckn/optimize.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_min.h>
#include <gsl/gsl_multimin.h>

#include <cmath>
#include <limits>

#include "ckn/errors.hpp"

namespace ckn::opt {
namespace {

struct GslSilencer {
  GslSilencer() { gsl_set_error_handler_off(); }
};
const GslSilencer silencer;

using MultiFn = std::function<double(const std::vector<double>&)>;
using LineFn = std::function<double(double)>;

double multi_trampoline(const gsl_vector* v, void* params) {
  const auto& f = *static_cast<const MultiFn*>(params);
  std::vector<double> x(v->size);
  for (std::size_t i = 0; i < v->size; ++i) x[i] = gsl_vector_get(v, i);
  const double y = f(x);
  return std::isfinite(y) ? y : std::numeric_limits<double>::max();
}

double line_trampoline(double x, void* params) {
  const double y = (*static_cast<const LineFn*>(params))(x);
  return std::isfinite(y) ? y : std::numeric_limits<double>::max();
}

}  // namespace

SimplexResult nelder_mead(const MultiFn& f, std::vector<double> start, std::vector<double> step, double size_tol,
                          int max_iter) {
  const std::size_t dim = start.size();
  if (dim == 0 || step.size() != dim) fail(ErrorKind::OptimizerStall, "simplex needs matching start and step");
  gsl_multimin_function fn{&multi_trampoline, dim, const_cast<MultiFn*>(&f)};
  gsl_vector* x = gsl_vector_alloc(dim);
  gsl_vector* s = gsl_vector_alloc(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    gsl_vector_set(x, i, start[i]);
    gsl_vector_set(s, i, step[i]);
  }
  gsl_multimin_fminimizer* m = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim);
  gsl_multimin_fminimizer_set(m, &fn, x, s);
  SimplexResult out;
  int status = GSL_CONTINUE;
  while (status == GSL_CONTINUE && out.iterations < max_iter) {
    ++out.iterations;
    if (gsl_multimin_fminimizer_iterate(m) != GSL_SUCCESS) break;
    status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(m), size_tol);
  }
  out.converged = status == GSL_SUCCESS;
  out.x.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) out.x[i] = gsl_vector_get(m->x, i);
  out.value = m->fval;
  gsl_multimin_fminimizer_free(m);
  gsl_vector_free(s);
  gsl_vector_free(x);
  return out;
}

LineResult golden_section(const LineFn& f, double lo, double mid, double hi, double tol, int max_iter) {
  gsl_function fn{&line_trampoline, const_cast<LineFn*>(&f)};
  gsl_min_fminimizer* m = gsl_min_fminimizer_alloc(gsl_min_fminimizer_goldensection);
  LineResult out;
  if (gsl_min_fminimizer_set(m, &fn, mid, lo, hi) != GSL_SUCCESS) {
    gsl_min_fminimizer_free(m);
    out.x = mid;
    out.value = f(mid);
    return out;
  }
  int status = GSL_CONTINUE;
  for (int it = 0; it < max_iter && status == GSL_CONTINUE; ++it) {
    if (gsl_min_fminimizer_iterate(m) != GSL_SUCCESS) break;
    status = gsl_min_test_interval(gsl_min_fminimizer_x_lower(m), gsl_min_fminimizer_x_upper(m), tol, 0.0);
  }
  out.converged = status == GSL_SUCCESS;
  out.x = gsl_min_fminimizer_x_minimum(m);
  out.value = gsl_min_fminimizer_f_minimum(m);
  gsl_min_fminimizer_free(m);
  return out;
}

ScanResult scan_and_refine(const LineFn& f, double lo, double hi, int count, double tol) {
  if (count < 3 || !(lo < hi)) fail(ErrorKind::OptimizerStall, "scan needs at least 3 points on a proper interval");
  std::vector<double> xs(count), ys(count);
  int best = 0;
  for (int i = 0; i < count; ++i) {
    xs[i] = lo + (hi - lo) * i / (count - 1);
    ys[i] = f(xs[i]);
    if (ys[i] < ys[best]) best = i;
  }
  ScanResult out;
  if (best == 0 || best == count - 1) {
    out.bracketed = false;
    out.best = {xs[best], ys[best], false};
    return out;
  }
  out.best = golden_section(f, xs[best - 1], xs[best], xs[best + 1], tol);
  if (ys[best] < out.best.value) out.best = {xs[best], ys[best], out.best.converged};
  return out;
}

}  // namespace ckn::opt
