#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "starkg/errors.hpp"

namespace starkg {

using cplx = std::complex<double>;

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  int order = 0;
  std::vector<double> node;
  std::vector<double> weight;
};

/// Returns the n-point Gauss-Legendre rule, computed on first use via Newton
/// iteration on the Legendre recurrence and cached for the process lifetime.
const GaussRule& gauss_legendre(int order);

/// Composite-adaptive integration controls.  `breakpoints` are positions the
/// subdivision is forced to respect (kinks, support edges, the diagonal of a
/// kernel, ...); points outside (lo, hi) are ignored.
struct QuadratureSpec {
  int order = 15;
  std::vector<double> breakpoints;
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  int max_subdivisions = 4000;
};

struct IntegrationResult {
  cplx value{0.0, 0.0};
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

/// Globally adaptive Gauss quadrature of f over [lo, hi]: the panel with the
/// largest embedded error estimate (fine rule vs. half-order rule) is bisected
/// until the summed estimate meets max(abs_tol, rel_tol * |value|).  Fully
/// deterministic; throws ToleranceNotMet when max_subdivisions is exhausted
/// or no further progress is possible.
IntegrationResult integrate(const std::function<cplx(double)>& f, double lo,
                            double hi, const QuadratureSpec& spec = {});

/// Single Gauss panel of f over [lo, hi] (no error estimate).
cplx gauss_panel(const std::function<cplx(double)>& f, double lo, double hi,
                 const GaussRule& rule);

/// Composite Simpson for uniformly sampled values (spacing h).  An odd number
/// of intervals is handled by a 3/8 closing rule, so the result is O(h^4)
/// accurate for any sample count >= 4.
cplx simpson(const std::vector<cplx>& samples, double h);
double simpson(const std::vector<double>& samples, double h);

}  // namespace starkg
