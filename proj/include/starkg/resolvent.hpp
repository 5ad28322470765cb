#pragma once

#include <vector>

#include "starkg/netfunc.hpp"
#include "starkg/network.hpp"
#include "starkg/spectral_kernel.hpp"

namespace starkg {

struct KernelQuery {
  NetworkPoint x;
  NetworkPoint x_prime;
  cplx lambda{0.0, 1.0};
};

/// Integral kernel of (lambda I - A)^{-1} at spectral parameter lambda with
/// Im(lambda) != 0, extended to real lambda by its boundary value from the
/// lower half-plane.  For x, x' on the same branch j with x' > x it factors
/// as (1/w) * [trig part at x] * [exponential at x']; in every other
/// configuration the exponential sits at x and the full eigenfunction
/// attached to the branch of x at x'.  Symmetric in (x, x').
cplx kernel_K(const KernelQuery& q, const StarNetwork& net);

/// Same kernel with an explicitly chosen partner family index l != j for the
/// exponential factor; the value does not depend on the choice, which is
/// exactly what the regression tests pin down.
cplx kernel_K_partner(const KernelQuery& q, int partner, const StarNetwork& net);

/// Uniform output grid {0, h, 2h, ..., L} shared by all branches.
struct OutputGrid {
  double L = 10.0;
  double h = 1e-2;
};

/// (lambda I - A)^{-1} f sampled on `out`, for compactly supported f.  The
/// quadrature never integrates across the kernel diagonal: the branch of x is
/// split into cumulative pieces below and above x.
NetworkFunction apply_resolvent(const NetworkFunction& f, cplx lambda,
                                const StarNetwork& net, const OutputGrid& out);

struct AbsorptionRow {
  double eps = 0.0;
  double max_defect = 0.0;      // sup over queries of |K(lambda - i eps) - K(lambda)|
  double envelope_margin = 0.0; // max |K| / (N exp(gamma (x + x'))), should stay <= 1
};

struct AbsorptionReport {
  std::vector<AbsorptionRow> rows;
  double final_defect = 0.0;
  bool defects_monotone = false;
  bool envelope_ok = false;
  EnvelopeBounds envelope;
};

/// Quantifies the convergence K(lambda - i eps) -> K(lambda) as eps -> 0+ on
/// a fixed sample of point pairs, and checks the uniform kernel envelope with
/// delta = max(eps_sequence).
AbsorptionReport check_limiting_absorption(double lambda,
                                           std::vector<double> eps_sequence,
                                           const std::vector<KernelQuery>& sample,
                                           const StarNetwork& net);

}  // namespace starkg
