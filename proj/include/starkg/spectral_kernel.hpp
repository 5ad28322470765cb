#pragma once

#include <complex>

#include "starkg/netfunc.hpp"
#include "starkg/network.hpp"

namespace starkg {

/// Square root with the branch cut along the positive real axis rotated so
/// the argument is taken in [-pi, pi): sqrt(r e^{i phi}) = sqrt(r) e^{i phi/2}
/// with phi in [-pi, pi).  In particular sqrt(-r) = -i sqrt(r) for r > 0, the
/// map is continuous from the closed lower half-plane, and positive reals map
/// to positive reals.
cplx conv_sqrt(cplx z);

/// Branch wavenumber xi_k(lambda) = conv_sqrt((lambda - a_k) / c_k).
/// Oscillatory (positive real) for real lambda > a_k; equal to -i * rate with
/// rate = sqrt((a_k - lambda) / c_k) > 0 for real lambda < a_k.
cplx xi(cplx lambda, int k, const StarNetwork& net);

/// Positive decay rate of the evanescent branch k at real lambda < a_k.
double xi_decay_rate(double lambda, int k, const StarNetwork& net);

/// Vertex reflection coefficient on the distinguished branch j:
/// s_j(lambda) = -(sum_{l != j} c_l xi_l) / (c_j xi_j).
/// Throws ThresholdSingularity at lambda = a_j where xi_j vanishes.
cplx s_coeff(cplx lambda, int j, const StarNetwork& net);

/// w(lambda) = sign * i * sum_k c_k xi_k(lambda), the Wronskian-type
/// normalizer of the resolvent kernel; sign is +1 in the upper half-plane
/// and -1 in the closed lower half-plane.
cplx wronskian_w(cplx lambda, int sign, const StarNetwork& net);

/// Half-plane convention: +1 iff Im(lambda) > 0, else -1.
int halfplane_sign(cplx lambda);

/// Generalized eigenfunction family.  F^{sign,j} solves the branch ODEs with
/// eigenvalue lambda and both vertex conditions: on the distinguished branch
/// j it equals cos(xi_j x) + sign * i * s_j sin(xi_j x), on every other
/// branch k it is the pure exponential exp(sign * i * xi_k x).
struct EigenfunctionSpec {
  cplx lambda{0.0, 0.0};
  int j = 1;
  int sign = -1;  // +1 or -1
};

cplx eval_F(const EigenfunctionSpec& spec, const NetworkPoint& pt,
            const StarNetwork& net);

/// x-derivative of order 0, 1 or 2 of the same family.
cplx eval_F_dx(const EigenfunctionSpec& spec, const NetworkPoint& pt,
               const StarNetwork& net, int order);

/// Wraps eval_F into a NetworkFunction with exact derivative rules.  The
/// family is bounded but not square integrable, so the wrapper carries an
/// artificial support radius used only to truncate test integrals.
NetworkFunction make_eigenfunction(const EigenfunctionSpec& spec,
                                   const StarNetwork& net,
                                   double support_radius);

/// Uniform bound on max_j |s_j(lambda - i eps)| over 0 <= eps <= delta for
/// real lambda >= a_1 off the thresholds (+inf on a threshold).
double bound_M(double lambda, double delta, const StarNetwork& net);

struct EnvelopeBounds {
  double N = 0.0;      // prefactor of the kernel envelope N * exp(gamma (x + x'))
  double gamma = 0.0;  // growth rate
};

/// Envelope constants controlling |K(x, x', lambda - i eps)| uniformly for
/// 0 <= eps <= delta; finite away from thresholds.
EnvelopeBounds bound_N_gamma(double lambda, double delta, const StarNetwork& net);

}  // namespace starkg
