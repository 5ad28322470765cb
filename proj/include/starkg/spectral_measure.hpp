#pragma once

#include <map>
#include <string>
#include <vector>

#include "starkg/network.hpp"
#include "starkg/spectral_kernel.hpp"

namespace starkg {

/// Normalization of the spectral density.  Fixed a priori by Stone's formula;
/// equivalently, the two-branch network with equal coefficients is the free
/// line, where the transform must reduce to the unitary Fourier transform.
inline constexpr double kSpectralNormalization =
    0.31830988618379067154;  // 1/pi

/// Diagonal spectral weight sigma_l(lambda) = kappa * c_l xi_l / |w|^2 for
/// lambda > a_l and 0 below the branch threshold.
double sigma_weight(double lambda, int l, const StarNetwork& net);

/// Real symmetric n x n weight matrix of the diagonalized spectral measure.
struct WeightMatrix {
  double lambda = 0.0;
  int n = 0;
  std::vector<double> q;       // row-major
  double imag_residual = 0.0;  // imaginary leftovers of the complex assembly

  double& at(int l, int m) {
    return q[static_cast<std::size_t>(l - 1) * static_cast<std::size_t>(n) +
             static_cast<std::size_t>(m - 1)];
  }
  double at(int l, int m) const {
    return q[static_cast<std::size_t>(l - 1) * static_cast<std::size_t>(n) +
             static_cast<std::size_t>(m - 1)];
  }
};

/// Diagonal route: q_{lm} = delta_{lm} sigma_l(lambda).
WeightMatrix weights_diagonal(double lambda, const StarNetwork& net);

/// Ingredients of the sampling-matrix route: the eigenfunction family is
/// evaluated at the vertex and at one interior point x_j per branch j >= 2,
/// giving the columns d_j of D; C is the diagonal matrix carrying the value
/// of family j+1 at the j-th sampling point.
struct SamplingMatrices {
  double lambda = 0.0;
  std::vector<double> x_samples;   // x_2 .. x_n
  std::vector<cplx> D;             // row-major n x n
  std::vector<cplx> C;             // diagonal entries
  std::vector<cplx> alpha, beta;   // per branch, 1-based (alpha_1 = beta_1 = 1)
};

SamplingMatrices build_sampling_matrices(double lambda,
                                         const std::vector<double>& x_samples,
                                         const StarNetwork& net);

/// Independent route to the same weight matrix through finitely many point
/// evaluations: q = kappa * (D^{-1})^T Im((-i/w) C D) conj(D)^{-1}.  The
/// result is independent of the sampling points and must coincide with
/// weights_diagonal.
WeightMatrix weights_matrix(double lambda, const std::vector<double>& x_samples,
                            const StarNetwork& net);

/// Closed form of Im[(1/w) F^{-,j+1}_j(x) F^{-,j}_k(x')] on the band
/// (a_p, a_{p+1}), split into the five propagating/evanescent cases.  The
/// band index p must match lambda.
double im_kernel_case(int j, int k, int p, double x, double x_prime,
                      double lambda, const StarNetwork& net);

/// Same quantity straight from complex arithmetic, as a cross-check.
double im_kernel_direct(int j, int k, double x, double x_prime, double lambda,
                        const StarNetwork& net);

struct WeightSystemReport {
  double max_residual = 0.0;
  int equations = 0;
  std::map<std::string, double> by_case;
};

/// Verifies that the diagonal weights solve, for every branch pair (j, k),
/// the four linear equations obtained by matching coefficients of the four
/// independent basis products (cos/sin on propagating branches, growing and
/// decaying exponentials on evanescent ones) in the symmetrization identity.
WeightSystemReport verify_weight_systems(double lambda, const StarNetwork& net);

}  // namespace starkg
