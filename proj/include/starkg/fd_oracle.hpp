#pragma once

#include <vector>

#include "starkg/netfunc.hpp"
#include "starkg/network.hpp"

namespace starkg {

/// Uniform truncation grid shared by all branches: nodes x = 0, h, ..., L
/// with a Dirichlet cut at x = L.
struct FdGrid {
  double L = 30.0;
  double h = 1e-3;
};

/// Second-order finite-difference model of the operator, symmetrized by the
/// lumped mass matrix: Atilde = B^{-1/2} K B^{-1/2} with K the quadratic-form
/// matrix and B the trapezoid masses (h inside, n h/2 at the shared vertex).
/// Both vertex conditions are built in: the vertex is one degree of freedom
/// (value continuity) and the form assembly encodes the weighted derivative
/// balance.
class DiscreteStarOperator {
 public:
  DiscreteStarOperator(const StarNetwork& net, const FdGrid& grid);

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::size_t interior_per_branch() const { return m_ - 1; }
  [[nodiscard]] double h() const { return h_; }
  [[nodiscard]] double L() const { return static_cast<double>(m_) * h_; }
  [[nodiscard]] const StarNetwork& network() const { return net_; }

  /// Flat index of node i on branch k (i = 1..m-1); index 0 is the vertex.
  [[nodiscard]] std::size_t index(int k, std::size_t i) const;

  /// out = Atilde * in.
  void apply(const std::vector<double>& in, std::vector<double>& out) const;

  /// Solves (z I - Atilde) u = rhs by branch-wise Thomas elimination plus a
  /// scalar Schur complement at the vertex.  Stable for z off the real
  /// spectrum interval and for real z below it.
  [[nodiscard]] std::vector<cplx> solve_shifted(cplx z,
                                                const std::vector<cplx>& rhs) const;
  [[nodiscard]] std::vector<double> solve_shifted_real(
      double z, const std::vector<double>& rhs) const;

  /// Mass-scaled samples sqrt(B_i) f(x_i); the vertex uses the branch average.
  [[nodiscard]] std::vector<cplx> pack(const NetworkFunction& f) const;
  [[nodiscard]] std::vector<double> pack_real(const NetworkFunction& f) const;

  /// Inverse of pack: a sampled NetworkFunction on {0, h, ..., L} with the
  /// Dirichlet zero appended at x = L.
  [[nodiscard]] NetworkFunction unpack(const std::vector<cplx>& v) const;

 private:
  StarNetwork net_;
  double h_ = 0.0;
  std::size_t m_ = 0;  // intervals per branch; interior dof per branch m-1
  std::size_t dim_ = 0;
  double vertex_diag_ = 0.0;
  std::vector<double> diag_;      // interior diagonal per branch
  std::vector<double> off_;       // interior off-diagonal per branch (negative)
  std::vector<double> coupling_;  // vertex<->first interior entry per branch
};

/// Resolvent of the discrete model applied to f at spectral parameter z.
NetworkFunction oracle_resolvent(const NetworkFunction& f, cplx z,
                                 const StarNetwork& net, const FdGrid& grid);

/// Discrete spectral measure of f: point masses sum_i weight_i delta_{lambda_i}
/// approximating (E(.)f, f).
struct SpectralSample {
  std::vector<double> lambda;
  std::vector<double> weight;
};

/// Shift-invert Lanczos with full reorthogonalization, started at f and
/// shifted below the spectrum, so the Ritz quadrature resolves the threshold
/// region sharply.  steps is the Krylov dimension.
SpectralSample oracle_spectral_density(const NetworkFunction& f,
                                       const StarNetwork& net,
                                       const FdGrid& grid, int steps = 400);

/// Dense eigendecomposition for validation; refuses more than 4000 dof.
SpectralSample oracle_spectral_density_dense(const NetworkFunction& f,
                                             const StarNetwork& net,
                                             const FdGrid& grid);

/// Total mass of the sample inside the open window (a, b).
double window_mass(const SpectralSample& s, double a, double b);

/// Gaussian-smoothed density at the requested points.
std::vector<double> smoothed_density(const SpectralSample& s,
                                     const std::vector<double>& at,
                                     double delta);

struct OracleWave {
  NetworkFunction u;
  NetworkFunction v;
  double t = 0.0;
};

/// Propagates the discrete model: dense functional calculus below 4000 dof,
/// Ritz (Lanczos) propagation above.  Throws BoundaryContamination when the
/// light cone of the data reaches the Dirichlet cut before time t.
OracleWave oracle_evolve(const NetworkFunction& u0, const NetworkFunction& v0,
                         double t, const StarNetwork& net, const FdGrid& grid,
                         int steps = 600);

}  // namespace starkg
