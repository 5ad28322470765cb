#pragma once

#include <functional>
#include <memory>

#include "starkg/lambda_grid.hpp"
#include "starkg/netfunc.hpp"
#include "starkg/parallel.hpp"
#include "starkg/resolvent.hpp"
#include "starkg/spectral_measure.hpp"

namespace starkg {

/// Quadrature grid of component k lives on [a_k, lambda_max]; sigma caches
/// the diagonal spectral weight at the nodes.
struct ComponentGrid {
  double a_k = 0.0;
  LambdaGrid g;
  std::vector<double> sigma;
};

struct SpectralGrid {
  double lambda_max = 0.0;
  std::vector<ComponentGrid> comp;  // index k-1

  [[nodiscard]] std::size_t total_nodes() const {
    std::size_t t = 0;
    for (const auto& c : comp) t += c.g.size();
    return t;
  }
};

SpectralGrid build_spectral_grid(const StarNetwork& net, double lambda_max,
                                 const LambdaGridParams& params = {});

/// A function of the spectral variable with one component per branch, sampled
/// on the nodes of a shared SpectralGrid.
struct SpectralFunction {
  std::shared_ptr<const SpectralGrid> grid;
  std::vector<std::vector<cplx>> values;  // values[k-1][node]
};

/// Forward transform (Vf)_k(lambda) = integral of f * conj(F^{-,k}_lambda)
/// over the network, evaluated at all grid nodes.
SpectralFunction transform_V(const NetworkFunction& f,
                             std::shared_ptr<const SpectralGrid> grid,
                             const StarNetwork& net,
                             ExecPolicy policy = ExecPolicy::parallel);

/// V at an arbitrary list of spectral points for a single component k
/// (lambda >= a_k required).  Shared by the projection formulas.
std::vector<cplx> transform_V_component(const NetworkFunction& f, int k,
                                        const std::vector<double>& lambdas,
                                        const StarNetwork& net,
                                        ExecPolicy policy = ExecPolicy::parallel);

/// Unconjugated pairing U_j(lambda) = integral of f * F^{-,j}_lambda, needed
/// by the cyclic projection formula.
std::vector<cplx> pairing_U_component(const NetworkFunction& f, int j,
                                      const std::vector<double>& lambdas,
                                      const StarNetwork& net,
                                      ExecPolicy policy = ExecPolicy::parallel);

double norm_sigma(const SpectralFunction& F, const StarNetwork& net);
cplx inner_sigma(const SpectralFunction& F, const SpectralFunction& G,
                 const StarNetwork& net);

/// Applies a scalar function of lambda to every component.
SpectralFunction modulate(const SpectralFunction& F,
                          const std::function<cplx(double)>& factor);

/// Back transform Z(G)(x) = sum_k int sigma_k G_k F^{-,k}(x) dlambda sampled
/// on a uniform output grid.
NetworkFunction transform_Z(const SpectralFunction& G, const OutputGrid& out,
                            const StarNetwork& net,
                            ExecPolicy policy = ExecPolicy::parallel);

/// Z and its x-derivatives at a single point (order 0, 1 or 2).
cplx z_eval(const SpectralFunction& G, const NetworkPoint& pt,
            const StarNetwork& net, int order = 0);

/// Wraps Z(G) as an analytic-rule NetworkFunction with exact derivative
/// rules; the tail certificate is probed numerically.
NetworkFunction z_as_function(const SpectralFunction& G, const StarNetwork& net);

struct AutoTransform {
  std::shared_ptr<const SpectralGrid> grid;
  SpectralFunction vf;
  double tail_fraction = 0.0;  // last relative increment of |Vf|_sigma^2
};

/// Chooses lambda_max by octave doubling until the sigma-norm of Vf
/// stabilizes to tail_rel_tol, then returns the final grid and transform.
AutoTransform transform_V_auto(const NetworkFunction& f, const StarNetwork& net,
                               const LambdaGridParams& params = {},
                               double tail_rel_tol = 1e-8,
                               double lambda_weight_power = 0.0,
                               ExecPolicy policy = ExecPolicy::parallel);

enum class ProjectionFormula { cyclic, symmetric };

/// Spectral projection E(a, b) applied to f, evaluated on `out`.  Both
/// formulas integrate over the window (a, b) intersected with the spectrum:
/// the symmetric one uses the diagonal weights and conjugated transforms, the
/// cyclic one pairs branch j with family j+1 without any conjugation.
NetworkFunction projection_E(double a, double b, const NetworkFunction& f,
                             const StarNetwork& net, ProjectionFormula formula,
                             const OutputGrid& out,
                             const LambdaGridParams& params = {},
                             ExecPolicy policy = ExecPolicy::parallel);

/// psi(A) f through the transform pair: Z(psi * Vf) with automatic tail
/// selection.  The result is analytic-rule backed and evaluable anywhere.
NetworkFunction apply_function_of_A(const std::function<double(double)>& psi,
                                    const NetworkFunction& f,
                                    const StarNetwork& net,
                                    const LambdaGridParams& params = {},
                                    ExecPolicy policy = ExecPolicy::parallel);

struct SobolevReport {
  double norm = 0.0;          // |lambda^j Vf|_sigma including the tail estimate
  bool finite = true;         // dyadic tails decay geometrically
  double tail_fraction = 0.0; // estimated mass above the last cut, relative
  std::vector<double> window_mass;  // dyadic window masses, diagnostics
};

/// Decides membership of f in the form domain of A^j by the decay of the
/// weighted transform, reporting |lambda^j Vf|_sigma.
SobolevReport sobolev_membership(const NetworkFunction& f, int j,
                                 const StarNetwork& net,
                                 const LambdaGridParams& params = {},
                                 ExecPolicy policy = ExecPolicy::parallel);

}  // namespace starkg
