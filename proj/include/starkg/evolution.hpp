#pragma once

#include <vector>

#include "starkg/transform.hpp"

namespace starkg {

/// Snapshot of the second-order evolution: u is the field, v its time
/// derivative.  `conforming` records whether the initial data satisfied the
/// vertex coupling (data that does not is propagated anyway, but the result
/// solves the equation only in the weak sense away from the vertex).
struct WaveState {
  NetworkFunction u;
  NetworkFunction v;
  double t = 0.0;
  bool conforming = true;
};

/// Scalar propagation factors of the second-order equation, continued to
/// negative lambda through the hyperbolic branch.  Shared with the
/// finite-difference oracle so both sides modulate identically.
double evolution_cos_factor(double lambda, double t);
double evolution_sinc_factor(double lambda, double t);   // sin(sqrt l t)/sqrt l
double evolution_dcos_factor(double lambda, double t);   // d/dt of the cosine

struct EvolveParams {
  OutputGrid out{20.0, 0.004};
  LambdaGridParams grid;        // x_scale is raised to cover out.L and data
  double tail_rel_tol = 1e-9;   // spectral tail target for the transforms
  double conforming_tol = 1e-8;
  ExecPolicy policy = ExecPolicy::parallel;
};

/// Propagates (u0, v0) to each requested time through the transform pair:
/// u(t) = Z[cos(sqrt(lambda) t) Vu0 + sin(sqrt(lambda) t)/sqrt(lambda) Vv0],
/// v(t) = du/dt.  The forward transforms are shared across all times.
std::vector<WaveState> evolve_many(const NetworkFunction& u0,
                                   const NetworkFunction& v0,
                                   const std::vector<double>& times,
                                   const StarNetwork& net,
                                   const EvolveParams& params = {});

WaveState evolve(const NetworkFunction& u0, const NetworkFunction& v0,
                 double t, const StarNetwork& net,
                 const EvolveParams& params = {});

/// Conserved functional sum_k int sigma (lambda |Vu|^2 + |Vv|^2) dlambda,
/// recomputed from the reconstructed state (a fresh forward transform), so
/// drift measures the error of the whole round trip.
double wave_energy(const WaveState& state, const StarNetwork& net,
                   const LambdaGridParams& grid = {},
                   ExecPolicy policy = ExecPolicy::parallel);

struct TunnelParams {
  double t_eval = 0.5;
  // Fit window start on the evanescent branch; pushed out automatically so
  // the window begins past the support radius of the initial data.
  double fit_lo = 1.0;
  double fit_span = 3.0;  // window length; trailing underflow points dropped
  int fit_points = 25;
  LambdaGridParams grid;
  ExecPolicy policy = ExecPolicy::parallel;
};

struct TunnelProfile {
  double fitted_rate = 0.0;           // least-squares slope of -ln|u|
  double rate_lo = 0.0, rate_hi = 0.0;  // predicted interval from the band edges
  bool within_interval = false;
  std::vector<double> x;        // fit abscissae actually used
  std::vector<double> log_amp;  // ln|u(t_eval, x)| at those points
};

/// Band-limits u0 to (band_lo, band_hi) inside a spectral gap of branch k,
/// evolves, and fits the exponential spatial decay of |u| on branch k.  The
/// fitted rate must land between the evanescent rates at the band edges.
TunnelProfile tunnel_decay_profile(double band_lo, double band_hi, int k,
                                   const NetworkFunction& u0,
                                   const StarNetwork& net,
                                   const TunnelParams& params = {});

}  // namespace starkg
