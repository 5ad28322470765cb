#include "starkg/evolution.hpp"

#include <algorithm>
#include <cmath>

#include "starkg/errors.hpp"
#include "starkg/spectral_kernel.hpp"

namespace starkg {

// cos(sqrt(lambda) t), continued to lambda < 0 as cosh.
double evolution_cos_factor(double lam, double t) {
  if (lam >= 0.0) return std::cos(std::sqrt(lam) * t);
  return std::cosh(std::sqrt(-lam) * t);
}

// sin(sqrt(lambda) t) / sqrt(lambda); series near lambda = 0, cosh branch
// below.  This is the Duhamel factor multiplying the initial velocity.
double evolution_sinc_factor(double lam, double t) {
  if (std::abs(lam) * t * t < 1e-6) {
    const double z = lam * t * t;
    return t * (1.0 - z / 6.0 + z * z / 120.0);
  }
  if (lam > 0.0) {
    const double r = std::sqrt(lam);
    return std::sin(r * t) / r;
  }
  const double r = std::sqrt(-lam);
  return std::sinh(r * t) / r;
}

// d/dt of the cosine factor: -sqrt(lambda) sin(sqrt(lambda) t).
double evolution_dcos_factor(double lam, double t) {
  if (std::abs(lam) * t * t < 1e-6) {
    const double z = lam * t * t;
    return -lam * t * (1.0 - z / 6.0 + z * z / 120.0);
  }
  if (lam > 0.0) {
    const double r = std::sqrt(lam);
    return -r * std::sin(r * t);
  }
  const double r = std::sqrt(-lam);
  return r * std::sinh(r * t);
}

namespace {

bool vertex_conforming(const NetworkFunction& u0, const NetworkFunction& v0,
                       const StarNetwork& net, double tol) {
  // The field needs both vertex conditions, the velocity only value
  // continuity (it enters the energy without derivatives).
  const TransmissionDefects du = check_transmission(u0, net, tol);
  const TransmissionDefects dv = check_transmission(v0, net, tol);
  return du.t0_defect <= tol && du.t1_defect <= tol && dv.t0_defect <= tol;
}

}  // namespace

std::vector<WaveState> evolve_many(const NetworkFunction& u0,
                                   const NetworkFunction& v0,
                                   const std::vector<double>& times,
                                   const StarNetwork& net,
                                   const EvolveParams& params) {
  if (u0.branches() != net.n() || v0.branches() != net.n())
    throw BadGrid("evolve: initial data does not match the network");

  const bool conforming =
      vertex_conforming(u0, v0, net, params.conforming_tol);

  LambdaGridParams p = params.grid;
  p.x_scale = std::max({p.x_scale, params.out.L + 2.0,
                        u0.integration_radius(1e-14) + 2.0,
                        v0.integration_radius(1e-14) + 2.0});

  // One shared grid for both transforms: run the tail selection separately
  // (the field tail is weighted by lambda because v(t) and the energy carry
  // sqrt(lambda) factors), then keep the larger grid.
  AutoTransform at_u =
      transform_V_auto(u0, net, p, params.tail_rel_tol, 1.0, params.policy);
  AutoTransform at_v =
      transform_V_auto(v0, net, p, params.tail_rel_tol, 0.0, params.policy);
  std::shared_ptr<const SpectralGrid> grid =
      at_u.grid->lambda_max >= at_v.grid->lambda_max ? at_u.grid : at_v.grid;
  const SpectralFunction vu = at_u.grid == grid
                                  ? std::move(at_u.vf)
                                  : transform_V(u0, grid, net, params.policy);
  const SpectralFunction vv = at_v.grid == grid
                                  ? std::move(at_v.vf)
                                  : transform_V(v0, grid, net, params.policy);

  std::vector<WaveState> states;
  states.reserve(times.size());
  for (double t : times) {
    SpectralFunction gu = vu, gv = vu;  // layouts; values replaced below
    for (std::size_t k = 0; k < vu.values.size(); ++k) {
      const auto& nodes = grid->comp[k].g.node;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double lam = nodes[i];
        const cplx a = vu.values[k][i];
        const cplx b = vv.values[k][i];
        gu.values[k][i] = evolution_cos_factor(lam, t) * a + evolution_sinc_factor(lam, t) * b;
        gv.values[k][i] = evolution_dcos_factor(lam, t) * a + evolution_cos_factor(lam, t) * b;
      }
    }
    WaveState st;
    st.u = transform_Z(gu, params.out, net, params.policy);
    st.v = transform_Z(gv, params.out, net, params.policy);
    st.t = t;
    st.conforming = conforming;
    states.push_back(std::move(st));
  }
  return states;
}

WaveState evolve(const NetworkFunction& u0, const NetworkFunction& v0,
                 double t, const StarNetwork& net, const EvolveParams& params) {
  return std::move(evolve_many(u0, v0, {t}, net, params).front());
}

double wave_energy(const WaveState& state, const StarNetwork& net,
                   const LambdaGridParams& grid, ExecPolicy policy) {
  const AutoTransform at_u =
      transform_V_auto(state.u, net, grid, 1e-9, 1.0, policy);
  const AutoTransform at_v =
      transform_V_auto(state.v, net, grid, 1e-9, 0.0, policy);
  double e = 0.0;
  for (std::size_t k = 0; k < at_u.vf.values.size(); ++k) {
    const ComponentGrid& cg = at_u.grid->comp[k];
    for (std::size_t i = 0; i < cg.g.size(); ++i)
      e += cg.g.weight[i] * cg.sigma[i] * cg.g.node[i] *
           std::norm(at_u.vf.values[k][i]);
  }
  for (std::size_t k = 0; k < at_v.vf.values.size(); ++k) {
    const ComponentGrid& cg = at_v.grid->comp[k];
    for (std::size_t i = 0; i < cg.g.size(); ++i)
      e += cg.g.weight[i] * cg.sigma[i] * std::norm(at_v.vf.values[k][i]);
  }
  return e;
}

TunnelProfile tunnel_decay_profile(double band_lo, double band_hi, int k,
                                   const NetworkFunction& u0,
                                   const StarNetwork& net,
                                   const TunnelParams& params) {
  if (k < 1 || k > net.n())
    throw UnknownBranch("tunnel_decay_profile: branch " + std::to_string(k));
  if (!(band_lo < band_hi))
    throw BandOutsideGap("tunnel_decay_profile: band needs lo < hi");
  if (net.at_threshold(band_lo) || net.at_threshold(band_hi))
    throw BandOutsideGap("tunnel_decay_profile: band edge sits on a threshold");
  const int p = net.band_index(band_lo);
  if (net.band_index(band_hi) != p)
    throw BandOutsideGap(
        "tunnel_decay_profile: band crosses a branch threshold");
  if (p < 1)
    throw BandOutsideGap(
        "tunnel_decay_profile: band lies below the spectrum; no propagating "
        "channel exists there");
  if (k <= p)
    throw BandOutsideGap("tunnel_decay_profile: branch " + std::to_string(k) +
                         " propagates in this band; pick one whose threshold "
                         "lies above it");

  // The fit must measure the tunneled tail, not the remnants of the initial
  // bump, so the window always starts past the support of the data.
  double fit_lo = params.fit_lo;
  if (u0.compact()) fit_lo = std::max(fit_lo, u0.support_radius() + 0.25);

  LambdaGridParams gp = params.grid;
  gp.x_scale = std::max(gp.x_scale, fit_lo + params.fit_span + 2.0);
  AutoTransform at =
      transform_V_auto(u0, net, gp, 1e-10, 0.0, params.policy);

  // Smooth bump supported exactly on the band, peak value 1 at the center.
  const double mid = 0.5 * (band_lo + band_hi);
  const double half = 0.5 * (band_hi - band_lo);
  auto bump = [mid, half](double lam) {
    const double s = (lam - mid) / half;
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
  };
  const SpectralFunction banded =
      modulate(at.vf, [&bump](double lam) { return cplx(bump(lam), 0.0); });

  const double band_mass = norm_sigma(banded, net);
  const double full_mass = norm_sigma(at.vf, net);
  if (!(band_mass > 1e-12 * (full_mass + 1e-300)))
    throw AmplitudeUnderflow(
        "tunnel_decay_profile: initial state carries no spectral mass inside "
        "the band");

  const double t = params.t_eval;
  const SpectralFunction propagated = modulate(
      banded, [t](double lam) { return cplx(evolution_cos_factor(lam, t), 0.0); });

  const int pts = std::max(params.fit_points, 6);
  std::vector<double> xs, la;
  double amp_max = 0.0;
  for (int i = 0; i < pts; ++i) {
    const double x =
        fit_lo + params.fit_span * i / static_cast<double>(pts - 1);
    const double amp = std::abs(z_eval(propagated, {k, x}, net, 0));
    xs.push_back(x);
    la.push_back(amp);
    amp_max = std::max(amp_max, amp);
  }
  if (!(amp_max > 1e-12 * (band_mass + 1e-300)))
    throw AmplitudeUnderflow(
        "tunnel_decay_profile: evolved amplitude on the target branch is at "
        "rounding level; shrink the fit window");

  TunnelProfile prof;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (la[i] < 1e-13 * amp_max) break;  // trailing underflow points
    prof.x.push_back(xs[i]);
    prof.log_amp.push_back(std::log(la[i]));
  }
  if (prof.x.size() < 6)
    throw AmplitudeUnderflow(
        "tunnel_decay_profile: fewer than six usable fit points above the "
        "rounding floor");

  // Least squares for log|u| = alpha - rate * x.
  const auto m = static_cast<double>(prof.x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < prof.x.size(); ++i) {
    sx += prof.x[i];
    sy += prof.log_amp[i];
    sxx += prof.x[i] * prof.x[i];
    sxy += prof.x[i] * prof.log_amp[i];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  prof.fitted_rate = -slope;
  prof.rate_lo = xi_decay_rate(band_hi, k, net);
  prof.rate_hi = xi_decay_rate(band_lo, k, net);
  prof.within_interval =
      prof.fitted_rate >= prof.rate_lo && prof.fitted_rate <= prof.rate_hi;
  return prof;
}

}  // namespace starkg
