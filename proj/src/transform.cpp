#include "starkg/transform.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "starkg/errors.hpp"
#include "starkg/spectral_kernel.hpp"

namespace starkg {
namespace {

constexpr double kTailTol = 1e-14;

/// Controls for the moment integrals on analytic components.  The adaptive
/// driver resolves both the oscillation of the weight and any sharp features
/// of the component itself (a fixed panel width tied to the wave number badly
/// under-resolves e.g. second derivatives of edge-flat test functions).
QuadratureSpec moment_spec() {
  QuadratureSpec spec;
  spec.rel_tol = 1e-10;
  spec.abs_tol = 3e-12;
  return spec;
}

/// integral over [0, R] of f_k(x) * exp(i q x) dx.
///
/// Foreign-branch weights in the transform pair are single exponentials of
/// this form.  Sampled components use Simpson's rule with the phase advanced
/// by one complex multiplication per node, which stays relatively accurate
/// even for growing real exponents; analytic components integrate adaptively.
cplx exp_moment(const NetworkFunction& f, int k, double R, cplx q) {
  if (R <= 0.0) return {0.0, 0.0};
  if (f.is_sampled(k)) {
    const GridSamples& g = f.samples(k);
    std::size_t count = g.values.size();
    if (count < 2) return {0.0, 0.0};
    if (R < g.length()) {
      const auto wanted =
          static_cast<std::size_t>(std::floor(R / g.h + 1e-9)) + 1;
      count = std::min(count, std::max<std::size_t>(wanted, 2));
    }
    static thread_local std::vector<cplx> prod;
    prod.assign(count, cplx{});
    const cplx ratio = std::exp(cplx(0.0, 1.0) * q * g.h);
    cplx phase{1.0, 0.0};
    for (std::size_t i = 0; i < count; ++i) {
      prod[i] = g.values[i] * phase;
      phase *= ratio;
    }
    return simpson(prod, g.h);
  }
  const AnalyticRule& rule = f.rule(k);
  const cplx iq = cplx(0.0, 1.0) * q;
  return integrate(
             [&](double x) { return rule.value(x) * std::exp(iq * x); }, 0.0,
             R, moment_spec())
      .value;
}

/// sin(xi x) / xi, continued by its limit x at xi = 0.
cplx sin_over_xi(cplx xiv, double x) {
  if (xiv == cplx{0.0, 0.0}) return {x, 0.0};
  return std::sin(xiv * x) / xiv;
}

/// Trig moments over [0, R]: C = integral of f_k(x) cos(xi x) and
/// S = integral of f_k(x) sin(xi x)/xi.
///
/// The own-branch weight of the vertex family is cos(xi x) -+ i s sin(xi x)
/// with s ~ 1/xi near the branch threshold.  Splitting it into the two
/// exponentials exp(+-i xi x) multiplies their independent quadrature errors
/// by |s|, which ruins the first grid nodes above each threshold.  Pairing
/// the bounded product s*xi with the normalized sine moment S instead keeps
/// the evaluation conditioned uniformly in lambda.
std::pair<cplx, cplx> trig_moments(const NetworkFunction& f, int k, double R,
                                   cplx xiv) {
  if (R <= 0.0) return {cplx{}, cplx{}};
  if (f.is_sampled(k)) {
    const GridSamples& g = f.samples(k);
    std::size_t count = g.values.size();
    if (count < 2) return {cplx{}, cplx{}};
    if (R < g.length()) {
      const auto wanted =
          static_cast<std::size_t>(std::floor(R / g.h + 1e-9)) + 1;
      count = std::min(count, std::max<std::size_t>(wanted, 2));
    }
    static thread_local std::vector<cplx> cosv, sinv;
    cosv.assign(count, cplx{});
    sinv.assign(count, cplx{});
    for (std::size_t i = 0; i < count; ++i) {
      const double x = g.h * static_cast<double>(i);
      cosv[i] = g.values[i] * std::cos(xiv * x);
      sinv[i] = g.values[i] * sin_over_xi(xiv, x);
    }
    return {simpson(cosv, g.h), simpson(sinv, g.h)};
  }
  const AnalyticRule& rule = f.rule(k);
  const cplx c_total =
      integrate([&](double x) { return rule.value(x) * std::cos(xiv * x); },
                0.0, R, moment_spec())
          .value;
  const cplx s_total =
      integrate([&](double x) { return rule.value(x) * sin_over_xi(xiv, x); },
                0.0, R, moment_spec())
          .value;
  return {c_total, s_total};
}

/// s_j(lambda) * xi_j(lambda) = -(sum over l != j of c_l xi_l) / c_j.  The
/// product stays regular at the branch's own threshold although s_j itself
/// diverges there.
cplx s_times_xi(cplx lambda, int j, const StarNetwork& net) {
  cplx others{0.0, 0.0};
  for (int l = 1; l <= net.n(); ++l) {
    if (l == j) continue;
    others += net.c_at(l) * xi(lambda, l, net);
  }
  return -others / net.c_at(j);
}

void require_branch_count(const NetworkFunction& f, const StarNetwork& net,
                          const char* who) {
  if (f.branches() != net.n())
    throw BadGrid(std::string(who) + ": function has " +
                  std::to_string(f.branches()) + " components, network has " +
                  std::to_string(net.n()));
}

/// Real part of f as a NetworkFunction (metadata preserved).
NetworkFunction split_part(const NetworkFunction& f, bool imaginary) {
  const int n = f.branches();
  bool any_sampled = false;
  for (int k = 1; k <= n; ++k) any_sampled |= f.is_sampled(k);
  if (any_sampled) {
    std::vector<GridSamples> parts(n);
    for (int k = 1; k <= n; ++k) {
      const GridSamples& g = f.samples(k);
      GridSamples p;
      p.h = g.h;
      p.values.reserve(g.values.size());
      for (const cplx& v : g.values)
        p.values.emplace_back(imaginary ? v.imag() : v.real(), 0.0);
      parts[k - 1] = std::move(p);
    }
    return NetworkFunction::sampled(std::move(parts));
  }
  std::vector<AnalyticRule> rules(n);
  for (int k = 1; k <= n; ++k) {
    const AnalyticRule& r = f.rule(k);
    auto wrap = [imaginary](std::function<cplx(double)> fn) {
      if (!fn) return std::function<cplx(double)>{};
      return std::function<cplx(double)>([imaginary, fn = std::move(fn)](
                                             double x) {
        const cplx v = fn(x);
        return cplx(imaginary ? v.imag() : v.real(), 0.0);
      });
    };
    rules[k - 1] = AnalyticRule{wrap(r.value), wrap(r.d1), wrap(r.d2)};
  }
  if (f.compact())
    return NetworkFunction::analytic(std::move(rules), f.support_radius());
  return NetworkFunction::analytic_decaying(std::move(rules), f.decay());
}

}  // namespace

SpectralGrid build_spectral_grid(const StarNetwork& net, double lambda_max,
                                 const LambdaGridParams& params) {
  if (!(lambda_max > net.a_max()))
    throw BadGrid("build_spectral_grid: lambda_max must exceed every branch "
                  "threshold");
  SpectralGrid grid;
  grid.lambda_max = lambda_max;
  grid.comp.resize(static_cast<std::size_t>(net.n()));
  for (int k = 1; k <= net.n(); ++k) {
    ComponentGrid& cg = grid.comp[static_cast<std::size_t>(k - 1)];
    cg.a_k = net.a_at(k);
    cg.g = build_window_grid(net, cg.a_k, lambda_max, params);
    cg.sigma.resize(cg.g.size());
    for (std::size_t i = 0; i < cg.g.size(); ++i)
      cg.sigma[i] = sigma_weight(cg.g.node[i], k, net);
  }
  return grid;
}

std::vector<cplx> transform_V_component(const NetworkFunction& f, int k,
                                        const std::vector<double>& lambdas,
                                        const StarNetwork& net,
                                        ExecPolicy policy) {
  require_branch_count(f, net, "transform_V_component");
  if (k < 1 || k > net.n())
    throw UnknownBranch("transform_V_component: component " +
                        std::to_string(k));
  const double R = f.integration_radius(kTailTol);
  const int n = net.n();
  std::vector<cplx> out(lambdas.size());
  par_for(policy, static_cast<std::ptrdiff_t>(lambdas.size()),
          [&](std::ptrdiff_t idx) {
            const double lam = lambdas[static_cast<std::size_t>(idx)];
            if (lam < net.a_at(k))
              throw OutsideDomain(
                  "transform_V_component: lambda below the component "
                  "threshold");
            cplx total{0.0, 0.0};
            for (int m = 1; m <= n; ++m) {
              if (m == k) {
                // conj(F^{-,k}_k) = cos(xi x) + i conj(s xi) sin(xi x)/xi;
                // xi is real on the branch's own band.
                const double xk = xi(cplx(lam, 0.0), k, net).real();
                const cplx sxi =
                    std::conj(s_times_xi(cplx(lam, 0.0), k, net));
                const auto [cmom, smom] =
                    trig_moments(f, k, R, cplx(xk, 0.0));
                total += cmom + cplx(0.0, 1.0) * sxi * smom;
              } else {
                const cplx xm = xi(cplx(lam, 0.0), m, net);
                total += exp_moment(f, m, R, std::conj(xm));
              }
            }
            out[static_cast<std::size_t>(idx)] = total;
          });
  return out;
}

std::vector<cplx> pairing_U_component(const NetworkFunction& f, int j,
                                      const std::vector<double>& lambdas,
                                      const StarNetwork& net,
                                      ExecPolicy policy) {
  require_branch_count(f, net, "pairing_U_component");
  if (j < 1 || j > net.n())
    throw UnknownBranch("pairing_U_component: component " + std::to_string(j));
  if (!f.compact()) {
    for (double lam : lambdas)
      if (lam < net.a_at(j))
        throw NonCompactSupport(
            "pairing_U_component: the unconjugated pairing grows "
            "exponentially below the branch threshold; compact support "
            "required");
  }
  const double R = f.integration_radius(kTailTol);
  const int n = net.n();
  std::vector<cplx> out(lambdas.size());
  par_for(policy, static_cast<std::ptrdiff_t>(lambdas.size()),
          [&](std::ptrdiff_t idx) {
            const double lam = lambdas[static_cast<std::size_t>(idx)];
            const cplx lamc(lam, 0.0);
            cplx total{0.0, 0.0};
            for (int m = 1; m <= n; ++m) {
              const cplx xm = xi(lamc, m, net);
              if (m == j) {
                // F^{-,j}_j = cos(xi x) - i (s xi) sin(xi x)/xi; xi may be
                // imaginary below the branch threshold, where both moments
                // turn hyperbolic.
                const cplx sxi = s_times_xi(lamc, j, net);
                const auto [cmom, smom] = trig_moments(f, m, R, xm);
                total += cmom - cplx(0.0, 1.0) * sxi * smom;
              } else {
                total += exp_moment(f, m, R, -xm);
              }
            }
            out[static_cast<std::size_t>(idx)] = total;
          });
  return out;
}

SpectralFunction transform_V(const NetworkFunction& f,
                             std::shared_ptr<const SpectralGrid> grid,
                             const StarNetwork& net, ExecPolicy policy) {
  require_branch_count(f, net, "transform_V");
  if (!grid || grid->comp.size() != static_cast<std::size_t>(net.n()))
    throw BadGrid("transform_V: grid does not match the network");
  SpectralFunction out;
  out.grid = std::move(grid);
  out.values.resize(out.grid->comp.size());
  for (int k = 1; k <= net.n(); ++k)
    out.values[static_cast<std::size_t>(k - 1)] = transform_V_component(
        f, k, out.grid->comp[static_cast<std::size_t>(k - 1)].g.node, net,
        policy);
  return out;
}

double norm_sigma(const SpectralFunction& F, const StarNetwork& net) {
  (void)net;
  if (!F.grid) throw BadGrid("norm_sigma: missing grid");
  double total = 0.0;
  for (std::size_t k = 0; k < F.grid->comp.size(); ++k) {
    const ComponentGrid& cg = F.grid->comp[k];
    const auto& vals = F.values.at(k);
    for (std::size_t i = 0; i < cg.g.size(); ++i)
      total += cg.g.weight[i] * cg.sigma[i] * std::norm(vals[i]);
  }
  return std::sqrt(total);
}

cplx inner_sigma(const SpectralFunction& F, const SpectralFunction& G,
                 const StarNetwork& net) {
  (void)net;
  if (!F.grid || F.grid != G.grid)
    throw BadGrid("inner_sigma: both factors must share one spectral grid");
  cplx total{0.0, 0.0};
  for (std::size_t k = 0; k < F.grid->comp.size(); ++k) {
    const ComponentGrid& cg = F.grid->comp[k];
    for (std::size_t i = 0; i < cg.g.size(); ++i)
      total += cg.g.weight[i] * cg.sigma[i] * F.values[k][i] *
               std::conj(G.values[k][i]);
  }
  return total;
}

SpectralFunction modulate(const SpectralFunction& F,
                          const std::function<cplx(double)>& factor) {
  SpectralFunction out;
  out.grid = F.grid;
  out.values.resize(F.values.size());
  for (std::size_t k = 0; k < F.values.size(); ++k) {
    const auto& nodes = F.grid->comp[k].g.node;
    out.values[k].resize(F.values[k].size());
    for (std::size_t i = 0; i < F.values[k].size(); ++i)
      out.values[k][i] = factor(nodes[i]) * F.values[k][i];
  }
  return out;
}

namespace {

/// Adds sum_i coeff[i] * F^{-,k(i)}_r(x_j) over the uniform x-grid for one
/// output branch r, advancing each node's phases by complex multiplication.
void accumulate_branch(std::vector<cplx>& acc, int r,
                       const SpectralGrid& grid,
                       const std::vector<std::vector<cplx>>& coeff,
                       const StarNetwork& net, double h) {
  const auto nx = static_cast<std::ptrdiff_t>(acc.size());
  for (std::size_t kc = 0; kc < grid.comp.size(); ++kc) {
    const int k = static_cast<int>(kc) + 1;
    const ComponentGrid& cg = grid.comp[kc];
    for (std::size_t i = 0; i < cg.g.size(); ++i) {
      const cplx c = coeff[kc][i];
      if (c == cplx{}) continue;
      const cplx lam(cg.g.node[i], 0.0);
      if (k != r) {
        const cplx xr = xi(lam, r, net);
        const cplx ratio = std::exp(cplx(0.0, -1.0) * xr * h);
        cplx phase{1.0, 0.0};
        for (std::ptrdiff_t j = 0; j < nx; ++j) {
          acc[static_cast<std::size_t>(j)] += c * phase;
          phase *= ratio;
        }
      } else {
        const cplx xr = xi(lam, r, net);
        const cplx s = s_coeff(lam, r, net);
        const cplx cp = c * 0.5 * (1.0 - s);
        const cplx cm = c * 0.5 * (1.0 + s);
        const cplx rp = std::exp(cplx(0.0, 1.0) * xr * h);
        const cplx rm = std::exp(cplx(0.0, -1.0) * xr * h);
        cplx pp{1.0, 0.0}, pm{1.0, 0.0};
        for (std::ptrdiff_t j = 0; j < nx; ++j) {
          acc[static_cast<std::size_t>(j)] += cp * pp + cm * pm;
          pp *= rp;
          pm *= rm;
        }
      }
    }
  }
}

void check_output_grid(const OutputGrid& out) {
  if (!(out.h > 0.0) || !(out.L > 0.0))
    throw BadGrid("output grid needs positive L and h");
  const double steps = out.L / out.h;
  if (std::abs(steps - std::round(steps)) > 1e-9 * (1.0 + steps))
    throw BadGrid("output grid: L must be an integer multiple of h");
}

}  // namespace

NetworkFunction transform_Z(const SpectralFunction& G, const OutputGrid& out,
                            const StarNetwork& net, ExecPolicy policy) {
  if (!G.grid || G.grid->comp.size() != static_cast<std::size_t>(net.n()))
    throw BadGrid("transform_Z: grid does not match the network");
  check_output_grid(out);
  const auto nx = static_cast<std::size_t>(std::round(out.L / out.h)) + 1;

  // sigma- and quadrature-weighted samples, shared by all output branches.
  std::vector<std::vector<cplx>> coeff(G.values.size());
  for (std::size_t k = 0; k < G.values.size(); ++k) {
    const ComponentGrid& cg = G.grid->comp[k];
    coeff[k].resize(cg.g.size());
    for (std::size_t i = 0; i < cg.g.size(); ++i)
      coeff[k][i] = cg.g.weight[i] * cg.sigma[i] * G.values[k][i];
  }

  std::vector<GridSamples> comps(static_cast<std::size_t>(net.n()));
  par_for(policy, net.n(), [&](std::ptrdiff_t r0) {
    const int r = static_cast<int>(r0) + 1;
    std::vector<cplx> acc(nx, cplx{});
    accumulate_branch(acc, r, *G.grid, coeff, net, out.h);
    comps[static_cast<std::size_t>(r0)] = GridSamples{out.h, std::move(acc)};
  });
  return NetworkFunction::sampled(std::move(comps));
}

cplx z_eval(const SpectralFunction& G, const NetworkPoint& pt,
            const StarNetwork& net, int order) {
  if (!G.grid || G.grid->comp.size() != static_cast<std::size_t>(net.n()))
    throw BadGrid("z_eval: grid does not match the network");
  validate_point(pt, net);
  if (order < 0 || order > 2)
    throw MissingDerivativeRule("z_eval: derivative order must be 0, 1 or 2");
  const int r = pt.branch;
  const cplx iunit(0.0, 1.0);
  cplx total{0.0, 0.0};
  for (std::size_t kc = 0; kc < G.grid->comp.size(); ++kc) {
    const int k = static_cast<int>(kc) + 1;
    const ComponentGrid& cg = G.grid->comp[kc];
    for (std::size_t i = 0; i < cg.g.size(); ++i) {
      const cplx c = cg.g.weight[i] * cg.sigma[i] * G.values[kc][i];
      if (c == cplx{}) continue;
      const cplx lam(cg.g.node[i], 0.0);
      const cplx xr = xi(lam, r, net);
      if (k != r) {
        cplx fac{1.0, 0.0};
        for (int d = 0; d < order; ++d) fac *= -iunit * xr;
        total += c * fac * std::exp(-iunit * xr * pt.x);
      } else {
        const cplx s = s_coeff(lam, r, net);
        cplx fp{1.0, 0.0}, fm{1.0, 0.0};
        for (int d = 0; d < order; ++d) {
          fp *= iunit * xr;
          fm *= -iunit * xr;
        }
        total += c * (0.5 * (1.0 - s) * fp * std::exp(iunit * xr * pt.x) +
                      0.5 * (1.0 + s) * fm * std::exp(-iunit * xr * pt.x));
      }
    }
  }
  return total;
}

NetworkFunction z_as_function(const SpectralFunction& G,
                              const StarNetwork& net) {
  if (!G.grid || G.grid->comp.size() != static_cast<std::size_t>(net.n()))
    throw BadGrid("z_as_function: grid does not match the network");
  const int n = net.n();

  // Probe where the reconstruction has decayed to rounding level; the wrapper
  // carries that radius as an effective support for truncating integrals.
  // Beyond the resolution of the spectral grid the node sum stops decaying
  // and turns into a quasi-periodic aliasing floor, so once the envelope is
  // small and stalls for several probes in a row the radius is closed there
  // rather than chasing a tail the grid cannot represent.
  double peak = 0.0;
  for (int r = 1; r <= n; ++r)
    for (double x : {0.0, 0.5, 1.0, 2.0})
      peak = std::max(peak, std::abs(z_eval(G, {r, x}, net, 0)));
  double radius = 4.0;
  if (peak > 0.0) {
    int calm = 0, stalled = 0;
    double x = 2.0, best = peak;
    while (x < 4096.0 && calm < 3 && stalled < 3) {
      x *= 1.5;
      double here = 0.0;
      for (int r = 1; r <= n; ++r)
        here = std::max(here, std::abs(z_eval(G, {r, x}, net, 0)));
      calm = (here < 1e-12 * peak) ? calm + 1 : 0;
      if (here < 1e-3 * peak)
        stalled = (here > 0.5 * best) ? stalled + 1 : 0;
      else
        stalled = 0;
      best = std::min(best, here);
      radius = x;
    }
  }

  std::vector<AnalyticRule> rules(static_cast<std::size_t>(n));
  for (int r = 1; r <= n; ++r) {
    auto make = [G, r, net](int order) {
      return std::function<cplx(double)>([G, r, net, order](double x) {
        return z_eval(G, {r, x}, net, order);
      });
    };
    rules[static_cast<std::size_t>(r - 1)] =
        AnalyticRule{make(0), make(1), make(2)};
  }
  return NetworkFunction::analytic(std::move(rules), radius);
}

AutoTransform transform_V_auto(const NetworkFunction& f,
                               const StarNetwork& net,
                               const LambdaGridParams& params,
                               double tail_rel_tol, double lambda_weight_power,
                               ExecPolicy policy) {
  require_branch_count(f, net, "transform_V_auto");
  LambdaGridParams p = params;
  p.x_scale = std::max(p.x_scale, f.integration_radius(kTailTol) + 2.0);

  auto weighted_mass = [&](const SpectralFunction& vf) {
    double total = 0.0;
    for (std::size_t k = 0; k < vf.values.size(); ++k) {
      const ComponentGrid& cg = vf.grid->comp[k];
      for (std::size_t i = 0; i < cg.g.size(); ++i) {
        double w = 1.0;
        if (lambda_weight_power != 0.0)
          w = std::pow(std::max(std::abs(cg.g.node[i]), 1e-30),
                       2.0 * lambda_weight_power);
        total += cg.g.weight[i] * cg.sigma[i] * w * std::norm(vf.values[k][i]);
      }
    }
    return total;
  };

  const double spread = net.a_max() - net.a_min();
  double lambda_max = net.a_max() + std::max(30.0, spread);
  auto grid = std::make_shared<const SpectralGrid>(
      build_spectral_grid(net, lambda_max, p));
  SpectralFunction vf = transform_V(f, grid, net, policy);
  double mass = weighted_mass(vf);
  double tail_fraction = 1.0;
  for (int round = 0; round < 8; ++round) {
    lambda_max = net.a_max() + 2.0 * (lambda_max - net.a_max());
    auto next_grid = std::make_shared<const SpectralGrid>(
        build_spectral_grid(net, lambda_max, p));
    SpectralFunction next = transform_V(f, next_grid, net, policy);
    const double next_mass = weighted_mass(next);
    tail_fraction = next_mass > 0.0
                        ? std::abs(next_mass - mass) / next_mass
                        : 0.0;
    grid = std::move(next_grid);
    vf = std::move(next);
    mass = next_mass;
    if (tail_fraction < tail_rel_tol) break;
  }
  return AutoTransform{grid, std::move(vf), tail_fraction};
}

NetworkFunction projection_E(double a, double b, const NetworkFunction& f,
                             const StarNetwork& net, ProjectionFormula formula,
                             const OutputGrid& out,
                             const LambdaGridParams& params,
                             ExecPolicy policy) {
  require_branch_count(f, net, "projection_E");
  if (!(a < b)) throw OutsideDomain("projection_E: window needs a < b");
  check_output_grid(out);
  const auto nx = static_cast<std::size_t>(std::round(out.L / out.h)) + 1;
  const int n = net.n();
  const double lo = std::max(a, net.a_min());
  const double hi = b;
  if (!(lo < hi)) {
    // The window sits below the spectrum: the projection annihilates f.
    std::vector<GridSamples> zeros(static_cast<std::size_t>(n));
    for (auto& g : zeros) g = GridSamples{out.h, std::vector<cplx>(nx, cplx{})};
    return NetworkFunction::sampled(std::move(zeros));
  }

  LambdaGridParams p = params;
  p.x_scale = std::max({p.x_scale, out.L + 2.0,
                        f.integration_radius(kTailTol) + 2.0});
  const LambdaGrid window = build_window_grid(net, lo, hi, p);

  if (formula == ProjectionFormula::symmetric) {
    // Package the window as a spectral grid: component l keeps the nodes
    // above its threshold (its weight vanishes below) and the shared back
    // transform does the rest.
    auto grid = std::make_shared<SpectralGrid>();
    grid->lambda_max = hi;
    grid->comp.resize(static_cast<std::size_t>(n));
    SpectralFunction vf;
    vf.values.resize(static_cast<std::size_t>(n));
    for (int l = 1; l <= n; ++l) {
      ComponentGrid& cg = grid->comp[static_cast<std::size_t>(l - 1)];
      cg.a_k = net.a_at(l);
      for (std::size_t i = 0; i < window.size(); ++i) {
        if (window.node[i] <= cg.a_k) continue;
        cg.g.node.push_back(window.node[i]);
        cg.g.weight.push_back(window.weight[i]);
        cg.sigma.push_back(sigma_weight(window.node[i], l, net));
      }
      vf.values[static_cast<std::size_t>(l - 1)] =
          transform_V_component(f, l, cg.g.node, net, policy);
    }
    vf.grid = std::shared_ptr<const SpectralGrid>(std::move(grid));
    return transform_Z(vf, out, net, policy);
  }

  // Cyclic route: branch r pairs with the neighbouring family r+1 and no
  // conjugation appears; valid verbatim for real data, so complex data is
  // split into real and imaginary parts.
  std::vector<GridSamples> comps(static_cast<std::size_t>(n));
  for (auto& g : comps) g = GridSamples{out.h, std::vector<cplx>(nx, cplx{})};
  for (int pass = 0; pass < 2; ++pass) {
    const NetworkFunction part = split_part(f, pass == 1);
    par_for(policy, n, [&](std::ptrdiff_t r0) {
      const int r = static_cast<int>(r0) + 1;
      std::vector<cplx>& acc = comps[static_cast<std::size_t>(r0)].values;
      const std::vector<cplx> U =
          pairing_U_component(part, r, window.node, net, ExecPolicy::serial);
      for (std::size_t i = 0; i < window.size(); ++i) {
        const double lam = window.node[i];
        const cplx w = wronskian_w(cplx(lam, 0.0), -1, net);
        const cplx base = kSpectralNormalization * window.weight[i] * U[i] / w;
        // F^{-,r+1} restricted to branch r is the pure exponential.
        const cplx xr = xi(cplx(lam, 0.0), r, net);
        const cplx ratio = std::exp(cplx(0.0, -1.0) * xr * out.h);
        cplx phase{1.0, 0.0};
        for (std::size_t j = 0; j < nx; ++j) {
          const double value = (base * phase).imag();
          acc[j] += pass == 0 ? cplx(value, 0.0) : cplx(0.0, value);
          phase *= ratio;
        }
      }
    });
  }
  return NetworkFunction::sampled(std::move(comps));
}

NetworkFunction apply_function_of_A(const std::function<double(double)>& psi,
                                    const NetworkFunction& f,
                                    const StarNetwork& net,
                                    const LambdaGridParams& params,
                                    ExecPolicy policy) {
  AutoTransform at = transform_V_auto(f, net, params, 1e-10, 0.0, policy);
  const SpectralFunction scaled = modulate(
      at.vf, [&psi](double lam) { return cplx(psi(lam), 0.0); });
  return z_as_function(scaled, net);
}

SobolevReport sobolev_membership(const NetworkFunction& f, int j,
                                 const StarNetwork& net,
                                 const LambdaGridParams& params,
                                 ExecPolicy policy) {
  if (j < 0)
    throw OutsideDomain("sobolev_membership: order must be non-negative");
  AutoTransform at =
      transform_V_auto(f, net, params, 1e-10, static_cast<double>(j), policy);

  // Dyadic windows above the first threshold decide whether the weighted
  // transform keeps square-summable tails.
  const double base = net.a_max() + std::max(30.0, net.a_max() - net.a_min());
  std::vector<double> cuts{net.a_min(), base};
  while (cuts.back() < at.grid->lambda_max * (1.0 - 1e-12))
    cuts.push_back(net.a_max() + 2.0 * (cuts.back() - net.a_max()));

  SobolevReport rep;
  rep.window_mass.assign(cuts.size() - 1, 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < at.vf.values.size(); ++k) {
    const ComponentGrid& cg = at.grid->comp[k];
    for (std::size_t i = 0; i < cg.g.size(); ++i) {
      const double lam = cg.g.node[i];
      const double mass = cg.g.weight[i] * cg.sigma[i] *
                          std::pow(std::max(std::abs(lam), 1e-30),
                                   2.0 * static_cast<double>(j)) *
                          std::norm(at.vf.values[k][i]);
      total += mass;
      auto it = std::upper_bound(cuts.begin(), cuts.end(), lam);
      const auto bin = static_cast<std::size_t>(
          std::clamp<std::ptrdiff_t>(it - cuts.begin() - 1, 0,
                                     static_cast<std::ptrdiff_t>(
                                         rep.window_mass.size()) -
                                         1));
      rep.window_mass[bin] += mass;
    }
  }

  double tail_est = 0.0;
  bool finite = true;
  if (rep.window_mass.size() >= 2) {
    const double last = rep.window_mass[rep.window_mass.size() - 1];
    const double prev = rep.window_mass[rep.window_mass.size() - 2];
    if (last > 1e-30 * std::max(total, 1e-300)) {
      const double ratio = prev > 0.0 ? last / prev : 0.0;
      if (ratio < 0.75)
        tail_est = last * ratio / (1.0 - ratio);
      else
        finite = false;
    }
  }
  rep.finite = finite;
  rep.norm = std::sqrt(total + (finite ? tail_est : 0.0));
  rep.tail_fraction =
      total + tail_est > 0.0 ? tail_est / (total + tail_est) : 0.0;
  return rep;
}

}  // namespace starkg
