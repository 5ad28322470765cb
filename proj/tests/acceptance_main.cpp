// End-to-end acceptance battery.  Each numbered criterion prints exactly one
// PASS/FAIL line with its measured residuals, its tolerance, and its wall
// time; the process exits with the number of failed criteria.  Runtime
// budgets are part of the gate: a criterion that exceeds its budget fails
// even if the numbers are good.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "starkg/errors.hpp"
#include "starkg/evolution.hpp"
#include "starkg/fd_oracle.hpp"
#include "starkg/lambda_grid.hpp"
#include "starkg/netfunc.hpp"
#include "starkg/network.hpp"
#include "starkg/resolvent.hpp"
#include "starkg/spectral_kernel.hpp"
#include "starkg/spectral_measure.hpp"
#include "starkg/transform.hpp"

using namespace starkg;

namespace {

// ---------------------------------------------------------------------------
// Shared test data
// ---------------------------------------------------------------------------

double bump_shape(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

/// Compactly supported C-infinity bump with exact first and second
/// derivatives, so the operator can be applied analytically.
AnalyticRule bump_rule(double center, double width, cplx amp) {
  auto shape = [center, width](double x) -> double {
    return bump_shape((x - center) / width);
  };
  auto d_shape = [center, width, shape](double x) -> double {
    const double s = (x - center) / width;
    if (std::abs(s) >= 1.0) return 0.0;
    const double g = 1.0 - s * s;
    return shape(x) * (-2.0 * s / (g * g)) / width;
  };
  auto dd_shape = [center, width, shape](double x) -> double {
    const double s = (x - center) / width;
    if (std::abs(s) >= 1.0) return 0.0;
    const double g = 1.0 - s * s;
    const double t1 = -2.0 / (g * g) - 8.0 * s * s / (g * g * g) +
                      4.0 * s * s / (g * g * g * g);
    return shape(x) * t1 / (width * width);
  };
  AnalyticRule r;
  r.value = [shape, amp](double x) { return amp * shape(x); };
  r.d1 = [d_shape, amp](double x) { return amp * d_shape(x); };
  r.d2 = [dd_shape, amp](double x) { return amp * dd_shape(x); };
  return r;
}

AnalyticRule zero_rule() {
  AnalyticRule r;
  r.value = [](double) { return cplx(0.0, 0.0); };
  r.d1 = r.value;
  r.d2 = r.value;
  return r;
}

NetworkFunction three_bumps() {
  return NetworkFunction::analytic(
      {bump_rule(2.0, 1.0, cplx(1.0, 0.0)),
       bump_rule(1.5, 0.7, cplx(0.3, 0.7)),
       bump_rule(2.6, 0.8, cplx(-0.4, 0.2))},
      3.5);
}

std::string num(double v) {
  char b[40];
  std::snprintf(b, sizeof(b), "%.2e", v);
  return std::string(b);
}

// ---------------------------------------------------------------------------
// Harness
// ---------------------------------------------------------------------------

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void run(int id, const char* name, double budget_s,
         const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("threw: ") + e.what();
  }
  const double dt =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  const bool in_budget = dt < budget_s;
  const bool ok = out.pass && in_budget;
  if (!ok) ++g_failures;
  std::printf("%s %2d. %s — %s [%.1fs%s]\n", ok ? "PASS" : "FAIL", id, name,
              out.detail.c_str(), dt,
              in_budget ? "" : " OVER BUDGET");
  std::fflush(stdout);
}

// ---------------------------------------------------------------------------
// 1. Generalized eigenfunctions solve the equation and the vertex coupling.
// ---------------------------------------------------------------------------

Outcome criterion_eigenfunctions() {
  const StarNetwork net{{1.0, 1.5, 2.0}, {0.0, 4.0, 16.0}};
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> lam_d(-2.0, 40.0);
  std::uniform_real_distribution<double> x_d(0.0, 8.0);
  std::uniform_int_distribution<int> j_d(1, 3);

  double worst_ode = 0.0, worst_t0 = 0.0, worst_t1 = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    double lam = 0.0;
    for (;;) {
      lam = lam_d(rng);
      double dist = 1e300;
      for (double a : net.thresholds()) dist = std::min(dist, std::abs(lam - a));
      if (dist > 1e-2) break;
    }
    EigenfunctionSpec spec;
    spec.lambda = cplx(lam, 0.0);
    spec.j = j_d(rng);
    spec.sign = (trial % 2) ? 1 : -1;

    for (int k = 1; k <= 3; ++k) {
      for (int rep = 0; rep < 4; ++rep) {
        const NetworkPoint pt{k, x_d(rng)};
        const cplx F = eval_F(spec, pt, net);
        const cplx F2 = eval_F_dx(spec, pt, net, 2);
        const cplx defect =
            -net.c_at(k) * F2 + net.a_at(k) * F - spec.lambda * F;
        // Below a branch threshold the family grows like exp(kappa*x), so an
        // absolute defect would just measure rounding on huge cancelling
        // terms; the meaningful residual is relative to those terms.
        const double scale = std::max(
            {1.0, std::abs(spec.lambda * F), std::abs(net.c_at(k) * F2)});
        worst_ode = std::max(worst_ode, std::abs(defect) / scale);
      }
    }
    const cplx v0 = eval_F(spec, NetworkPoint{1, 0.0}, net);
    cplx dsum{0.0, 0.0};
    for (int k = 1; k <= 3; ++k) {
      worst_t0 = std::max(
          worst_t0, std::abs(eval_F(spec, NetworkPoint{k, 0.0}, net) - v0));
      dsum += net.c_at(k) * eval_F_dx(spec, NetworkPoint{k, 0.0}, net, 1);
    }
    worst_t1 = std::max(worst_t1, std::abs(dsum));
  }

  Outcome o;
  o.pass = worst_ode < 1e-10 && worst_t0 < 1e-12 && worst_t1 < 1e-12;
  o.detail = "50 random families: ode residual " + num(worst_ode) +
             " (<1e-10), vertex value " + num(worst_t0) + ", vertex flux " +
             num(worst_t1) + " (<1e-12)";
  return o;
}

// ---------------------------------------------------------------------------
// 2. Lower bound for |w|^2 on a (lambda, eps) grid, with its equality case.
// ---------------------------------------------------------------------------

Outcome criterion_wronskian_bound() {
  const StarNetwork net{{1.0, 1.5, 2.0}, {0.0, 4.0, 16.0}};
  const StarNetwork net2{{1.0, 1.0}, {0.0, 4.0}};

  // Equality anchor: at the threshold of a two-branch network the bound is
  // attained exactly.
  const double at4 = std::norm(wronskian_w(cplx(4.0, 0.0), -1, net2));
  const bool anchor_ok = std::abs(at4 - 4.0) < 1e-13;

  int violations = 0;
  double min_ratio = 1e300;
  for (int i = 0; i < 100; ++i) {
    const double lam = 0.2 + 40.0 * static_cast<double>(i) / 99.0;
    for (int j = 0; j < 100; ++j) {
      const double eps =
          (j == 0) ? 0.0
                   : std::pow(10.0, -8.0 + 9.0 * static_cast<double>(j - 1) / 98.0);
      const cplx z(lam, -eps);
      const double lhs = std::norm(wronskian_w(z, halfplane_sign(z), net));
      double rhs = 0.0;
      for (int k = 1; k <= net.n(); ++k)
        rhs += net.c_at(k) * std::abs(lam - net.a_at(k));
      if (lhs < rhs * (1.0 - 1e-12)) ++violations;
      if (rhs > 0.0) min_ratio = std::min(min_ratio, lhs / rhs);
    }
  }

  Outcome o;
  o.pass = anchor_ok && violations == 0;
  o.detail = "100x100 grid: " + std::to_string(violations) +
             " violations (slack 1e-12), min |w|^2/bound " + num(min_ratio) +
             ", equality case defect " + num(std::abs(at4 - 4.0));
  return o;
}

// ---------------------------------------------------------------------------
// 3. Kernel symmetry, conjugation and two-sided diagonal agreement.
// ---------------------------------------------------------------------------

Outcome criterion_kernel_symmetry() {
  const StarNetwork net{{1.0, 1.0, 2.0}, {0.0, 4.0, 16.0}};
  std::mt19937 rng(211);
  std::uniform_real_distribution<double> xs(0.0, 6.0);
  std::uniform_int_distribution<int> br(1, 3);
  std::uniform_real_distribution<double> lre(-3.0, 25.0);
  std::uniform_real_distribution<double> lim(0.05, 2.0);

  double worst_conj = 0.0, worst_sym = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const cplx lam(lre(rng), (trial % 2 ? 1.0 : -1.0) * lim(rng));
    const NetworkPoint p{br(rng), xs(rng)};
    const NetworkPoint q{br(rng), xs(rng)};
    const cplx k1 = kernel_K({p, q, lam}, net);
    const double scale = std::max(1.0, std::abs(k1));
    const cplx kc = kernel_K({p, q, std::conj(lam)}, net);
    worst_conj = std::max(worst_conj, std::abs(kc - std::conj(k1)) / scale);
    const cplx k2 = kernel_K({q, p, lam}, net);
    worst_sym = std::max(worst_sym, std::abs(k1 - k2) / scale);
  }

  // Approaching the diagonal from both sides exercises the two case formulas
  // of the factored kernel; their limits must agree.
  const std::vector<cplx> lams{cplx(2.0, 0.0), cplx(9.0, 0.0), cplx(21.0, 0.0),
                               cplx(7.3, -0.5), cplx(5.5, 0.9)};
  const double d = 1e-14;
  double worst_diag = 0.0;
  for (int trial = 0; trial < 250; ++trial) {
    const int k = br(rng);
    const double x = 0.3 + 4.7 * xs(rng) / 6.0;
    const cplx lam = lams[static_cast<std::size_t>(trial) % lams.size()];
    const cplx above = kernel_K({{k, x}, {k, x + d}, lam}, net);
    const cplx below = kernel_K({{k, x}, {k, x - d}, lam}, net);
    const cplx on = kernel_K({{k, x}, {k, x}, lam}, net);
    const double scale = std::max(1.0, std::abs(on));
    worst_diag = std::max(worst_diag, std::abs(above - below) / scale);
    worst_diag = std::max(worst_diag, std::abs(above - on) / scale);
  }

  Outcome o;
  o.pass = worst_conj < 1e-13 && worst_sym < 1e-12 && worst_diag < 1e-12;
  o.detail = "1000 queries: conjugation " + num(worst_conj) +
             " (<1e-13), symmetry " + num(worst_sym) +
             ", diagonal two-sided " + num(worst_diag) + " (<1e-12)";
  return o;
}

// ---------------------------------------------------------------------------
// 4. Limiting absorption: eps sweep and uniform kernel envelope.
// ---------------------------------------------------------------------------

Outcome criterion_limiting_absorption() {
  const StarNetwork net{{1.0, 1.0, 2.0}, {0.0, 4.0, 16.0}};
  std::mt19937 rng(307);
  std::uniform_real_distribution<double> xs(0.0, 4.0);
  std::uniform_int_distribution<int> br(1, 3);
  const double lam = 9.0;

  std::vector<KernelQuery> sample;
  sample.reserve(1000);
  for (int i = 0; i < 1000; ++i) {
    sample.push_back({NetworkPoint{br(rng), xs(rng)},
                      NetworkPoint{br(rng), xs(rng)}, cplx(lam, 0.0)});
  }
  const std::vector<double> eps{1e-2, 1e-4, 1e-6, 1e-8, 1e-10};
  const AbsorptionReport rep = check_limiting_absorption(lam, eps, sample, net);

  bool margins_ok = true;
  double worst_margin = 0.0;
  for (const AbsorptionRow& row : rep.rows) {
    worst_margin = std::max(worst_margin, row.envelope_margin);
    if (!(row.envelope_margin <= 1.0 + 1e-12)) margins_ok = false;
  }

  Outcome o;
  o.pass = rep.final_defect < 1e-8 && rep.defects_monotone && rep.envelope_ok &&
           margins_ok;
  o.detail = "defect at eps=1e-10: " + num(rep.final_defect) +
             " (<1e-8), monotone " + (rep.defects_monotone ? "yes" : "NO") +
             ", envelope margin " + num(worst_margin) + " (<=1)";
  return o;
}

// ---------------------------------------------------------------------------
// 5. Resolvent identity, analytic route and finite-difference oracle.
// ---------------------------------------------------------------------------

Outcome criterion_resolvent() {
  const StarNetwork net{{1.0, 1.0, 2.0}, {0.0, 4.0, 16.0}};
  const NetworkFunction f = NetworkFunction::analytic(
      {bump_rule(2.0, 1.0, cplx(1.0, 0.0)), bump_rule(1.5, 0.8, cplx(0.0, 0.6)),
       bump_rule(2.5, 1.2, cplx(-0.4, 0.2))},
      4.0);
  const cplx lam(6.0, -1.5);

  // Analytic route: the fourth-order five-point stencil keeps the
  // measurement noise of (lambda - A)u - f far below the 1e-6 target.
  const OutputGrid out{12.0, 5e-4};
  const NetworkFunction u = apply_resolvent(f, lam, net, out);
  double num_a = 0.0, den_a = 0.0;
  const double h = out.h;
  for (int k = 1; k <= 3; ++k) {
    const GridSamples& g = u.samples(k);
    for (std::size_t i = 2; i + 2 < g.values.size(); ++i) {
      const cplx dd = (-g.values[i - 2] + 16.0 * g.values[i - 1] -
                       30.0 * g.values[i] + 16.0 * g.values[i + 1] -
                       g.values[i + 2]) /
                      (12.0 * h * h);
      const cplx lhs = lam * g.values[i] -
                       (-net.c_at(k) * dd + net.a_at(k) * g.values[i]);
      const cplx rhs = f.eval(k, static_cast<double>(i) * h);
      num_a += std::norm(lhs - rhs) * h;
      den_a += std::norm(rhs) * h;
    }
  }
  const double rel_analytic = std::sqrt(num_a / den_a);

  // Finite-difference oracle: interior relative L2 agreement.
  const double hf = 1e-3;
  const NetworkFunction uh = apply_resolvent(f, lam, net, OutputGrid{10.0, hf});
  const NetworkFunction uo = oracle_resolvent(f, lam, net, FdGrid{30.0, hf});
  double num_f = 0.0, den_f = 0.0;
  for (int k = 1; k <= 3; ++k) {
    for (std::size_t i = 10; i <= 10000; i += 10) {
      const double x = static_cast<double>(i) * hf;
      const cplx a = uh.eval(k, x);
      const cplx b = uo.eval(k, x);
      num_f += std::norm(a - b);
      den_f += std::norm(b);
    }
  }
  const double rel_fd = std::sqrt(num_f / den_f);

  Outcome o;
  o.pass = rel_analytic < 1e-6 && rel_fd < 5e-3;
  o.detail = "analytic residual " + num(rel_analytic) +
             " (<1e-6), oracle interior L2 " + num(rel_fd) + " (<5e-3)";
  return o;
}

// ---------------------------------------------------------------------------
// 6. Closed-form imaginary-part case split against direct arithmetic.
// ---------------------------------------------------------------------------

Outcome criterion_case_formulas() {
  const StarNetwork net{{1.0, 1.0, 2.0}, {0.0, 4.0, 16.0}};
  const std::vector<double> xs{0.0, 0.4, 1.3, 2.6};
  double worst = 0.0;
  int checks = 0;
  for (double lam : {1.7, 9.0, 21.0}) {  // one lambda per band, p = 1, 2, 3
    const int p = net.band_index(lam);
    for (int j = 1; j <= 3; ++j) {
      for (int k = 1; k <= 3; ++k) {
        for (double x : xs) {
          for (double xp : xs) {
            const double direct = im_kernel_direct(j, k, x, xp, lam, net);
            const double cased = im_kernel_case(j, k, p, x, xp, lam, net);
            worst = std::max(worst, std::abs(direct - cased));
            ++checks;
          }
        }
      }
    }
  }
  // Below the spectrum the boundary kernel is real: both routes are zero.
  const double below = std::abs(im_kernel_direct(1, 2, 0.5, 0.8, -2.0, net)) +
                       std::abs(im_kernel_case(1, 2, 0, 0.5, 0.8, -2.0, net));

  Outcome o;
  o.pass = worst < 1e-12 && below == 0.0;
  o.detail = std::to_string(checks) + " point checks over 3 bands: worst " +
             num(worst) + " (<1e-12), below-spectrum leak " + num(below);
  return o;
}

// ---------------------------------------------------------------------------
// 7. Weight uniqueness, coefficient systems and projection routes.
// ---------------------------------------------------------------------------

Outcome criterion_weights() {
  const StarNetwork net{{1.0, 1.0, 2.0}, {0.0, 4.0, 16.0}};

  double worst_dm = 0.0, worst_ind = 0.0;
  for (double lam : {1.0, 3.3, 6.0, 11.5, 18.0, 40.0}) {
    const WeightMatrix diag = weights_diagonal(lam, net);
    const WeightMatrix qa = weights_matrix(lam, {0.7, 1.05}, net);
    const WeightMatrix qb = weights_matrix(lam, {0.31, 0.89}, net);
    for (int l = 1; l <= 3; ++l) {
      for (int m = 1; m <= 3; ++m) {
        worst_dm = std::max(worst_dm, std::abs(qa.at(l, m) - diag.at(l, m)));
        worst_ind = std::max(worst_ind, std::abs(qa.at(l, m) - qb.at(l, m)));
      }
    }
  }

  double worst_sys = 0.0;
  for (double lam : {0.9, 2.5, 5.5, 10.0, 30.0}) {
    worst_sys = std::max(worst_sys, verify_weight_systems(lam, net).max_residual);
  }

  // The two projection formulas must produce the same window projection.
  const NetworkFunction f = NetworkFunction::analytic(
      {bump_rule(2.0, 1.0, cplx(1.0, 0.0)), bump_rule(1.5, 0.8, cplx(0.0, 0.6)),
       bump_rule(2.5, 1.2, cplx(-0.4, 0.2))},
      4.0);
  const OutputGrid out{8.0, 0.02};
  const NetworkFunction sym =
      projection_E(0.8, 3.2, f, net, ProjectionFormula::symmetric, out);
  const NetworkFunction cyc =
      projection_E(0.8, 3.2, f, net, ProjectionFormula::cyclic, out);
  double num_p = 0.0, den_p = 0.0;
  for (int k = 1; k <= 3; ++k) {
    const GridSamples& gs = sym.samples(k);
    const GridSamples& gc = cyc.samples(k);
    for (std::size_t i = 0; i < gs.values.size(); ++i) {
      num_p += std::norm(gs.values[i] - gc.values[i]);
      den_p += std::norm(gs.values[i]);
    }
  }
  const double rel_proj = std::sqrt(num_p / den_p);

  Outcome o;
  o.pass = worst_dm < 1e-10 && worst_ind < 1e-10 && worst_sys < 1e-12 &&
           rel_proj < 1e-3;
  o.detail = "matrix vs diagonal " + num(worst_dm) +
             ", sampling independence " + num(worst_ind) +
             " (<1e-10), systems " + num(worst_sys) +
             " (<1e-12), cyclic vs symmetric " + num(rel_proj) + " (<1e-3)";
  return o;
}

// ---------------------------------------------------------------------------
// 8. Plancherel identity with the fixed normalization, window mass vs oracle.
// ---------------------------------------------------------------------------

Outcome criterion_plancherel() {
  const StarNetwork net{{1.0, 1.5, 2.0}, {0.0, 4.0, 16.0}};

  std::vector<NetworkFunction> fs;
  fs.push_back(NetworkFunction::analytic(
      {bump_rule(2.0, 1.0, cplx(1.0, 0.0)), zero_rule(), zero_rule()}, 3.2));
  fs.push_back(NetworkFunction::analytic(
      {zero_rule(), bump_rule(1.5, 0.7, cplx(0.3, 0.7)), zero_rule()}, 3.2));
  fs.push_back(three_bumps());
  fs.push_back(NetworkFunction::analytic(
      {bump_rule(1.2, 0.45, cplx(0.8, 0.0)), zero_rule(),
       bump_rule(2.8, 0.5, cplx(0.0, -0.4))},
      3.4));
  {
    const double hs = 0.005;
    std::vector<GridSamples> parts(3);
    for (int k = 1; k <= 3; ++k) {
      std::vector<cplx> v;
      for (double x = 0.0; x <= 4.0 + 0.5 * hs; x += hs) {
        if (k == 1)
          v.push_back(cplx(bump_shape((x - 1.5) / 1.0), 0.0));
        else if (k == 2)
          v.push_back(cplx(0.5 * bump_shape((x - 2.2) / 0.9), 0.0));
        else
          v.push_back(cplx(0.0, 0.0));
      }
      parts[static_cast<std::size_t>(k - 1)] = GridSamples{hs, std::move(v)};
    }
    fs.push_back(NetworkFunction::sampled(std::move(parts)));
  }

  double worst = 0.0;
  for (const NetworkFunction& f : fs) {
    const AutoTransform at = transform_V_auto(f, net, {}, 1e-10);
    const double m = norm_sigma(at.vf, net);
    const double nf = norm_H(f, net);
    worst = std::max(worst, std::abs(nf * nf - m * m) / (nf * nf));
  }

  // The normalization is a compile-time constant, not a fitted value.
  const double kappa_defect = std::abs(kSpectralNormalization * M_PI - 1.0);

  // Window mass against the truncated-operator oracle on (0.5, 3.5).
  const NetworkFunction& f1 = fs.front();
  LambdaGridParams wp;
  wp.x_scale = 8.0;
  const LambdaGrid wg = build_window_grid(net, 0.5, 3.5, wp);
  const std::vector<cplx> vals = transform_V_component(f1, 1, wg.node, net);
  double m_spec = 0.0;
  for (std::size_t i = 0; i < wg.size(); ++i) {
    m_spec += wg.weight[i] * sigma_weight(wg.node[i], 1, net) *
              std::norm(vals[i]);
  }
  const SpectralSample sam =
      oracle_spectral_density(f1, net, FdGrid{60.0, 5e-3}, 500);
  const double m_fd = window_mass(sam, 0.5, 3.5);
  const double rel_window = std::abs(m_spec - m_fd) / m_spec;

  Outcome o;
  o.pass = worst < 1e-4 && kappa_defect < 1e-15 && rel_window < 2e-2;
  o.detail = "5 functions: worst norm defect " + num(worst) +
             " (<1e-4), normalization*pi-1 = " + num(kappa_defect) +
             ", window mass vs oracle " + num(rel_window) + " (<2e-2)";
  return o;
}

// ---------------------------------------------------------------------------
// 9. Diagonalization of the operator and the domain norm identity.
// ---------------------------------------------------------------------------

Outcome criterion_diagonalization() {
  const StarNetwork net{{1.0, 1.5, 2.0}, {0.0, 4.0, 16.0}};
  // Wide bumps: the norm identity needs the weighted spectral tail to be
  // resolvable before the lambda-doubling cap, and the tail of a bump
  // narrower than ~1 decays too slowly for the final geometric estimate.
  const NetworkFunction f = NetworkFunction::analytic(
      {bump_rule(2.0, 1.4, cplx(1.0, 0.0)), bump_rule(2.0, 1.3, cplx(0.3, 0.7)),
       bump_rule(2.2, 1.2, cplx(-0.4, 0.2))},
      3.5);
  LambdaGridParams gp;
  gp.x_scale = 8.0;

  const AutoTransform at = transform_V_auto(f, net, gp, 1e-10);
  const NetworkFunction Af = apply_A(f, net);
  const SpectralFunction vaf = transform_V(Af, at.grid, net);

  double worst = 0.0;
  for (std::size_t k = 0; k < vaf.values.size(); ++k) {
    const auto& nodes = at.grid->comp[k].g.node;
    for (std::size_t i = 0; i < vaf.values[k].size(); ++i) {
      const double lam = nodes[i];
      worst = std::max(worst,
                       std::abs(vaf.values[k][i] - lam * at.vf.values[k][i]) /
                           (1.0 + lam));
    }
  }

  const double n_af = norm_H(Af, net);
  const SobolevReport s1 = sobolev_membership(f, 1, net, gp);
  const double rel_norm = std::abs(s1.norm - n_af) / n_af;

  Outcome o;
  o.pass = worst < 1e-6 && s1.finite && rel_norm < 1e-3;
  o.detail = "V(Af) vs lambda*Vf: " + num(worst) +
             " (<1e-6), weighted norm vs ||Af||: " + num(rel_norm) +
             " (<1e-3)";
  return o;
}

// ---------------------------------------------------------------------------
// 10. Dynamics: d'Alembert limit, energy conservation, oracle agreement.
// ---------------------------------------------------------------------------

Outcome criterion_dynamics() {
  const StarNetwork line{{1.0, 1.0}, {0.0, 0.0}};
  const NetworkFunction u0 = NetworkFunction::analytic(
      {bump_rule(2.0, 1.0, cplx(1.0, 0.0)), zero_rule()}, 3.0);
  const NetworkFunction v0 = NetworkFunction::zero(2);

  EvolveParams p;
  p.out = OutputGrid{16.0, 0.004};
  const std::vector<double> times{0.0, 2.5, 5.0, 7.5, 10.0};
  const std::vector<WaveState> states = evolve_many(u0, v0, times, line, p);

  // Two equal branches form the free string; d'Alembert is exact at t = 5.
  const double t = 5.0;
  auto g_line = [](double y) { return bump_shape(-y - 2.0); };
  double sup_dal = 0.0;
  for (double y : {-7.6, -7.0, -6.4, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0,
                   6.4, 7.0, 7.6}) {
    const double exact = 0.5 * (g_line(y - t) + g_line(y + t));
    const cplx got = y < 0.0 ? states[2].u.eval(1, -y) : states[2].u.eval(2, y);
    sup_dal = std::max(sup_dal, std::abs(got - cplx(exact, 0.0)));
  }

  double e0 = 0.0, drift = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double e = wave_energy(states[i], line);
    if (i == 0)
      e0 = e;
    else
      drift = std::max(drift, std::abs(e - e0) / e0);
  }

  // Truncated finite-difference propagation, dense functional calculus.
  const OracleWave ow = oracle_evolve(u0, v0, t, line, FdGrid{12.0, 0.01});
  double sup_fd = 0.0;
  for (int k = 1; k <= 2; ++k) {
    for (double x = 0.0; x <= 8.5; x += 0.05) {
      sup_fd = std::max(sup_fd,
                        std::abs(states[2].u.eval(k, x) - ow.u.eval(k, x)));
    }
  }

  Outcome o;
  o.pass = sup_dal < 1e-2 && drift < 1e-4 && sup_fd < 1e-2;
  o.detail = "d'Alembert sup " + num(sup_dal) + " (<1e-2), energy drift " +
             num(drift) + " (<1e-4), oracle sup " + num(sup_fd) + " (<1e-2)";
  return o;
}

// ---------------------------------------------------------------------------
// 11. Tunnel effect: fitted spatial decay rate inside the predicted interval.
// ---------------------------------------------------------------------------

Outcome criterion_tunnel() {
  const StarNetwork net{{1.0, 1.0, 1.0}, {0.0, 4.0, 16.0}};
  // A bump hugging the vertex keeps the gap-band spectral weight
  // single-signed (the reflection coefficient is purely imaginary there), so
  // the decay fit measures a genuine weighted mean of the band's rates
  // instead of an interference transient.
  const NetworkFunction u0 = NetworkFunction::analytic(
      {bump_rule(1.0, 0.8, cplx(1.0, 0.0)), zero_rule(), zero_rule()}, 2.0);

  const TunnelProfile prof = tunnel_decay_profile(1.0, 3.0, 3, u0, net, {});
  const double lo = std::sqrt(13.0);
  const double hi = std::sqrt(15.0);
  const bool edges_ok = std::abs(prof.rate_lo - lo) < 1e-12 &&
                        std::abs(prof.rate_hi - hi) < 1e-12;

  Outcome o;
  o.pass = edges_ok && prof.x.size() >= 6 &&
           prof.fitted_rate > lo * 0.95 && prof.fitted_rate < hi * 1.05;
  o.detail = "fitted rate " + num(prof.fitted_rate) + " in [" + num(lo) +
             ", " + num(hi) + "] +-5%, " + std::to_string(prof.x.size()) +
             " fit points";
  return o;
}

}  // namespace

int main() {
  std::printf("acceptance battery: 11 criteria\n");
  run(1, "generalized eigenfunctions", 5.0, criterion_eigenfunctions);
  run(2, "wronskian lower bound", 5.0, criterion_wronskian_bound);
  run(3, "kernel symmetry and diagonal", 10.0, criterion_kernel_symmetry);
  run(4, "limiting absorption", 30.0, criterion_limiting_absorption);
  run(5, "resolvent identity", 120.0, criterion_resolvent);
  run(6, "imaginary-part case formulas", 10.0, criterion_case_formulas);
  run(7, "weight uniqueness and projections", 60.0, criterion_weights);
  run(8, "plancherel and window mass", 180.0, criterion_plancherel);
  run(9, "diagonalization and domain norm", 60.0, criterion_diagonalization);
  run(10, "wave dynamics", 180.0, criterion_dynamics);
  run(11, "tunnel decay rate", 120.0, criterion_tunnel);
  std::printf("%d/11 criteria passed\n", 11 - g_failures);
  return g_failures;
}
