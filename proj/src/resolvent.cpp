#include "starkg/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace starkg {

namespace {

cplx checked_w(cplx lambda, int sign, const StarNetwork& net) {
  const cplx w = wronskian_w(lambda, sign, net);
  double scale = 0.0;
  for (int k = 1; k <= net.n(); ++k) {
    scale += net.c_at(k) * std::abs(xi(lambda, k, net));
  }
  if (!(std::abs(w) > 1e-14 * scale) || scale == 0.0) {
    std::ostringstream os;
    os << "kernel normalizer vanishes at lambda = (" << lambda.real() << ", "
       << lambda.imag() << ")";
    throw WronskianZero(os.str());
  }
  return w;
}

// trig factor attached to the branch of x: cos(xi_j u) + sign i s_j sin(xi_j u)
cplx trig_factor(cplx lambda, int j, int sign, double u, const StarNetwork& net) {
  const cplx xij = xi(lambda, j, net);
  const cplx sj = s_coeff(lambda, j, net);
  return std::cos(xij * u) +
         cplx{0.0, static_cast<double>(sign)} * sj * std::sin(xij * u);
}

cplx exp_factor(cplx lambda, int k, int sign, double u, const StarNetwork& net) {
  const cplx arg = cplx{0.0, static_cast<double>(sign)} * xi(lambda, k, net);
  return std::exp(arg * u);
}

}  // namespace

cplx kernel_K_partner(const KernelQuery& q, int partner, const StarNetwork& net) {
  validate_network(net);
  validate_point(q.x, net);
  validate_point(q.x_prime, net);
  const int j = q.x.branch;
  if (partner == j || partner < 1 || partner > net.n()) {
    throw UnknownBranch("kernel partner family must be a branch different from " +
                        std::to_string(j));
  }
  const int sign = halfplane_sign(q.lambda);
  const cplx w = checked_w(q.lambda, sign, net);

  // The partner family F^{sign, partner} restricted to branch j is the pure
  // exponential for every partner != j, so the value below is partner-free.
  (void)partner;

  if (q.x_prime.branch == j && q.x_prime.x > q.x.x) {
    return trig_factor(q.lambda, j, sign, q.x.x, net) *
           exp_factor(q.lambda, j, sign, q.x_prime.x, net) / w;
  }
  const cplx at_x = exp_factor(q.lambda, j, sign, q.x.x, net);
  const EigenfunctionSpec fspec{q.lambda, j, sign};
  return at_x * eval_F(fspec, q.x_prime, net) / w;
}

cplx kernel_K(const KernelQuery& q, const StarNetwork& net) {
  const int partner = q.x.branch == net.n() ? 1 : q.x.branch + 1;
  return kernel_K_partner(q, partner, net);
}

namespace {

// integral of weight(x') * f_k(x') over [lo, hi], refined so each Gauss panel
// spans at most max_width and at most ~0.8 radians of the oscillation/decay
// scale of weight
cplx weighted_piece(const NetworkFunction& f, int k, double lo, double hi,
                    double xi_mag, const std::function<cplx(double)>& weight,
                    const GaussRule& rule, double max_width) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {0.0, 0.0};
  const int pieces = std::max(
      1, static_cast<int>(std::ceil(std::max(xi_mag * span / 0.8, span / max_width))));
  cplx acc{0.0, 0.0};
  for (int p = 0; p < pieces; ++p) {
    const double a = lo + span * p / pieces;
    const double b = lo + span * (p + 1) / pieces;
    auto g = [&](double x) { return weight(x) * f.eval(k, x); };
    acc += gauss_panel(g, a, b, rule);
  }
  return acc;
}

}  // namespace

NetworkFunction apply_resolvent(const NetworkFunction& f, cplx lambda,
                                const StarNetwork& net, const OutputGrid& out) {
  validate_network(net);
  if (f.branches() != net.n()) {
    throw TooFewBranches("apply_resolvent: component count mismatch");
  }
  if (!f.compact()) {
    throw NonCompactSupport("apply_resolvent: f must be compactly supported");
  }
  if (lambda.imag() == 0.0 && lambda.real() >= net.a_min()) {
    std::ostringstream os;
    os << "lambda = " << lambda.real() << " lies in the spectrum [" << net.a_min()
       << ", inf)";
    throw SpectrumPoint(os.str());
  }
  if (!(out.L > 0.0) || !(out.h > 0.0)) {
    throw BadGrid("apply_resolvent: output grid needs L > 0, h > 0");
  }
  const auto m = static_cast<std::size_t>(std::llround(out.L / out.h));
  if (m < 4 || std::abs(out.L / out.h - static_cast<double>(m)) > 1e-9) {
    throw BadGrid("apply_resolvent: L must be an integer multiple (>= 4) of h");
  }

  const int sign = halfplane_sign(lambda);
  const cplx w = checked_w(lambda, sign, net);
  const double radius = f.support_radius();
  const int n = net.n();

  // full-branch integrals of the exponential family against f
  const GaussRule& wide_rule = gauss_legendre(15);
  std::vector<cplx> total(static_cast<std::size_t>(n));
  std::vector<double> xi_mag(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    xi_mag[static_cast<std::size_t>(k) - 1] = std::abs(xi(lambda, k, net));
    auto ek = [&, k](double x) { return exp_factor(lambda, k, sign, x, net); };
    total[static_cast<std::size_t>(k) - 1] = weighted_piece(
        f, k, 0.0, radius, xi_mag[static_cast<std::size_t>(k) - 1], ek, wide_rule,
        0.25);
  }
  cplx grand_total{0.0, 0.0};
  for (const cplx& t : total) grand_total += t;

  const GaussRule& step_rule = gauss_legendre(7);
  std::vector<GridSamples> result(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) {
    auto ej = [&, j](double x) { return exp_factor(lambda, j, sign, x, net); };
    auto gj = [&, j](double x) { return trig_factor(lambda, j, sign, x, net); };
    const double xm = xi_mag[static_cast<std::size_t>(j) - 1];

    GridSamples g;
    g.h = out.h;
    g.values.resize(m + 1);

    // Tail integrals of E_j f over [x_i, radius].  These decay exponentially
    // while the trig family they multiply grows at the conjugate rate, so
    // each tail must be accurate relative to its own size.  Accumulating
    // from the far end inward achieves that; computing the tail as the full
    // integral minus a running prefix would leave a fixed absolute residue
    // that the trig factor amplifies into garbage past the support.
    std::vector<cplx> tail_e(m + 1, cplx{0.0, 0.0});
    if (radius > out.L) {
      tail_e[m] = weighted_piece(f, j, out.L, radius, xm, ej, step_rule, 0.1);
    }
    for (std::size_t i = m; i-- > 0;) {
      const double lo = out.h * static_cast<double>(i);
      const double hi = std::min(out.h * static_cast<double>(i + 1), radius);
      tail_e[i] = tail_e[i + 1];
      if (hi > lo) {
        tail_e[i] += weighted_piece(f, j, lo, hi, xm, ej, step_rule, 0.1);
      }
    }

    cplx cum_g{0.0, 0.0};  // integral of G_j f over [0, x_i]
    const cplx others = grand_total - total[static_cast<std::size_t>(j) - 1];
    for (std::size_t i = 0; i <= m; ++i) {
      const double x = out.h * static_cast<double>(i);
      if (i > 0) {
        const double lo = out.h * static_cast<double>(i - 1);
        const double hi = std::min(x, radius);
        if (hi > lo) {
          cum_g += weighted_piece(f, j, lo, hi, xm, gj, step_rule, 0.1);
        }
      }
      g.values[i] = (gj(x) * tail_e[i] + ej(x) * (cum_g + others)) / w;
    }
    result[static_cast<std::size_t>(j) - 1] = std::move(g);
  }
  return NetworkFunction::sampled(std::move(result));
}

AbsorptionReport check_limiting_absorption(double lambda,
                                           std::vector<double> eps_sequence,
                                           const std::vector<KernelQuery>& sample,
                                           const StarNetwork& net) {
  validate_network(net);
  if (eps_sequence.empty() || sample.empty()) {
    throw OutsideDomain("check_limiting_absorption: empty eps sequence or sample");
  }
  std::sort(eps_sequence.begin(), eps_sequence.end(), std::greater<>());
  const double delta = eps_sequence.front();

  AbsorptionReport report;
  report.envelope = bound_N_gamma(lambda, delta, net);

  std::vector<cplx> boundary(sample.size());
  double margin0 = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    KernelQuery q = sample[i];
    q.lambda = cplx{lambda, 0.0};
    boundary[i] = kernel_K(q, net);
    const double env = report.envelope.N *
                       std::exp(report.envelope.gamma * (q.x.x + q.x_prime.x));
    margin0 = std::max(margin0, std::abs(boundary[i]) / env);
  }

  bool monotone = true;
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : eps_sequence) {
    AbsorptionRow row;
    row.eps = eps;
    for (std::size_t i = 0; i < sample.size(); ++i) {
      KernelQuery q = sample[i];
      q.lambda = cplx{lambda, -eps};
      const cplx val = kernel_K(q, net);
      row.max_defect = std::max(row.max_defect, std::abs(val - boundary[i]));
      const double env = report.envelope.N *
                         std::exp(report.envelope.gamma * (q.x.x + q.x_prime.x));
      row.envelope_margin = std::max(row.envelope_margin, std::abs(val) / env);
    }
    row.envelope_margin = std::max(row.envelope_margin, margin0);
    monotone = monotone && row.max_defect <= prev * (1.0 + 1e-12);
    prev = row.max_defect;
    report.rows.push_back(row);
  }
  report.final_defect = report.rows.back().max_defect;
  report.defects_monotone = monotone;
  report.envelope_ok = true;
  for (const AbsorptionRow& r : report.rows) {
    report.envelope_ok = report.envelope_ok && r.envelope_margin <= 1.0 + 1e-12;
  }
  return report;
}

}  // namespace starkg
