#include "starkg/spectral_kernel.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace starkg {

cplx conv_sqrt(cplx z) {
  if (z.imag() == 0.0 && z.real() < 0.0) {
    // arg = pi is excluded: approach the cut from below, giving -i sqrt(r)
    return {0.0, -std::sqrt(-z.real())};
  }
  return std::sqrt(z);
}

cplx xi(cplx lambda, int k, const StarNetwork& net) {
  return conv_sqrt((lambda - net.a_at(k)) / net.c_at(k));
}

double xi_decay_rate(double lambda, int k, const StarNetwork& net) {
  if (!(lambda < net.a_at(k))) {
    throw BandOutsideGap("xi_decay_rate: branch " + std::to_string(k) +
                         " is not evanescent at lambda = " + std::to_string(lambda));
  }
  return std::sqrt((net.a_at(k) - lambda) / net.c_at(k));
}

cplx s_coeff(cplx lambda, int j, const StarNetwork& net) {
  const cplx xij = xi(lambda, j, net);
  if (xij == cplx{0.0, 0.0}) {
    throw ThresholdSingularity("s_coeff: xi vanishes on branch " + std::to_string(j) +
                               " (lambda at threshold)");
  }
  cplx others{0.0, 0.0};
  for (int l = 1; l <= net.n(); ++l) {
    if (l == j) continue;
    others += net.c_at(l) * xi(lambda, l, net);
  }
  return -others / (net.c_at(j) * xij);
}

cplx wronskian_w(cplx lambda, int sign, const StarNetwork& net) {
  cplx sum{0.0, 0.0};
  for (int k = 1; k <= net.n(); ++k) sum += net.c_at(k) * xi(lambda, k, net);
  return cplx{0.0, static_cast<double>(sign)} * sum;
}

int halfplane_sign(cplx lambda) { return lambda.imag() > 0.0 ? +1 : -1; }

namespace {

cplx trig_component(cplx lambda, int j, int sign, double x,
                    const StarNetwork& net, int order) {
  const cplx xij = xi(lambda, j, net);
  const cplx sj = s_coeff(lambda, j, net);
  const cplx is{0.0, static_cast<double>(sign)};
  const cplx cx = std::cos(xij * x);
  const cplx sx = std::sin(xij * x);
  switch (order) {
    case 0:
      return cx + is * sj * sx;
    case 1:
      return xij * (-sx + is * sj * cx);
    default:
      return -xij * xij * (cx + is * sj * sx);
  }
}

cplx exp_component(cplx lambda, int k, int sign, double x,
                   const StarNetwork& net, int order) {
  const cplx xik = xi(lambda, k, net);
  const cplx arg = cplx{0.0, static_cast<double>(sign)} * xik;
  cplx val = std::exp(arg * x);
  for (int d = 0; d < order; ++d) val *= arg;
  return val;
}

}  // namespace

cplx eval_F_dx(const EigenfunctionSpec& spec, const NetworkPoint& pt,
               const StarNetwork& net, int order) {
  validate_network(net);
  validate_point(pt, net);
  if (spec.j < 1 || spec.j > net.n()) {
    throw UnknownBranch("eval_F: distinguished branch " + std::to_string(spec.j));
  }
  if (spec.sign != 1 && spec.sign != -1) {
    throw OutsideDomain("eval_F: sign must be +1 or -1");
  }
  if (pt.branch == spec.j) {
    return trig_component(spec.lambda, spec.j, spec.sign, pt.x, net, order);
  }
  return exp_component(spec.lambda, pt.branch, spec.sign, pt.x, net, order);
}

cplx eval_F(const EigenfunctionSpec& spec, const NetworkPoint& pt,
            const StarNetwork& net) {
  return eval_F_dx(spec, pt, net, 0);
}

NetworkFunction make_eigenfunction(const EigenfunctionSpec& spec,
                                   const StarNetwork& net,
                                   double support_radius) {
  validate_network(net);
  std::vector<AnalyticRule> rules(static_cast<std::size_t>(net.n()));
  for (int k = 1; k <= net.n(); ++k) {
    AnalyticRule& r = rules[static_cast<std::size_t>(k) - 1];
    for (int order = 0; order <= 2; ++order) {
      auto fn = [spec, net, k, order](double x) {
        return eval_F_dx(spec, NetworkPoint{k, x}, net, order);
      };
      if (order == 0) r.value = fn;
      if (order == 1) r.d1 = fn;
      if (order == 2) r.d2 = fn;
    }
  }
  return NetworkFunction::analytic(std::move(rules), support_radius);
}

double bound_M(double lambda, double delta, const StarNetwork& net) {
  validate_network(net);
  const int n = net.n();
  if (net.a_min() == net.a_max()) {
    // equal potentials: every |s_j| is constant in lambda
    double best = 0.0;
    for (int j = 1; j <= n; ++j) {
      double sum = 0.0;
      for (int k = 1; k <= n; ++k) {
        if (k != j) sum += std::sqrt(net.c_at(k));
      }
      best = std::max(best, sum / std::sqrt(net.c_at(j)));
    }
    return best;
  }
  if (net.at_threshold(lambda)) return std::numeric_limits<double>::infinity();
  double inv = 0.0;
  for (int j = 1; j <= n; ++j) {
    inv = std::max(inv, 1.0 / std::sqrt(net.c_at(j) * std::abs(lambda - net.a_at(j))));
  }
  double sum = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double d = lambda - net.a_at(k);
    sum += std::sqrt(net.c_at(k)) * std::pow(d * d + delta * delta, 0.25);
  }
  return inv * sum;
}

EnvelopeBounds bound_N_gamma(double lambda, double delta, const StarNetwork& net) {
  validate_network(net);
  EnvelopeBounds b;
  double denom = 0.0;
  for (int j = 1; j <= net.n(); ++j) {
    denom += net.c_at(j) * std::abs(lambda - net.a_at(j));
  }
  const double m = bound_M(lambda, delta, net);
  b.N = (denom > 0.0 && std::isfinite(m))
            ? (1.0 + m) / std::sqrt(denom)
            : std::numeric_limits<double>::infinity();
  double cmin = net.c.front();
  for (double ck : net.c) cmin = std::min(cmin, ck);
  const double spread = net.a_max() - net.a_min();
  const double top = std::max(
      {std::pow(spread * spread + delta * delta, 0.25), 1.0, delta});
  b.gamma = top / std::sqrt(cmin);
  return b;
}

}  // namespace starkg
