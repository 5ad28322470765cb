#include "starkg/netfunc.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace starkg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

cplx grid_eval(const GridSamples& g, double x) {
  const std::size_t m = g.values.size();
  if (m == 0 || g.h <= 0.0 || x < 0.0) return {0.0, 0.0};
  const double idx = x / g.h;
  const double last = static_cast<double>(m - 1);
  if (idx > last + 1e-9) return {0.0, 0.0};
  const long nearest = std::lround(idx);
  if (std::abs(idx - static_cast<double>(nearest)) < 1e-9 && nearest >= 0 &&
      nearest <= static_cast<long>(m - 1)) {
    return g.values[static_cast<std::size_t>(nearest)];
  }
  if (m < 4) {  // linear fallback for stub grids
    const long i = std::min<long>(static_cast<long>(idx), static_cast<long>(m - 2));
    const double t = idx - static_cast<double>(i);
    return (1.0 - t) * g.values[static_cast<std::size_t>(i)] +
           t * g.values[static_cast<std::size_t>(i) + 1];
  }
  long i0 = static_cast<long>(std::floor(idx)) - 1;
  i0 = std::clamp<long>(i0, 0, static_cast<long>(m - 4));
  const double t = idx - static_cast<double>(i0);
  const cplx v0 = g.values[static_cast<std::size_t>(i0)];
  const cplx v1 = g.values[static_cast<std::size_t>(i0) + 1];
  const cplx v2 = g.values[static_cast<std::size_t>(i0) + 2];
  const cplx v3 = g.values[static_cast<std::size_t>(i0) + 3];
  const double l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
  const double l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
  const double l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
  const double l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
  return l0 * v0 + l1 * v1 + l2 * v2 + l3 * v3;
}

cplx grid_deriv(const GridSamples& g, double x, int order) {
  const std::size_t m = g.values.size();
  if (m < 4 || g.h <= 0.0) return {0.0, 0.0};
  const double idx = x / g.h;
  const double last = static_cast<double>(m - 1);
  if (idx > last + 1e-9 || x < 0.0) return {0.0, 0.0};
  long i0 = static_cast<long>(std::floor(idx)) - 1;
  i0 = std::clamp<long>(i0, 0, static_cast<long>(m - 4));
  const double t = idx - static_cast<double>(i0);
  const cplx v0 = g.values[static_cast<std::size_t>(i0)];
  const cplx v1 = g.values[static_cast<std::size_t>(i0) + 1];
  const cplx v2 = g.values[static_cast<std::size_t>(i0) + 2];
  const cplx v3 = g.values[static_cast<std::size_t>(i0) + 3];
  if (order == 1) {
    const double d0 = -(3.0 * t * t - 12.0 * t + 11.0) / 6.0;
    const double d1 = (3.0 * t * t - 10.0 * t + 6.0) / 2.0;
    const double d2 = -(3.0 * t * t - 8.0 * t + 3.0) / 2.0;
    const double d3 = (3.0 * t * t - 6.0 * t + 2.0) / 6.0;
    return (d0 * v0 + d1 * v1 + d2 * v2 + d3 * v3) / g.h;
  }
  const double s0 = -(t - 2.0);
  const double s1 = 3.0 * t - 5.0;
  const double s2 = -(3.0 * t - 4.0);
  const double s3 = t - 1.0;
  return (s0 * v0 + s1 * v1 + s2 * v2 + s3 * v3) / (g.h * g.h);
}

}  // namespace

NetworkFunction NetworkFunction::zero(int branches) {
  std::vector<AnalyticRule> rules(static_cast<std::size_t>(branches));
  for (auto& r : rules) {
    r.value = [](double) { return cplx{0.0, 0.0}; };
    r.d1 = r.value;
    r.d2 = r.value;
  }
  return analytic(std::move(rules), 0.0);
}

NetworkFunction NetworkFunction::analytic(std::vector<AnalyticRule> rules,
                                          double support_radius) {
  NetworkFunction f;
  f.comp_.assign(rules.begin(), rules.end());
  f.support_radius_ = support_radius;
  return f;
}

NetworkFunction NetworkFunction::analytic_decaying(std::vector<AnalyticRule> rules,
                                                   DecayCertificate tail) {
  NetworkFunction f;
  f.comp_.assign(rules.begin(), rules.end());
  f.support_radius_ = kInf;
  f.tail_ = tail;
  return f;
}

NetworkFunction NetworkFunction::sampled(std::vector<GridSamples> grids) {
  NetworkFunction f;
  double radius = 0.0;
  for (const auto& g : grids) radius = std::max(radius, g.length());
  f.comp_.assign(std::make_move_iterator(grids.begin()),
                 std::make_move_iterator(grids.end()));
  f.support_radius_ = radius;
  return f;
}

bool NetworkFunction::is_sampled(int k) const {
  return std::holds_alternative<GridSamples>(comp_[static_cast<std::size_t>(k) - 1]);
}

const GridSamples& NetworkFunction::samples(int k) const {
  return std::get<GridSamples>(comp_[static_cast<std::size_t>(k) - 1]);
}

const AnalyticRule& NetworkFunction::rule(int k) const {
  return std::get<AnalyticRule>(comp_[static_cast<std::size_t>(k) - 1]);
}

cplx NetworkFunction::eval(int k, double x) const {
  if (k < 1 || k > branches()) {
    throw UnknownBranch("eval: branch " + std::to_string(k));
  }
  const Component& c = comp_[static_cast<std::size_t>(k) - 1];
  if (const auto* g = std::get_if<GridSamples>(&c)) return grid_eval(*g, x);
  if (compact() && x > support_radius_) return {0.0, 0.0};
  return std::get<AnalyticRule>(c).value(x);
}

cplx NetworkFunction::deriv(int k, double x, int order) const {
  if (order != 1 && order != 2) {
    throw MissingDerivativeRule("derivative order must be 1 or 2");
  }
  const Component& c = comp_[static_cast<std::size_t>(k) - 1];
  if (const auto* g = std::get_if<GridSamples>(&c)) return grid_deriv(*g, x, order);
  const AnalyticRule& r = std::get<AnalyticRule>(c);
  if (compact() && x > support_radius_) return {0.0, 0.0};
  if (order == 1) {
    if (r.d1) return r.d1(x);
    const double h = 1e-6 * (1.0 + std::abs(x));
    if (x >= h) return (r.value(x + h) - r.value(x - h)) / (2.0 * h);
    return (-3.0 * r.value(x) + 4.0 * r.value(x + h) - r.value(x + 2.0 * h)) /
           (2.0 * h);
  }
  if (r.d2) return r.d2(x);
  throw MissingDerivativeRule("no second-derivative rule on branch " +
                              std::to_string(k));
}

double NetworkFunction::integration_radius(double tail_tol) const {
  if (compact()) return support_radius_;
  if (tail_.rate > 0.0 && tail_.scale > 0.0) {
    const double tol = std::max(tail_tol, 1e-300);
    const double r = std::log(tail_.scale / (tail_.rate * tol)) / tail_.rate;
    return std::max(r, 0.0);
  }
  throw NonIntegrable("function has neither compact support nor a decay certificate");
}

namespace {

void require_shape(const NetworkFunction& f, const StarNetwork& net,
                   const char* who) {
  if (f.branches() != net.n()) {
    throw TooFewBranches(std::string(who) + ": function has " +
                         std::to_string(f.branches()) + " components, network has " +
                         std::to_string(net.n()) + " branches");
  }
}

double truncation_radius(const NetworkFunction& u, const NetworkFunction& v) {
  double r = kInf;
  // the product vanishes where either factor does, so the smaller radius wins
  for (const NetworkFunction* f : {&u, &v}) {
    if (f->compact() || f->has_decay()) {
      r = std::min(r, f->integration_radius(1e-15));
    }
  }
  if (r == kInf) {
    throw NonIntegrable("inner product of two functions without any tail control");
  }
  return r;
}

}  // namespace

cplx inner_product_H(const NetworkFunction& u, const NetworkFunction& v,
                     const StarNetwork& net, double rel_tol) {
  validate_network(net);
  require_shape(u, net, "inner_product_H");
  require_shape(v, net, "inner_product_H");
  const double radius = truncation_radius(u, v);
  if (radius <= 0.0) return {0.0, 0.0};

  cplx acc{0.0, 0.0};
  for (int k = 1; k <= net.n(); ++k) {
    const bool any_grid = u.is_sampled(k) || v.is_sampled(k);
    if (any_grid) {
      double h = kInf;
      if (u.is_sampled(k)) h = std::min(h, u.samples(k).h);
      if (v.is_sampled(k)) h = std::min(h, v.samples(k).h);
      const std::size_t m = std::max<std::size_t>(
          4, static_cast<std::size_t>(std::ceil(radius / h)));
      std::vector<cplx> prod(m + 1);
      for (std::size_t i = 0; i <= m; ++i) {
        const double x = h * static_cast<double>(i);
        prod[i] = u.eval(k, x) * std::conj(v.eval(k, x));
      }
      acc += simpson(prod, h);
    } else {
      QuadratureSpec spec;
      spec.rel_tol = rel_tol;
      spec.abs_tol = 1e-14;
      if (u.compact()) spec.breakpoints.push_back(u.support_radius());
      if (v.compact()) spec.breakpoints.push_back(v.support_radius());
      auto integrand = [&](double x) { return u.eval(k, x) * std::conj(v.eval(k, x)); };
      acc += integrate(integrand, 0.0, radius, spec).value;
    }
  }
  return acc;
}

double norm_H(const NetworkFunction& u, const StarNetwork& net) {
  return std::sqrt(std::max(0.0, inner_product_H(u, u, net).real()));
}

NetworkFunction apply_A(const NetworkFunction& u, const StarNetwork& net) {
  validate_network(net);
  require_shape(u, net, "apply_A");
  const bool grid_rep = u.is_sampled(1);

  if (grid_rep) {
    std::vector<GridSamples> out(static_cast<std::size_t>(net.n()));
    for (int k = 1; k <= net.n(); ++k) {
      if (!u.is_sampled(k)) {
        throw MissingDerivativeRule("apply_A: mixed representations are not supported");
      }
      const GridSamples& g = u.samples(k);
      const std::size_t m = g.values.size();
      GridSamples o;
      o.h = g.h;
      o.values.resize(m);
      if (m < 3) {
        out[static_cast<std::size_t>(k) - 1] = std::move(o);
        continue;
      }
      const double c = net.c_at(k), a = net.a_at(k), h2 = g.h * g.h;
      auto second = [&](std::size_t im, std::size_t i0, std::size_t ip) {
        return (g.values[ip] - 2.0 * g.values[i0] + g.values[im]) / h2;
      };
      o.values[0] = -c * second(0, 1, 2) + a * g.values[0];
      for (std::size_t i = 1; i + 1 < m; ++i) {
        o.values[i] = -c * second(i - 1, i, i + 1) + a * g.values[i];
      }
      o.values[m - 1] = -c * second(m - 3, m - 2, m - 1) + a * g.values[m - 1];
      out[static_cast<std::size_t>(k) - 1] = std::move(o);
    }
    return NetworkFunction::sampled(std::move(out));
  }

  std::vector<AnalyticRule> rules(static_cast<std::size_t>(net.n()));
  for (int k = 1; k <= net.n(); ++k) {
    const AnalyticRule& r = u.rule(k);
    if (!r.d2) {
      throw MissingDerivativeRule("apply_A: analytic branch " + std::to_string(k) +
                                  " has no second-derivative rule");
    }
    const double c = net.c_at(k), a = net.a_at(k);
    AnalyticRule& o = rules[static_cast<std::size_t>(k) - 1];
    o.value = [r, c, a](double x) { return -c * r.d2(x) + a * r.value(x); };
  }
  if (u.compact()) {
    return NetworkFunction::analytic(std::move(rules), u.support_radius());
  }
  DecayCertificate tail = u.decay();
  double amp = 0.0;
  for (int k = 1; k <= net.n(); ++k) {
    amp = std::max(amp, net.c_at(k) * tail.rate * tail.rate + std::abs(net.a_at(k)));
  }
  tail.scale *= std::max(1.0, amp);
  return NetworkFunction::analytic_decaying(std::move(rules), tail);
}

TransmissionDefects check_transmission(const NetworkFunction& u,
                                       const StarNetwork& net, double tol) {
  validate_network(net);
  require_shape(u, net, "check_transmission");
  TransmissionDefects d;
  std::vector<cplx> at_vertex(static_cast<std::size_t>(net.n()));
  for (int k = 1; k <= net.n(); ++k) {
    at_vertex[static_cast<std::size_t>(k) - 1] = u.eval(k, 0.0);
  }
  for (int j = 1; j <= net.n(); ++j) {
    for (int k = j + 1; k <= net.n(); ++k) {
      d.t0_defect = std::max(d.t0_defect,
                             std::abs(at_vertex[static_cast<std::size_t>(j) - 1] -
                                      at_vertex[static_cast<std::size_t>(k) - 1]));
    }
  }
  cplx flux{0.0, 0.0};
  for (int k = 1; k <= net.n(); ++k) flux += net.c_at(k) * u.deriv(k, 0.0, 1);
  d.t1_defect = std::abs(flux);
  d.pass = d.t0_defect <= tol && d.t1_defect <= tol;
  return d;
}

NetworkFunction lin_comb(cplx alpha, const NetworkFunction& u, cplx beta,
                         const NetworkFunction& v) {
  if (u.branches() != v.branches()) {
    throw TooFewBranches("lin_comb: component counts differ");
  }
  const int n = u.branches();
  if (u.is_sampled(1) != v.is_sampled(1)) {
    throw BadGrid("lin_comb: mixed representations");
  }
  if (u.is_sampled(1)) {
    std::vector<GridSamples> out(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
      const GridSamples& gu = u.samples(k);
      const GridSamples& gv = v.samples(k);
      if (gu.values.size() != gv.values.size() ||
          std::abs(gu.h - gv.h) > 1e-12 * (gu.h + gv.h)) {
        throw BadGrid("lin_comb: branch " + std::to_string(k) +
                      " grids do not match");
      }
      GridSamples o;
      o.h = gu.h;
      o.values.resize(gu.values.size());
      for (std::size_t i = 0; i < o.values.size(); ++i) {
        o.values[i] = alpha * gu.values[i] + beta * gv.values[i];
      }
      out[static_cast<std::size_t>(k) - 1] = std::move(o);
    }
    return NetworkFunction::sampled(std::move(out));
  }
  std::vector<AnalyticRule> rules(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    AnalyticRule& o = rules[static_cast<std::size_t>(k) - 1];
    NetworkFunction uc = u, vc = v;
    o.value = [uc, vc, alpha, beta, k](double x) {
      return alpha * uc.eval(k, x) + beta * vc.eval(k, x);
    };
    const AnalyticRule& ru = u.rule(k);
    const AnalyticRule& rv = v.rule(k);
    if (ru.d1 && rv.d1) {
      auto ud = ru.d1, vd = rv.d1;
      o.d1 = [ud, vd, alpha, beta](double x) { return alpha * ud(x) + beta * vd(x); };
    }
    if (ru.d2 && rv.d2) {
      auto ud = ru.d2, vd = rv.d2;
      o.d2 = [ud, vd, alpha, beta](double x) { return alpha * ud(x) + beta * vd(x); };
    }
  }
  double radius = std::max(u.support_radius(), v.support_radius());
  if (radius < kInf) return NetworkFunction::analytic(std::move(rules), radius);
  if (u.has_decay() && v.has_decay()) {
    DecayCertificate tail;
    tail.rate = std::min(u.decay().rate, v.decay().rate);
    tail.scale = std::abs(alpha) * u.decay().scale + std::abs(beta) * v.decay().scale;
    return NetworkFunction::analytic_decaying(std::move(rules), tail);
  }
  return NetworkFunction::analytic_decaying(std::move(rules), DecayCertificate{});
}

NetworkFunction resample(const NetworkFunction& u, double L, double h) {
  if (!(L > 0.0) || !(h > 0.0)) throw BadGrid("resample: need L > 0 and h > 0");
  const double m_real = L / h;
  const auto m = static_cast<std::size_t>(std::llround(m_real));
  if (std::abs(m_real - static_cast<double>(m)) > 1e-9 || m < 4) {
    throw BadGrid("resample: L must be an integer multiple (>= 4) of h");
  }
  std::vector<GridSamples> out(static_cast<std::size_t>(u.branches()));
  for (int k = 1; k <= u.branches(); ++k) {
    GridSamples g;
    g.h = h;
    g.values.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
      g.values[i] = u.eval(k, h * static_cast<double>(i));
    }
    out[static_cast<std::size_t>(k) - 1] = std::move(g);
  }
  return NetworkFunction::sampled(std::move(out));
}

}  // namespace starkg
