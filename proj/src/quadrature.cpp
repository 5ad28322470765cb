#include "starkg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace starkg {

namespace {

GaussRule compute_gauss_rule(int order) {
  GaussRule rule;
  rule.order = order;
  rule.node.resize(static_cast<std::size_t>(order));
  rule.weight.resize(static_cast<std::size_t>(order));
  const int half = (order + 1) / 2;
  for (int i = 1; i <= half; ++i) {
    // Tricomi-style initial guess, then Newton on the three-term recurrence.
    double x = std::cos(std::numbers::pi * (i - 0.25) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= order; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.node[static_cast<std::size_t>(i - 1)] = -x;
    rule.node[static_cast<std::size_t>(order - i)] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weight[static_cast<std::size_t>(i - 1)] = w;
    rule.weight[static_cast<std::size_t>(order - i)] = w;
  }
  return rule;
}

struct Panel {
  double lo = 0.0, hi = 0.0;
  cplx value{0.0, 0.0};
  double est = 0.0;
  bool splittable = true;
};

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1) throw ToleranceNotMet("Gauss order must be >= 1");
  static std::map<int, GaussRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_gauss_rule(order)).first;
  return it->second;
}

cplx gauss_panel(const std::function<cplx(double)>& f, double lo, double hi,
                 const GaussRule& rule) {
  const double mid = 0.5 * (lo + hi);
  const double halfw = 0.5 * (hi - lo);
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < rule.node.size(); ++i) {
    acc += rule.weight[i] * f(mid + halfw * rule.node[i]);
  }
  return halfw * acc;
}

namespace {

Panel make_panel(const std::function<cplx(double)>& f, double lo, double hi,
                 const GaussRule& fine, const GaussRule& coarse,
                 std::size_t& evals) {
  Panel p;
  p.lo = lo;
  p.hi = hi;
  cplx vf = gauss_panel(f, lo, hi, fine);
  cplx vc = gauss_panel(f, lo, hi, coarse);
  evals += fine.node.size() + coarse.node.size();
  if (!std::isfinite(vf.real()) || !std::isfinite(vf.imag()) ||
      !std::isfinite(vc.real()) || !std::isfinite(vc.imag())) {
    std::ostringstream os;
    os << "non-finite integrand value on [" << lo << ", " << hi << "]";
    throw ToleranceNotMet(os.str());
  }
  p.value = vf;
  p.est = std::abs(vf - vc);
  return p;
}

}  // namespace

IntegrationResult integrate(const std::function<cplx(double)>& f, double lo,
                            double hi, const QuadratureSpec& spec) {
  if (lo == hi) return {};
  if (lo > hi) {
    IntegrationResult r = integrate(f, hi, lo, spec);
    r.value = -r.value;
    return r;
  }
  const GaussRule& fine = gauss_legendre(std::max(spec.order, 3));
  const GaussRule& coarse = gauss_legendre(std::max(spec.order / 2, 2));

  std::vector<double> cuts;
  cuts.push_back(lo);
  for (double b : spec.breakpoints) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::size_t evals = 0;
  std::vector<Panel> panels;
  panels.reserve(cuts.size() * 2);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    panels.push_back(make_panel(f, cuts[i], cuts[i + 1], fine, coarse, evals));
  }

  for (int splits = 0;; ++splits) {
    cplx total{0.0, 0.0};
    double est = 0.0;
    for (const Panel& p : panels) {
      total += p.value;
      est += p.est;
    }
    const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
    if (est <= tol) return {total, est, evals};

    // split the worst refinable panel; ties resolved by position so the
    // subdivision sequence (and hence the result) is reproducible bit for bit
    int worst = -1;
    for (int i = 0; i < static_cast<int>(panels.size()); ++i) {
      const Panel& p = panels[static_cast<std::size_t>(i)];
      if (!p.splittable) continue;
      if (worst < 0 || p.est > panels[static_cast<std::size_t>(worst)].est ||
          (p.est == panels[static_cast<std::size_t>(worst)].est &&
           p.lo < panels[static_cast<std::size_t>(worst)].lo)) {
        worst = i;
      }
    }
    if (worst < 0 || splits >= spec.max_subdivisions) {
      std::ostringstream os;
      os << "estimate " << est << " above tolerance " << tol << " after "
         << splits << " subdivisions";
      throw ToleranceNotMet(os.str());
    }
    Panel w = panels[static_cast<std::size_t>(worst)];
    const double mid = 0.5 * (w.lo + w.hi);
    if (!(mid > w.lo) || !(mid < w.hi)) {
      panels[static_cast<std::size_t>(worst)].splittable = false;
      continue;
    }
    Panel left = make_panel(f, w.lo, mid, fine, coarse, evals);
    Panel right = make_panel(f, mid, w.hi, fine, coarse, evals);
    panels[static_cast<std::size_t>(worst)] = left;
    panels.push_back(right);
  }
}

cplx simpson(const std::vector<cplx>& samples, double h) {
  const std::size_t m = samples.size();
  if (m < 2) return {0.0, 0.0};
  if (m == 2) return 0.5 * h * (samples[0] + samples[1]);
  std::size_t intervals = m - 1;
  cplx acc{0.0, 0.0};
  std::size_t stop = intervals;  // one past the last interval handled by Simpson
  if (intervals % 2 != 0) {
    if (intervals < 3) return {0.0, 0.0};  // unreachable given m >= 3
    stop = intervals - 3;
    // 3/8 rule on the trailing three intervals
    acc += 0.375 * h *
           (samples[stop] + 3.0 * samples[stop + 1] + 3.0 * samples[stop + 2] +
            samples[stop + 3]);
  }
  for (std::size_t i = 0; i + 2 <= stop; i += 2) {
    acc += (h / 3.0) * (samples[i] + 4.0 * samples[i + 1] + samples[i + 2]);
  }
  return acc;
}

double simpson(const std::vector<double>& samples, double h) {
  std::vector<cplx> tmp(samples.begin(), samples.end());
  return simpson(tmp, h).real();
}

}  // namespace starkg
