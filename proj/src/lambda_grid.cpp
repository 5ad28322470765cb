#include "starkg/lambda_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "starkg/quadrature.hpp"

namespace starkg {

namespace {

double min_speed(const StarNetwork& net) {
  double cmin = net.c.front();
  for (double ck : net.c) cmin = std::min(cmin, ck);
  return cmin;
}

// local spectral phase rate max_k |d xi_k / d lambda| scaled by x_scale
double phase_rate(const StarNetwork& net, double lambda, double x_scale) {
  double rate = 0.0;
  for (int k = 1; k <= net.n(); ++k) {
    const double gap = std::max(std::abs(lambda - net.a_at(k)), 1e-12);
    rate = std::max(rate, 1.0 / (2.0 * std::sqrt(net.c_at(k) * gap)));
  }
  return std::max(rate * std::max(x_scale, 1.0), 1e-3);
}

void append_panel(LambdaGrid& grid, double lo, double hi, const GaussRule& rule) {
  const double mid = 0.5 * (lo + hi);
  const double halfw = 0.5 * (hi - lo);
  for (std::size_t i = 0; i < rule.node.size(); ++i) {
    grid.node.push_back(mid + halfw * rule.node[i]);
    grid.weight.push_back(halfw * rule.weight[i]);
  }
}

// plain composite panels over [lo, hi], width adapted to the local phase rate
void append_plain(LambdaGrid& grid, const StarNetwork& net, double lo, double hi,
                  const LambdaGridParams& p, const GaussRule& rule) {
  double pos = lo;
  while (pos < hi) {
    const double width =
        p.waves_per_panel * 2.0 * std::numbers::pi / phase_rate(net, pos, p.x_scale);
    const double next = std::min(hi, pos + std::max(width, 1e-9 * (1.0 + hi)));
    append_panel(grid, pos, next, rule);
    if (grid.size() > p.max_nodes) {
      throw BadGrid("spectral grid exceeds the node budget; increase panel sizes");
    }
    pos = next;
  }
}

// substituted zone [t, t + e] (dir = +1) or [t - e, t] (dir = -1) around the
// threshold t: lambda = t + dir * s^2
void append_substituted(LambdaGrid& grid, const StarNetwork& net, double t,
                        double e, int dir, const LambdaGridParams& p,
                        const GaussRule& rule) {
  if (!(e > 0.0)) return;
  const double s_end = std::sqrt(e);
  // each branch contributes phase at most x_scale * s / sqrt(c) after the
  // substitution, so uniform panels in s keep the oscillation resolved
  const double ds = p.waves_per_panel * 2.0 * std::numbers::pi *
                    std::sqrt(min_speed(net)) / std::max(p.x_scale, 1.0);
  const auto panels = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::ceil(s_end / std::max(ds, 1e-9))));
  for (std::size_t q = 0; q < panels; ++q) {
    const double s_lo = s_end * static_cast<double>(q) / static_cast<double>(panels);
    const double s_hi =
        s_end * static_cast<double>(q + 1) / static_cast<double>(panels);
    const double mid = 0.5 * (s_lo + s_hi);
    const double halfw = 0.5 * (s_hi - s_lo);
    for (std::size_t i = 0; i < rule.node.size(); ++i) {
      const double s = mid + halfw * rule.node[i];
      grid.node.push_back(t + dir * s * s);
      grid.weight.push_back(halfw * rule.weight[i] * 2.0 * s);
    }
  }
  if (grid.size() > p.max_nodes) {
    throw BadGrid("spectral grid exceeds the node budget; increase panel sizes");
  }
}

}  // namespace

LambdaGrid build_window_grid(const StarNetwork& net, double lo, double hi,
                             const LambdaGridParams& params) {
  validate_network(net);
  LambdaGrid grid;
  if (!(hi > lo)) return grid;
  const GaussRule& rule = gauss_legendre(params.order);

  std::vector<double> cuts;
  cuts.push_back(lo);
  for (double t : net.thresholds()) {
    if (t > lo && t < hi) cuts.push_back(t);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto is_threshold = [&](double v) {
    for (double t : net.thresholds()) {
      if (std::abs(v - t) <= 1e-14 * (1.0 + std::abs(t) + std::abs(v))) return true;
    }
    return false;
  };

  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double u = cuts[i], v = cuts[i + 1];
    const double seg = v - u;
    if (!(seg > 1e-12 * (1.0 + std::abs(u)))) continue;
    const double e_lo = is_threshold(u) ? std::min(params.edge_width, 0.5 * seg) : 0.0;
    const double e_hi = is_threshold(v) ? std::min(params.edge_width, 0.5 * seg) : 0.0;
    append_substituted(grid, net, u, e_lo, +1, params, rule);
    append_plain(grid, net, u + e_lo, v - e_hi, params, rule);
    append_substituted(grid, net, v, e_hi, -1, params, rule);
  }
  return grid;
}

}  // namespace starkg
