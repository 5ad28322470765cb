// Compares the serial reference code paths against the parallel ones on the
// hot kernels (forward transform, back transform, projection) and checks that
// both produce bitwise-identical results.

#include <chrono>
#include <cstdio>
#include <string>

#include "starkg/evolution.hpp"
#include "starkg/netfunc.hpp"
#include "starkg/network.hpp"
#include "starkg/parallel.hpp"
#include "starkg/transform.hpp"

namespace {

using namespace starkg;
using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

NetworkFunction bump_data(const StarNetwork& net) {
  std::vector<AnalyticRule> rules(static_cast<std::size_t>(net.n()));
  for (int k = 1; k <= net.n(); ++k) {
    const double center = 1.0 + 0.3 * k;
    auto prof = [center](double x, int order) -> double {
      const double s = (x - center) / 0.5;
      const double u = 1.0 - s * s;
      if (!(u > 0.0)) return 0.0;
      const double g = std::exp(1.0 - 1.0 / u);
      if (order == 0) return g;
      const double e1 = -2.0 * s / (u * u);
      if (order == 1) return g * e1 / 0.5;
      const double e2 = -2.0 / (u * u) - 8.0 * s * s / (u * u * u);
      return g * (e1 * e1 + e2) / 0.25;
    };
    rules[static_cast<std::size_t>(k - 1)] = AnalyticRule{
        [prof](double x) { return cplx(prof(x, 0), 0.0); },
        [prof](double x) { return cplx(prof(x, 1), 0.0); },
        [prof](double x) { return cplx(prof(x, 2), 0.0); }};
  }
  return NetworkFunction::analytic(std::move(rules), 3.0);
}

bool same_bits(const SpectralFunction& a, const SpectralFunction& b) {
  for (std::size_t k = 0; k < a.values.size(); ++k)
    for (std::size_t i = 0; i < a.values[k].size(); ++i)
      if (a.values[k][i] != b.values[k][i]) return false;
  return true;
}

bool same_bits(const NetworkFunction& a, const NetworkFunction& b, int n) {
  for (int k = 1; k <= n; ++k) {
    const GridSamples& ga = a.samples(k);
    const GridSamples& gb = b.samples(k);
    if (ga.values.size() != gb.values.size()) return false;
    for (std::size_t i = 0; i < ga.values.size(); ++i)
      if (ga.values[i] != gb.values[i]) return false;
  }
  return true;
}

}  // namespace

int main() {
  const StarNetwork net{{1.0, 1.0, 2.0}, {0.0, 3.0, 9.0}};
  const NetworkFunction f = bump_data(net);
  LambdaGridParams params;
  params.x_scale = 40.0;
  auto grid = std::make_shared<const SpectralGrid>(
      build_spectral_grid(net, 160.0, params));
  std::printf("threads available: %d, spectral nodes: %zu\n",
              hardware_threads(), grid->total_nodes());

  auto t0 = clock_type::now();
  const SpectralFunction vs = transform_V(f, grid, net, ExecPolicy::serial);
  const double tv_serial = seconds_since(t0);
  t0 = clock_type::now();
  const SpectralFunction vp = transform_V(f, grid, net, ExecPolicy::parallel);
  const double tv_parallel = seconds_since(t0);
  std::printf("transform_V   serial %8.3fs   parallel %8.3fs   speedup %.2fx   identical: %s\n",
              tv_serial, tv_parallel, tv_serial / tv_parallel,
              same_bits(vs, vp) ? "yes" : "NO");

  const OutputGrid out{30.0, 0.005};
  t0 = clock_type::now();
  const NetworkFunction zs = transform_Z(vs, out, net, ExecPolicy::serial);
  const double tz_serial = seconds_since(t0);
  t0 = clock_type::now();
  const NetworkFunction zp = transform_Z(vs, out, net, ExecPolicy::parallel);
  const double tz_parallel = seconds_since(t0);
  std::printf("transform_Z   serial %8.3fs   parallel %8.3fs   speedup %.2fx   identical: %s\n",
              tz_serial, tz_parallel, tz_serial / tz_parallel,
              same_bits(zs, zp, net.n()) ? "yes" : "NO");

  t0 = clock_type::now();
  const NetworkFunction ps = projection_E(0.5, 2.5, f, net,
                                          ProjectionFormula::symmetric, out,
                                          params, ExecPolicy::serial);
  const double tp_serial = seconds_since(t0);
  t0 = clock_type::now();
  const NetworkFunction pp = projection_E(0.5, 2.5, f, net,
                                          ProjectionFormula::symmetric, out,
                                          params, ExecPolicy::parallel);
  const double tp_parallel = seconds_since(t0);
  std::printf("projection_E  serial %8.3fs   parallel %8.3fs   speedup %.2fx   identical: %s\n",
              tp_serial, tp_parallel, tp_serial / tp_parallel,
              same_bits(ps, pp, net.n()) ? "yes" : "NO");

  const bool ok = same_bits(vs, vp) && same_bits(zs, zp, net.n()) &&
                  same_bits(ps, pp, net.n());
  if (!ok) {
    std::printf("policy outputs differ\n");
    return 1;
  }
  return 0;
}
