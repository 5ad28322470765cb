#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "starkg/errors.hpp"
#include "starkg/netfunc.hpp"
#include "starkg/network.hpp"

using namespace starkg;

namespace {

// Smooth compactly supported bump on [c - w, c + w], peak value 1 at c.
AnalyticRule bump_rule(double center, double width) {
  auto shape = [center, width](double x) -> double {
    const double s = (x - center) / width;
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
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
  r.value = [shape](double x) { return cplx(shape(x), 0.0); };
  r.d1 = [d_shape](double x) { return cplx(d_shape(x), 0.0); };
  r.d2 = [dd_shape](double x) { return cplx(dd_shape(x), 0.0); };
  return r;
}

AnalyticRule zero_rule() {
  AnalyticRule r;
  r.value = [](double) { return cplx(0.0, 0.0); };
  r.d1 = r.value;
  r.d2 = r.value;
  return r;
}

}  // namespace

TEST_CASE("factories and basic queries") {
  const NetworkFunction z = NetworkFunction::zero(3);
  CHECK(z.branches() == 3);
  CHECK(z.compact());
  CHECK(z.support_radius() == 0.0);
  CHECK(z.eval(2, 1.7) == cplx(0.0, 0.0));

  NetworkFunction f =
      NetworkFunction::analytic({bump_rule(2.0, 1.0), zero_rule()}, 3.0);
  CHECK(f.branches() == 2);
  CHECK(f.compact());
  CHECK(f.support_radius() == 3.0);
  CHECK_FALSE(f.is_sampled(1));
  CHECK(std::abs(f.eval(1, 2.0) - cplx(1.0, 0.0)) < 1e-15);
  CHECK(f.eval(2, 2.0) == cplx(0.0, 0.0));

  AnalyticRule g;
  g.value = [](double x) { return cplx(std::exp(-x), 0.0); };
  NetworkFunction d = NetworkFunction::analytic_decaying(
      {g, g}, DecayCertificate{1.0, 1.0});
  CHECK_FALSE(d.compact());
  CHECK(d.has_decay());
  // Tail cut: 2 * n * scale / rate * exp(-rate R) <= tol gives R ~ 36.3.
  const double R = d.integration_radius(1e-14);
  CHECK(R > 25.0);
  CHECK(R < 80.0);

  AnalyticRule nodecay;
  nodecay.value = [](double x) { return cplx(1.0 / (1.0 + x * x), 0.0); };
  NetworkFunction bad = NetworkFunction::analytic_decaying(
      {nodecay, nodecay}, DecayCertificate{1.0, 0.0});
  CHECK_THROWS_AS((void)bad.integration_radius(1e-12), NonIntegrable);
}

TEST_CASE("sampled components interpolate cubically") {
  const double h = 0.05;
  std::vector<cplx> vals;
  for (int i = 0; i <= 200; ++i) {
    const double x = i * h;
    vals.emplace_back(std::sin(x), std::cos(0.5 * x));
  }
  NetworkFunction f = NetworkFunction::sampled({GridSamples{h, vals},
                                                GridSamples{h, vals}});
  CHECK(f.is_sampled(1));
  CHECK(f.compact());
  CHECK(f.support_radius() == doctest::Approx(10.0));

  // Exact at the nodes.
  CHECK(std::abs(f.eval(1, 40 * h) - vals[40]) == 0.0);
  // Fourth-order interpolation error between nodes.
  double worst = 0.0;
  for (double x : {0.013, 1.234, 4.971, 8.542}) {
    const cplx exact(std::sin(x), std::cos(0.5 * x));
    worst = std::max(worst, std::abs(f.eval(2, x) - exact));
  }
  CHECK(worst < 5e-7);
  // Zero extension beyond the last sample.
  CHECK(f.eval(1, 10.0 + h) == cplx(0.0, 0.0));
  CHECK(f.eval(1, 50.0) == cplx(0.0, 0.0));

  // Derivatives from the grid.
  CHECK(std::abs(f.deriv(1, 2.0, 1) - cplx(std::cos(2.0),
                                           -0.5 * std::sin(1.0))) < 2e-5);
  CHECK(std::abs(f.deriv(1, 2.0, 2) - cplx(-std::sin(2.0),
                                           -0.25 * std::cos(1.0))) < 2e-4);
}

TEST_CASE("analytic derivatives and the fallback rules") {
  NetworkFunction f =
      NetworkFunction::analytic({bump_rule(2.0, 1.0), zero_rule()}, 3.0);
  const double x = 2.4;
  const double s = x - 2.0;
  const double g = 1.0 - s * s;
  const double val = std::exp(1.0 - 1.0 / g);
  const double d1 = val * (-2.0 * s / (g * g));
  CHECK(std::abs(f.eval(1, x) - cplx(val, 0.0)) < 1e-15);
  CHECK(std::abs(f.deriv(1, x, 1) - cplx(d1, 0.0)) < 1e-14);

  // A rule without stored derivatives: order 1 falls back to differences,
  // order 2 refuses.
  AnalyticRule bare;
  bare.value = [](double t) { return cplx(std::sin(t), 0.0); };
  NetworkFunction b = NetworkFunction::analytic({bare, bare}, 20.0);
  CHECK(std::abs(b.deriv(1, 1.0, 1) - cplx(std::cos(1.0), 0.0)) < 1e-7);
  CHECK_THROWS_AS((void)b.deriv(1, 1.0, 2), MissingDerivativeRule);
}

TEST_CASE("inner product, norm and the operator") {
  const StarNetwork net{{1.0, 2.0}, {0.0, 3.0}};

  // f = sin(x) bump window on branch 1 only: closed-form norm pieces.
  AnalyticRule s;
  s.value = [](double x) {
    return x <= M_PI ? cplx(std::sin(x), 0.0) : cplx(0.0, 0.0);
  };
  NetworkFunction f = NetworkFunction::analytic({s, zero_rule()}, M_PI);
  // ||f||^2 = int_0^pi sin^2 = pi/2 (plain L2, no branch weights).
  CHECK(norm_H(f, net) == doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(1e-9));

  // Hermitian symmetry and conjugate linearity in the second slot.
  AnalyticRule t;
  t.value = [](double x) {
    return x <= M_PI ? cplx(0.3 * x, 0.1) : cplx(0.0, 0.0);
  };
  NetworkFunction gfun = NetworkFunction::analytic({t, zero_rule()}, M_PI);
  const cplx ip_fg = inner_product_H(f, gfun, net);
  const cplx ip_gf = inner_product_H(gfun, f, net);
  CHECK(std::abs(ip_fg - std::conj(ip_gf)) < 1e-10);

  // apply_A on a smooth bump: compare against -c u'' + a u pointwise.
  NetworkFunction u =
      NetworkFunction::analytic({bump_rule(2.0, 1.0), bump_rule(1.5, 1.0)},
                                3.0);
  NetworkFunction Au = apply_A(u, net);
  for (int k = 1; k <= 2; ++k) {
    for (double x : {0.9, 1.4, 2.2, 2.8}) {
      const cplx expect =
          -net.c_at(k) * u.deriv(k, x, 2) + net.a_at(k) * u.eval(k, x);
      CHECK(std::abs(Au.eval(k, x) - expect) < 1e-12);
    }
  }
}

TEST_CASE("vertex condition check") {
  const StarNetwork net{{1.0, 2.0}, {0.0, 3.0}};

  // Functions vanishing near the vertex satisfy both conditions trivially.
  NetworkFunction far =
      NetworkFunction::analytic({bump_rule(2.0, 1.0), zero_rule()}, 3.0);
  const TransmissionDefects ok = check_transmission(far, net, 1e-10);
  CHECK(ok.pass);
  CHECK(ok.t0_defect < 1e-14);
  CHECK(ok.t1_defect < 1e-14);

  // Value jump at the vertex breaks continuity.
  AnalyticRule one;
  one.value = [](double x) { return x <= 1.0 ? cplx(1.0, 0.0) : cplx(0.0, 0.0); };
  one.d1 = [](double) { return cplx(0.0, 0.0); };
  NetworkFunction jump = NetworkFunction::analytic({one, zero_rule()}, 1.0);
  const TransmissionDefects bad = check_transmission(jump, net, 1e-10);
  CHECK_FALSE(bad.pass);
  CHECK(bad.t0_defect == doctest::Approx(1.0));

  // Matched values but unbalanced weighted slopes break the flux condition:
  // u_k(x) = (1 - x)^2 near 0 on both branches gives derivative sum
  // c_1 * (-2) + c_2 * (-2) = -6.
  AnalyticRule slope;
  slope.value = [](double x) {
    return x <= 1.0 ? cplx((1.0 - x) * (1.0 - x), 0.0) : cplx(0.0, 0.0);
  };
  slope.d1 = [](double x) {
    return x <= 1.0 ? cplx(-2.0 * (1.0 - x), 0.0) : cplx(0.0, 0.0);
  };
  NetworkFunction flux = NetworkFunction::analytic({slope, slope}, 1.0);
  const TransmissionDefects fd = check_transmission(flux, net, 1e-10);
  CHECK_FALSE(fd.pass);
  CHECK(fd.t0_defect < 1e-14);
  CHECK(fd.t1_defect == doctest::Approx(6.0));
}

TEST_CASE("linear combinations and resampling") {
  const double h = 0.1;
  std::vector<cplx> a(51), b(51);
  for (int i = 0; i <= 50; ++i) {
    a[static_cast<std::size_t>(i)] = cplx(i * h, 0.0);
    b[static_cast<std::size_t>(i)] = cplx(0.0, 1.0);
  }
  NetworkFunction u = NetworkFunction::sampled({GridSamples{h, a},
                                                GridSamples{h, b}});
  NetworkFunction v = NetworkFunction::sampled({GridSamples{h, b},
                                                GridSamples{h, a}});
  NetworkFunction w = lin_comb(cplx(2.0, 0.0), u, cplx(0.0, 1.0), v);
  CHECK(std::abs(w.eval(1, 1.0) - (2.0 * cplx(1.0, 0.0) +
                                   cplx(0.0, 1.0) * cplx(0.0, 1.0))) < 1e-14);

  // Mismatched grids are rejected.
  NetworkFunction other = NetworkFunction::sampled(
      {GridSamples{0.2, std::vector<cplx>(26, cplx(1.0, 0.0))},
       GridSamples{0.2, std::vector<cplx>(26, cplx(1.0, 0.0))}});
  CHECK_THROWS_AS(lin_comb(cplx(1.0, 0.0), u, cplx(1.0, 0.0), other), BadGrid);

  // Resampling an analytic function hits the rule exactly at the nodes.
  NetworkFunction f =
      NetworkFunction::analytic({bump_rule(2.0, 1.0), zero_rule()}, 3.0);
  NetworkFunction r = resample(f, 4.0, 0.01);
  CHECK(r.is_sampled(1));
  CHECK(std::abs(r.eval(1, 2.0) - f.eval(1, 2.0)) < 1e-15);
  CHECK(std::abs(r.eval(1, 1.75) - f.eval(1, 1.75)) < 1e-9);
  CHECK_THROWS_AS(resample(f, 4.0, -0.1), BadGrid);
}
