#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <variant>
#include <vector>

#include "starkg/network.hpp"
#include "starkg/quadrature.hpp"

namespace starkg {

/// Closed-form description of one branch component.  d1/d2 are optional:
/// first derivatives fall back to finite differences, second derivatives are
/// required where the differential operator is applied analytically.
struct AnalyticRule {
  std::function<cplx(double)> value;
  std::function<cplx(double)> d1;
  std::function<cplx(double)> d2;
};

/// Uniform samples at x = 0, h, 2h, ..., h*(count-1); the function is
/// extended by zero beyond the last sample.
struct GridSamples {
  double h = 0.0;
  std::vector<cplx> values;

  [[nodiscard]] double length() const {
    return values.size() < 2 ? 0.0 : h * static_cast<double>(values.size() - 1);
  }
};

/// Exponential tail certificate |f_k(x)| <= scale * exp(-rate * x) for all
/// branches, used to truncate integrals of non-compact functions.
struct DecayCertificate {
  double scale = 0.0;
  double rate = 0.0;
};

/// A square-integrable function on the network, one component per branch.
class NetworkFunction {
 public:
  NetworkFunction() = default;

  static NetworkFunction zero(int branches);
  static NetworkFunction analytic(std::vector<AnalyticRule> rules,
                                  double support_radius);
  static NetworkFunction analytic_decaying(std::vector<AnalyticRule> rules,
                                           DecayCertificate tail);
  static NetworkFunction sampled(std::vector<GridSamples> grids);

  [[nodiscard]] int branches() const { return static_cast<int>(comp_.size()); }
  [[nodiscard]] bool compact() const {
    return support_radius_ < std::numeric_limits<double>::infinity();
  }
  [[nodiscard]] double support_radius() const { return support_radius_; }
  [[nodiscard]] bool has_decay() const { return tail_.rate > 0.0; }
  [[nodiscard]] const DecayCertificate& decay() const { return tail_; }

  [[nodiscard]] bool is_sampled(int k) const;
  [[nodiscard]] const GridSamples& samples(int k) const;
  [[nodiscard]] const AnalyticRule& rule(int k) const;

  /// Value at distance x >= 0 on branch k (1-based).  Sampled components are
  /// interpolated with a cubic 4-point stencil; exact at the nodes.
  [[nodiscard]] cplx eval(int k, double x) const;

  /// Derivative of order 1 or 2.  Analytic components without a stored rule
  /// use one-sided/central differences for order 1 and refuse order 2.
  [[nodiscard]] cplx deriv(int k, double x, int order) const;

  /// Radius beyond which the remaining tail of |f| is below tail_tol, either
  /// the compact support radius or a cut derived from the decay certificate.
  /// Throws NonIntegrable when neither is available.
  [[nodiscard]] double integration_radius(double tail_tol) const;

 private:
  using Component = std::variant<AnalyticRule, GridSamples>;
  std::vector<Component> comp_;
  double support_radius_ = std::numeric_limits<double>::infinity();
  DecayCertificate tail_{};
};

/// Plain (unweighted) inner product of the direct sum of branch L2 spaces,
/// conjugate-linear in v.  The operator is symmetric with respect to exactly
/// this product thanks to the weighted derivative-sum vertex condition.
cplx inner_product_H(const NetworkFunction& u, const NetworkFunction& v,
                     const StarNetwork& net, double rel_tol = 1e-10);

double norm_H(const NetworkFunction& u, const StarNetwork& net);

/// Applies u |-> -c_k u'' + a_k u branch-wise.  Sampled components use
/// centered second differences (one-sided at the ends); analytic components
/// require a d2 rule.
NetworkFunction apply_A(const NetworkFunction& u, const StarNetwork& net);

struct TransmissionDefects {
  double t0_defect = 0.0;  // max deviation from value continuity at the vertex
  double t1_defect = 0.0;  // |sum_k c_k u_k'(0+)|
  bool pass = false;
};

/// Measures how far u is from the vertex coupling conditions; callers compare
/// the defects against their own tolerance (also recorded in `pass`).
TransmissionDefects check_transmission(const NetworkFunction& u,
                                       const StarNetwork& net,
                                       double tol = 1e-10);

/// alpha * u + beta * v.  Sampled components must share their grid layout.
NetworkFunction lin_comb(cplx alpha, const NetworkFunction& u, cplx beta,
                         const NetworkFunction& v);

/// Resamples any representation onto the uniform grid {0, h, ..., L}.
NetworkFunction resample(const NetworkFunction& u, double L, double h);

}  // namespace starkg
