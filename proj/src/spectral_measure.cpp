#include "starkg/spectral_measure.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace starkg {

namespace {

void require_real_band(double lambda, const StarNetwork& net, const char* who) {
  if (net.at_threshold(lambda)) {
    std::ostringstream os;
    os << who << ": lambda = " << lambda << " coincides with a branch threshold";
    throw ThresholdSingularity(os.str());
  }
}

cplx boundary_w(double lambda, const StarNetwork& net) {
  return wronskian_w(cplx{lambda, 0.0}, -1, net);
}

}  // namespace

double sigma_weight(double lambda, int l, const StarNetwork& net) {
  validate_network(net);
  if (lambda <= net.a_at(l)) return 0.0;
  require_real_band(lambda, net, "sigma_weight");
  const cplx w = boundary_w(lambda, net);
  const double xl = std::sqrt((lambda - net.a_at(l)) / net.c_at(l));
  return kSpectralNormalization * net.c_at(l) * xl / std::norm(w);
}

WeightMatrix weights_diagonal(double lambda, const StarNetwork& net) {
  validate_network(net);
  require_real_band(lambda, net, "weights_diagonal");
  WeightMatrix m;
  m.lambda = lambda;
  m.n = net.n();
  m.q.assign(static_cast<std::size_t>(m.n) * static_cast<std::size_t>(m.n), 0.0);
  for (int l = 1; l <= m.n; ++l) m.at(l, l) = sigma_weight(lambda, l, net);
  return m;
}

SamplingMatrices build_sampling_matrices(double lambda,
                                         const std::vector<double>& x_samples,
                                         const StarNetwork& net) {
  validate_network(net);
  require_real_band(lambda, net, "weights_matrix");
  if (!(lambda > net.a_min())) {
    throw OutsideDomain("weights_matrix: lambda must lie above the bottom threshold");
  }
  const int n = net.n();
  if (static_cast<int>(x_samples.size()) != n - 1) {
    throw OutsideDomain("weights_matrix: need one sampling point per branch 2..n");
  }
  SamplingMatrices sm;
  sm.lambda = lambda;
  sm.x_samples = x_samples;
  sm.alpha.assign(static_cast<std::size_t>(n) + 1, cplx{1.0, 0.0});
  sm.beta.assign(static_cast<std::size_t>(n) + 1, cplx{1.0, 0.0});
  const cplx lam{lambda, 0.0};
  for (int j = 2; j <= n; ++j) {
    const double xj = x_samples[static_cast<std::size_t>(j) - 2];
    if (!(xj > 0.0)) {
      throw OutsideDomain("weights_matrix: sampling points must be nonzero");
    }
    const cplx xij = xi(lam, j, net);
    const cplx sj = s_coeff(lam, j, net);
    sm.alpha[static_cast<std::size_t>(j)] = std::exp(cplx{0.0, -1.0} * xij * xj);
    sm.beta[static_cast<std::size_t>(j)] =
        std::cos(xij * xj) - cplx{0.0, 1.0} * sj * std::sin(xij * xj);
  }
  sm.D.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n),
              cplx{0.0, 0.0});
  for (int row = 1; row <= n; ++row) {
    for (int col = 1; col <= n; ++col) {
      cplx v;
      if (col == 1) {
        v = cplx{1.0, 0.0};
      } else if (row == col) {
        v = sm.beta[static_cast<std::size_t>(col)];
      } else {
        v = sm.alpha[static_cast<std::size_t>(col)];
      }
      sm.D[static_cast<std::size_t>(row - 1) * static_cast<std::size_t>(n) +
           static_cast<std::size_t>(col - 1)] = v;
    }
  }
  sm.C.assign(static_cast<std::size_t>(n) + 1, cplx{0.0, 0.0});
  for (int j = 1; j <= n; ++j) {
    sm.C[static_cast<std::size_t>(j)] =
        cplx{0.0, 1.0} * sm.alpha[static_cast<std::size_t>(j)];
  }
  return sm;
}

namespace {

// in-place Gaussian elimination with partial pivoting: A (n x n) X = B (n x m)
void solve_small(std::vector<cplx> A, std::vector<cplx>& B, int n, int m) {
  auto a = [&](int r, int c) -> cplx& {
    return A[static_cast<std::size_t>(r) * static_cast<std::size_t>(n) +
             static_cast<std::size_t>(c)];
  };
  auto b = [&](int r, int c) -> cplx& {
    return B[static_cast<std::size_t>(r) * static_cast<std::size_t>(m) +
             static_cast<std::size_t>(c)];
  };
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    }
    if (std::abs(a(piv, col)) < 1e-300) {
      throw SingularSystem("sampling matrix solve: zero pivot");
    }
    if (piv != col) {
      for (int c = col; c < n; ++c) std::swap(a(piv, c), a(col, c));
      for (int c = 0; c < m; ++c) std::swap(b(piv, c), b(col, c));
    }
    for (int r = col + 1; r < n; ++r) {
      const cplx factor = a(r, col) / a(col, col);
      for (int c = col; c < n; ++c) a(r, c) -= factor * a(col, c);
      for (int c = 0; c < m; ++c) b(r, c) -= factor * b(col, c);
    }
  }
  for (int col = n - 1; col >= 0; --col) {
    for (int c = 0; c < m; ++c) {
      cplx acc = b(col, c);
      for (int r = col + 1; r < n; ++r) acc -= a(col, r) * b(r, c);
      b(col, c) = acc / a(col, col);
    }
  }
}

}  // namespace

WeightMatrix weights_matrix(double lambda, const std::vector<double>& x_samples,
                            const StarNetwork& net) {
  SamplingMatrices sm = build_sampling_matrices(lambda, x_samples, net);
  const int n = net.n();

  double det_scale = 1.0;
  for (int j = 2; j <= n; ++j) {
    const cplx d = sm.beta[static_cast<std::size_t>(j)] -
                   sm.alpha[static_cast<std::size_t>(j)];
    const double scale =
        std::max({std::abs(sm.beta[static_cast<std::size_t>(j)]),
                  std::abs(sm.alpha[static_cast<std::size_t>(j)]), 1.0});
    if (std::abs(d) < 1e-12 * scale) {
      throw SingularD("weights_matrix: sampling point on branch " +
                      std::to_string(j) +
                      " makes the sampling matrix singular (sin(xi x) ~ 0)");
    }
    det_scale = std::min(det_scale, std::abs(d) / scale);
  }

  const cplx w = boundary_w(lambda, net);
  const cplx pref = cplx{0.0, -1.0} / w;

  // Mid = Im((-i/w) C D), entrywise real
  std::vector<cplx> mid(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int r = 1; r <= n; ++r) {
    for (int c = 1; c <= n; ++c) {
      const cplx cd = sm.C[static_cast<std::size_t>(r)] *
                      sm.D[static_cast<std::size_t>(r - 1) * static_cast<std::size_t>(n) +
                           static_cast<std::size_t>(c - 1)];
      mid[static_cast<std::size_t>(r - 1) * static_cast<std::size_t>(n) +
          static_cast<std::size_t>(c - 1)] = cplx{(pref * cd).imag(), 0.0};
    }
  }

  // Z = (D^T)^{-1} Mid
  std::vector<cplx> dt(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      dt[static_cast<std::size_t>(r) * static_cast<std::size_t>(n) +
         static_cast<std::size_t>(c)] =
          sm.D[static_cast<std::size_t>(c) * static_cast<std::size_t>(n) +
               static_cast<std::size_t>(r)];
    }
  }
  solve_small(dt, mid, n, n);  // mid now holds Z

  // Q = Z conj(D)^{-1}  <=>  conj(D)^T Q^T = Z^T
  std::vector<cplx> dct(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  std::vector<cplx> zt(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      dct[static_cast<std::size_t>(r) * static_cast<std::size_t>(n) +
          static_cast<std::size_t>(c)] =
          std::conj(sm.D[static_cast<std::size_t>(c) * static_cast<std::size_t>(n) +
                         static_cast<std::size_t>(r)]);
      zt[static_cast<std::size_t>(r) * static_cast<std::size_t>(n) +
         static_cast<std::size_t>(c)] =
          mid[static_cast<std::size_t>(c) * static_cast<std::size_t>(n) +
              static_cast<std::size_t>(r)];
    }
  }
  solve_small(dct, zt, n, n);  // zt now holds Q^T

  WeightMatrix out;
  out.lambda = lambda;
  out.n = n;
  out.q.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  for (int l = 1; l <= n; ++l) {
    for (int m = 1; m <= n; ++m) {
      const cplx v = kSpectralNormalization *
                     zt[static_cast<std::size_t>(m - 1) * static_cast<std::size_t>(n) +
                        static_cast<std::size_t>(l - 1)];
      out.at(l, m) = v.real();
      out.imag_residual = std::max(out.imag_residual, std::abs(v.imag()));
    }
  }
  return out;
}

namespace {

struct BandData {
  cplx w;
  cplx inv;      // 1/w
  double im_inv;  // Im(1/w)
  double re_inv;  // Re(1/w)
  double im_iinv; // Im(1/(i w)) = -Re(1/w)
};

BandData band_data(double lambda, const StarNetwork& net) {
  BandData b;
  b.w = boundary_w(lambda, net);
  b.inv = cplx{1.0, 0.0} / b.w;
  b.im_inv = b.inv.imag();
  b.re_inv = b.inv.real();
  b.im_iinv = -b.re_inv;
  return b;
}

}  // namespace

double im_kernel_case(int j, int k, int p, double x, double x_prime,
                      double lambda, const StarNetwork& net) {
  validate_network(net);
  if (j < 1 || j > net.n() || k < 1 || k > net.n()) {
    throw UnknownBranch("im_kernel_case: branch indices out of range");
  }
  require_real_band(lambda, net, "im_kernel_case");
  if (p != net.band_index(lambda)) {
    throw OutsideDomain("im_kernel_case: band index " + std::to_string(p) +
                        " does not match lambda");
  }
  const BandData b = band_data(lambda, net);
  const cplx lam{lambda, 0.0};

  if (j > p && k > p) {  // both evanescent
    const double rj = xi_decay_rate(lambda, j, net);
    const double rk = xi_decay_rate(lambda, k, net);
    return b.im_inv * std::exp(-rj * x - rk * x_prime);
  }
  if (j <= p && k <= p) {  // both propagating
    const double xj = xi(lam, j, net).real();
    const double xk = xi(lam, k, net).real();
    const double c = std::cos(xj * x), s = std::sin(xj * x);
    const double cp = std::cos(xk * x_prime), sp = std::sin(xk * x_prime);
    if (j != k) {
      return b.im_inv * c * cp - b.im_inv * s * sp - b.re_inv * c * sp -
             b.re_inv * s * cp;
    }
    const cplx sk = s_coeff(lam, k, net);
    const double im_sk_inv = (sk * b.inv).imag();
    return b.im_inv * c * cp - im_sk_inv * s * sp - b.re_inv * c * sp -
           b.re_inv * s * cp;
  }
  if (j <= p) {  // propagating x, evanescent x'
    const double xj = xi(lam, j, net).real();
    const double rk = xi_decay_rate(lambda, k, net);
    return std::exp(-rk * x_prime) *
           (b.im_inv * std::cos(xj * x) + b.im_iinv * std::sin(xj * x));
  }
  // evanescent x, propagating x'; mirror of the previous case
  const double xk = xi(lam, k, net).real();
  const double rj = xi_decay_rate(lambda, j, net);
  return std::exp(-rj * x) *
         (b.im_inv * std::cos(xk * x_prime) + b.im_iinv * std::sin(xk * x_prime));
}

double im_kernel_direct(int j, int k, double x, double x_prime, double lambda,
                        const StarNetwork& net) {
  validate_network(net);
  const int jp = (j % net.n()) + 1;
  const cplx lam{lambda, 0.0};
  const cplx u = eval_F(EigenfunctionSpec{lam, jp, -1}, NetworkPoint{j, x}, net);
  const cplx v = eval_F(EigenfunctionSpec{lam, j, -1}, NetworkPoint{k, x_prime}, net);
  const cplx w = boundary_w(lambda, net);
  return (u * v / w).imag();
}

namespace {

// coefficients of family l restricted to branch b in the two-element basis of
// that branch: {cos(xi_b x), sin(xi_b x)} if propagating, {e^{+r x}, e^{-r x}}
// if evanescent
std::array<cplx, 2> family_coeffs(int l, int b, int p, const cplx& s_b) {
  const bool prop = b <= p;
  if (l != b) {
    if (prop) return {cplx{1.0, 0.0}, cplx{0.0, -1.0}};
    return {cplx{0.0, 0.0}, cplx{1.0, 0.0}};
  }
  if (prop) return {cplx{1.0, 0.0}, cplx{0.0, -1.0} * s_b};
  return {0.5 * (cplx{1.0, 0.0} - s_b), 0.5 * (cplx{1.0, 0.0} + s_b)};
}

}  // namespace

WeightSystemReport verify_weight_systems(double lambda, const StarNetwork& net) {
  validate_network(net);
  require_real_band(lambda, net, "verify_weight_systems");
  const int n = net.n();
  const int p = net.band_index(lambda);
  const BandData b = band_data(lambda, net);
  const cplx lam{lambda, 0.0};

  std::vector<cplx> s(static_cast<std::size_t>(n) + 1);
  for (int l = 1; l <= n; ++l) s[static_cast<std::size_t>(l)] = s_coeff(lam, l, net);

  // normalization-free diagonal weights f_l / |w|^2
  std::vector<double> qt(static_cast<std::size_t>(n) + 1, 0.0);
  for (int l = 1; l <= p; ++l) {
    qt[static_cast<std::size_t>(l)] =
        net.c_at(l) * xi(lam, l, net).real() / std::norm(b.w);
  }

  WeightSystemReport report;
  for (int j = 1; j <= n; ++j) {
    const int jp = (j % n) + 1;
    for (int k = 1; k <= n; ++k) {
      std::string label;
      if (j > p && k > p) label = "both evanescent";
      else if (j <= p && k <= p) label = (j == k) ? "propagating diagonal" : "both propagating";
      else if (j <= p) label = "propagating x evanescent";
      else label = "evanescent x propagating";

      const std::array<cplx, 2> u = family_coeffs(jp, j, p, s[static_cast<std::size_t>(j)]);
      const std::array<cplx, 2> v = family_coeffs(j, k, p, s[static_cast<std::size_t>(k)]);
      for (int i = 0; i < 2; ++i) {
        for (int i2 = 0; i2 < 2; ++i2) {
          const double lhs = (b.inv * u[static_cast<std::size_t>(i)] *
                              v[static_cast<std::size_t>(i2)])
                                 .imag();
          cplx rhs{0.0, 0.0};
          for (int l = 1; l <= p; ++l) {
            const std::array<cplx, 2> xl =
                family_coeffs(l, j, p, s[static_cast<std::size_t>(j)]);
            const std::array<cplx, 2> yl =
                family_coeffs(l, k, p, s[static_cast<std::size_t>(k)]);
            rhs += qt[static_cast<std::size_t>(l)] * xl[static_cast<std::size_t>(i)] *
                   std::conj(yl[static_cast<std::size_t>(i2)]);
          }
          const double res = std::abs(cplx{lhs, 0.0} - rhs);
          report.max_residual = std::max(report.max_residual, res);
          auto [it, inserted] = report.by_case.try_emplace(label, res);
          if (!inserted) it->second = std::max(it->second, res);
          ++report.equations;
        }
      }
    }
  }
  return report;
}

}  // namespace starkg
