#include "starkg/fd_oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>

#include "starkg/errors.hpp"
#include "starkg/evolution.hpp"

namespace starkg {
namespace {

std::size_t checked_intervals(const FdGrid& grid) {
  if (!(grid.h > 0.0) || !(grid.L > 0.0))
    throw BadGrid("finite-difference grid needs positive L and h");
  const double steps = grid.L / grid.h;
  if (std::abs(steps - std::round(steps)) > 1e-9 * (1.0 + steps))
    throw BadGrid("finite-difference grid: L must be an integer multiple of h");
  const auto m = static_cast<std::size_t>(std::llround(steps));
  if (m < 4) throw BadGrid("finite-difference grid: fewer than 4 intervals");
  return m;
}

/// Symmetric tridiagonal solve with constant diagonal/off-diagonal per
/// branch; plain elimination is stable here because the shifted pivots keep
/// a sign (imaginary part for complex shifts, positivity below spectrum).
template <typename Scalar>
void thomas_constant(Scalar diag, Scalar off, std::vector<Scalar>& rhs,
                     std::vector<Scalar>& scratch) {
  const std::size_t n = rhs.size();
  scratch.resize(n);
  Scalar pivot = diag;
  if (std::abs(pivot) < 1e-300)
    throw SingularSystem("tridiagonal pivot vanished");
  scratch[0] = off / pivot;
  rhs[0] /= pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = diag - off * scratch[i - 1];
    if (std::abs(pivot) < 1e-300)
      throw SingularSystem("tridiagonal pivot vanished");
    scratch[i] = off / pivot;
    rhs[i] = (rhs[i] - off * rhs[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i] * rhs[i + 1];
}

template <typename Scalar>
std::vector<Scalar> solve_struct(const StarNetwork& net, double h,
                                 std::size_t m, double vertex_diag,
                                 const std::vector<double>& diag,
                                 const std::vector<double>& coupling,
                                 Scalar z, const std::vector<Scalar>& rhs,
                                 std::size_t dim) {
  if (rhs.size() != dim)
    throw BadGrid("solve_shifted: rhs length does not match the operator");
  const int n = net.n();
  const std::size_t per = m - 1;
  std::vector<Scalar> out(dim);
  std::vector<Scalar> scratch;
  // Branch solves T_k y = rhs_k and T_k g = e_1 share the factorization
  // structure; run them as two sweeps.
  Scalar schur = z - Scalar(vertex_diag);
  Scalar vertex_rhs = rhs[0];
  std::vector<std::vector<Scalar>> ys(static_cast<std::size_t>(n));
  std::vector<std::vector<Scalar>> gs(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    const Scalar dz = z - Scalar(diag[static_cast<std::size_t>(k - 1)]);
    const Scalar off = Scalar(net.c_at(k) / (h * h));  // -(interior off-diag)
    auto& y = ys[static_cast<std::size_t>(k - 1)];
    auto& g = gs[static_cast<std::size_t>(k - 1)];
    y.assign(per, Scalar{});
    for (std::size_t i = 0; i < per; ++i) y[i] = rhs[1 + (k - 1) * per + i];
    g.assign(per, Scalar{});
    g[0] = Scalar(1.0);
    thomas_constant(dz, off, y, scratch);
    thomas_constant(dz, off, g, scratch);
    const Scalar beta = Scalar(-coupling[static_cast<std::size_t>(k - 1)]);
    schur -= beta * beta * g[0];
    vertex_rhs -= beta * y[0];
  }
  const double scale = std::abs(z) + std::abs(vertex_diag) + 1.0;
  if (std::abs(schur) < 1e-14 * scale)
    throw SingularSystem("vertex Schur complement vanished; z is numerically "
                         "on the discrete spectrum");
  const Scalar u0 = vertex_rhs / schur;
  out[0] = u0;
  for (int k = 1; k <= n; ++k) {
    const Scalar beta = Scalar(-coupling[static_cast<std::size_t>(k - 1)]);
    const auto& y = ys[static_cast<std::size_t>(k - 1)];
    const auto& g = gs[static_cast<std::size_t>(k - 1)];
    for (std::size_t i = 0; i < per; ++i)
      out[1 + (k - 1) * per + i] = y[i] - beta * u0 * g[i];
  }
  return out;
}

}  // namespace

DiscreteStarOperator::DiscreteStarOperator(const StarNetwork& net,
                                           const FdGrid& grid)
    : net_(net), h_(grid.h), m_(checked_intervals(grid)) {
  validate_network(net_);
  const int n = net_.n();
  dim_ = 1 + static_cast<std::size_t>(n) * (m_ - 1);
  double csum = 0.0, asum = 0.0;
  diag_.resize(static_cast<std::size_t>(n));
  off_.resize(static_cast<std::size_t>(n));
  coupling_.resize(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    const double c = net_.c_at(k);
    const double a = net_.a_at(k);
    csum += c;
    asum += a;
    diag_[static_cast<std::size_t>(k - 1)] = 2.0 * c / (h_ * h_) + a;
    off_[static_cast<std::size_t>(k - 1)] = -c / (h_ * h_);
    coupling_[static_cast<std::size_t>(k - 1)] =
        -c * std::sqrt(2.0 / n) / (h_ * h_);
  }
  vertex_diag_ = 2.0 * csum / (n * h_ * h_) + asum / n;
}

std::size_t DiscreteStarOperator::index(int k, std::size_t i) const {
  if (k < 1 || k > net_.n() || i < 1 || i > m_ - 1)
    throw OutsideDomain("DiscreteStarOperator::index out of range");
  return 1 + static_cast<std::size_t>(k - 1) * (m_ - 1) + (i - 1);
}

void DiscreteStarOperator::apply(const std::vector<double>& in,
                                 std::vector<double>& out) const {
  if (in.size() != dim_)
    throw BadGrid("DiscreteStarOperator::apply: size mismatch");
  out.assign(dim_, 0.0);
  const int n = net_.n();
  const std::size_t per = m_ - 1;
  double v = vertex_diag_ * in[0];
  for (int k = 1; k <= n; ++k) {
    const std::size_t base = 1 + static_cast<std::size_t>(k - 1) * per;
    const double d = diag_[static_cast<std::size_t>(k - 1)];
    const double o = off_[static_cast<std::size_t>(k - 1)];
    const double b = coupling_[static_cast<std::size_t>(k - 1)];
    v += b * in[base];
    for (std::size_t i = 0; i < per; ++i) {
      double row = d * in[base + i];
      row += i + 1 < per ? o * in[base + i + 1] : 0.0;
      if (i > 0)
        row += o * in[base + i - 1];
      else
        row += b * in[0];
      out[base + i] = row;
    }
  }
  out[0] = v;
}

std::vector<cplx> DiscreteStarOperator::solve_shifted(
    cplx z, const std::vector<cplx>& rhs) const {
  return solve_struct<cplx>(net_, h_, m_, vertex_diag_, diag_, coupling_, z,
                            rhs, dim_);
}

std::vector<double> DiscreteStarOperator::solve_shifted_real(
    double z, const std::vector<double>& rhs) const {
  return solve_struct<double>(net_, h_, m_, vertex_diag_, diag_, coupling_, z,
                              rhs, dim_);
}

std::vector<cplx> DiscreteStarOperator::pack(const NetworkFunction& f) const {
  if (f.branches() != net_.n())
    throw BadGrid("pack: function does not match the network");
  std::vector<cplx> v(dim_);
  const int n = net_.n();
  cplx vertex{0.0, 0.0};
  for (int k = 1; k <= n; ++k) vertex += f.eval(k, 0.0);
  v[0] = vertex / static_cast<double>(n) * std::sqrt(n * h_ / 2.0);
  const double root_h = std::sqrt(h_);
  for (int k = 1; k <= n; ++k)
    for (std::size_t i = 1; i < m_; ++i)
      v[index(k, i)] = root_h * f.eval(k, static_cast<double>(i) * h_);
  return v;
}

std::vector<double> DiscreteStarOperator::pack_real(
    const NetworkFunction& f) const {
  const std::vector<cplx> v = pack(f);
  double imag = 0.0, mag = 0.0;
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    imag = std::max(imag, std::abs(v[i].imag()));
    mag = std::max(mag, std::abs(v[i]));
    out[i] = v[i].real();
  }
  if (imag > 1e-12 * (mag + 1e-300))
    throw CheckFailure("pack_real: function has a non-trivial imaginary part");
  return out;
}

NetworkFunction DiscreteStarOperator::unpack(const std::vector<cplx>& v) const {
  if (v.size() != dim_) throw BadGrid("unpack: size mismatch");
  const int n = net_.n();
  const double root_h = std::sqrt(h_);
  const cplx vertex = v[0] / std::sqrt(n * h_ / 2.0);
  std::vector<GridSamples> comps(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    GridSamples g;
    g.h = h_;
    g.values.resize(m_ + 1, cplx{});
    g.values[0] = vertex;
    for (std::size_t i = 1; i < m_; ++i) g.values[i] = v[index(k, i)] / root_h;
    comps[static_cast<std::size_t>(k - 1)] = std::move(g);
  }
  return NetworkFunction::sampled(std::move(comps));
}

NetworkFunction oracle_resolvent(const NetworkFunction& f, cplx z,
                                 const StarNetwork& net, const FdGrid& grid) {
  const DiscreteStarOperator op(net, grid);
  return op.unpack(op.solve_shifted(z, op.pack(f)));
}

namespace {

struct LanczosResult {
  std::vector<double> alpha, beta;       // T entries; beta[j] couples j,j+1
  std::vector<std::vector<double>> q;    // Krylov basis (full reorth)
  double start_norm = 0.0;
};

/// Lanczos with full reorthogonalization on the operator given by `mat`.
LanczosResult lanczos(const std::function<std::vector<double>(
                          const std::vector<double>&)>& mat,
                      std::vector<double> start, int steps) {
  LanczosResult res;
  const std::size_t dim = start.size();
  double nrm = 0.0;
  for (double x : start) nrm += x * x;
  nrm = std::sqrt(nrm);
  res.start_norm = nrm;
  if (!(nrm > 0.0))
    throw CheckFailure("lanczos: start vector is identically zero");
  for (double& x : start) x /= nrm;
  res.q.push_back(std::move(start));
  for (int j = 0; j < steps; ++j) {
    std::vector<double> w = mat(res.q.back());
    double a = 0.0;
    for (std::size_t i = 0; i < dim; ++i) a += w[i] * res.q.back()[i];
    res.alpha.push_back(a);
    for (std::size_t i = 0; i < dim; ++i) {
      w[i] -= a * res.q.back()[i];
      if (j > 0) w[i] -= res.beta.back() * res.q[res.q.size() - 2][i];
    }
    // Full reorthogonalization, repeated once if the first pass removed a
    // large fraction of the vector ("twice is enough").
    for (int pass = 0; pass < 2; ++pass) {
      double before = 0.0, after = 0.0;
      for (double x : w) before += x * x;
      for (const auto& qv : res.q) {
        double dot = 0.0;
        for (std::size_t i = 0; i < dim; ++i) dot += w[i] * qv[i];
        for (std::size_t i = 0; i < dim; ++i) w[i] -= dot * qv[i];
      }
      for (double x : w) after += x * x;
      if (after > 0.5 * before) break;
    }
    double b = 0.0;
    for (double x : w) b += x * x;
    b = std::sqrt(b);
    if (b < 1e-13 || j + 1 == steps) {
      if (b < 1e-13) return res;  // invariant subspace found: exact measure
      res.beta.push_back(b);
      return res;
    }
    res.beta.push_back(b);
    for (double& x : w) x /= b;
    res.q.push_back(std::move(w));
  }
  return res;
}

struct RitzData {
  std::vector<double> theta;              // Ritz values of T
  std::vector<double> first_row;          // first components of T eigenvectors
  Eigen::MatrixXd vectors;                // full T eigenvectors (columns)
};

RitzData ritz_decompose(const LanczosResult& lan) {
  const auto k = static_cast<Eigen::Index>(lan.alpha.size());
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    T(i, i) = lan.alpha[static_cast<std::size_t>(i)];
    if (i + 1 < k) {
      T(i, i + 1) = lan.beta[static_cast<std::size_t>(i)];
      T(i + 1, i) = lan.beta[static_cast<std::size_t>(i)];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  if (es.info() != Eigen::Success)
    throw SingularSystem("Ritz eigendecomposition failed");
  RitzData rd;
  rd.vectors = es.eigenvectors();
  rd.theta.resize(static_cast<std::size_t>(k));
  rd.first_row.resize(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) {
    rd.theta[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    rd.first_row[static_cast<std::size_t>(i)] = rd.vectors(0, i);
  }
  return rd;
}

Eigen::MatrixXd dense_matrix(const DiscreteStarOperator& op) {
  const std::size_t dim = op.dim();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                            static_cast<Eigen::Index>(dim));
  std::vector<double> unit(dim, 0.0), col(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    unit[j] = 1.0;
    op.apply(unit, col);
    unit[j] = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
  }
  return A;
}

void sort_sample(SpectralSample& s) {
  std::vector<std::size_t> idx(s.lambda.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return s.lambda[a] < s.lambda[b]; });
  SpectralSample sorted;
  sorted.lambda.reserve(idx.size());
  sorted.weight.reserve(idx.size());
  for (std::size_t i : idx) {
    sorted.lambda.push_back(s.lambda[i]);
    sorted.weight.push_back(s.weight[i]);
  }
  s = std::move(sorted);
}

}  // namespace

SpectralSample oracle_spectral_density(const NetworkFunction& f,
                                       const StarNetwork& net,
                                       const FdGrid& grid, int steps) {
  if (steps < 2) throw BadGrid("oracle_spectral_density: need at least 2 steps");
  const DiscreteStarOperator op(net, grid);
  const double shift = net.a_min() - 1.0;
  const LanczosResult lan = lanczos(
      [&op, shift](const std::vector<double>& x) {
        return op.solve_shifted_real(shift, x);
      },
      op.pack_real(f), steps);
  // Operator used was (shift - A)^{-1}, whose eigenvalues are
  // 1/(shift - lambda) < 0; map Ritz values back.
  const RitzData rd = ritz_decompose(lan);
  SpectralSample s;
  for (std::size_t i = 0; i < rd.theta.size(); ++i) {
    const double th = rd.theta[i];
    if (!(std::abs(th) > 1e-300))
      throw SingularSystem("oracle_spectral_density: vanishing Ritz value");
    s.lambda.push_back(shift - 1.0 / th);
    s.weight.push_back(lan.start_norm * lan.start_norm * rd.first_row[i] *
                       rd.first_row[i]);
  }
  sort_sample(s);
  return s;
}

SpectralSample oracle_spectral_density_dense(const NetworkFunction& f,
                                             const StarNetwork& net,
                                             const FdGrid& grid) {
  const DiscreteStarOperator op(net, grid);
  const std::size_t dim = op.dim();
  if (dim > 4000)
    throw BadGrid("oracle_spectral_density_dense: more than 4000 dof");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_matrix(op));
  if (es.info() != Eigen::Success)
    throw SingularSystem("dense eigendecomposition failed");
  const std::vector<double> v = op.pack_real(f);
  Eigen::VectorXd ve(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) ve(static_cast<Eigen::Index>(i)) = v[i];
  const Eigen::VectorXd proj = es.eigenvectors().transpose() * ve;
  SpectralSample s;
  for (Eigen::Index i = 0; i < proj.size(); ++i) {
    s.lambda.push_back(es.eigenvalues()(i));
    s.weight.push_back(proj(i) * proj(i));
  }
  sort_sample(s);
  return s;
}

double window_mass(const SpectralSample& s, double a, double b) {
  double total = 0.0;
  for (std::size_t i = 0; i < s.lambda.size(); ++i)
    if (s.lambda[i] > a && s.lambda[i] < b) total += s.weight[i];
  return total;
}

std::vector<double> smoothed_density(const SpectralSample& s,
                                     const std::vector<double>& at,
                                     double delta) {
  if (!(delta > 0.0)) throw BadGrid("smoothed_density: delta must be positive");
  std::vector<double> out(at.size(), 0.0);
  const double norm = 1.0 / (delta * std::sqrt(2.0 * 3.14159265358979323846));
  for (std::size_t j = 0; j < at.size(); ++j)
    for (std::size_t i = 0; i < s.lambda.size(); ++i) {
      const double u = (at[j] - s.lambda[i]) / delta;
      out[j] += s.weight[i] * norm * std::exp(-0.5 * u * u);
    }
  return out;
}

OracleWave oracle_evolve(const NetworkFunction& u0, const NetworkFunction& v0,
                         double t, const StarNetwork& net, const FdGrid& grid,
                         int steps) {
  const DiscreteStarOperator op(net, grid);
  double speed = 0.0;
  for (int k = 1; k <= net.n(); ++k) speed = std::max(speed, std::sqrt(net.c_at(k)));
  const double reach = std::max(u0.integration_radius(1e-14),
                                v0.integration_radius(1e-14)) +
                       std::abs(t) * speed;
  if (reach >= op.L() * (1.0 - 1e-9))
    throw BoundaryContamination(
        "oracle_evolve: the light cone of the data reaches the Dirichlet cut "
        "(needs L > " +
        std::to_string(reach) + ")");

  const std::vector<double> pu = op.pack_real(u0);
  const std::vector<double> pv = op.pack_real(v0);
  std::vector<double> ut(op.dim(), 0.0), vt(op.dim(), 0.0);

  // Exact discrete propagation through a dense eigenbasis when feasible; the
  // decomposition is shared by the field and the velocity contributions.
  std::unique_ptr<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>> dense;
  if (op.dim() <= 4000) {
    dense = std::make_unique<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>>(
        dense_matrix(op));
    if (dense->info() != Eigen::Success)
      throw SingularSystem("dense eigendecomposition failed");
  }

  auto add_mode = [&](const std::vector<double>& start, bool is_velocity) {
    double nrm = 0.0;
    for (double x : start) nrm += x * x;
    if (!(nrm > 0.0)) return;
    if (dense) {
      Eigen::VectorXd ve(static_cast<Eigen::Index>(op.dim()));
      for (std::size_t i = 0; i < op.dim(); ++i)
        ve(static_cast<Eigen::Index>(i)) = start[i];
      Eigen::VectorXd proj = dense->eigenvectors().transpose() * ve;
      Eigen::VectorXd mu(proj.size()), mv(proj.size());
      for (Eigen::Index i = 0; i < proj.size(); ++i) {
        const double lam = dense->eigenvalues()(i);
        const double fu = is_velocity ? evolution_sinc_factor(lam, t)
                                      : evolution_cos_factor(lam, t);
        const double fv = is_velocity ? evolution_cos_factor(lam, t)
                                      : evolution_dcos_factor(lam, t);
        mu(i) = fu * proj(i);
        mv(i) = fv * proj(i);
      }
      const Eigen::VectorXd xu = dense->eigenvectors() * mu;
      const Eigen::VectorXd xv = dense->eigenvectors() * mv;
      for (std::size_t i = 0; i < op.dim(); ++i) {
        ut[i] += xu(static_cast<Eigen::Index>(i));
        vt[i] += xv(static_cast<Eigen::Index>(i));
      }
      return;
    }
    // Ritz propagation in a plain Krylov space of A.
    const LanczosResult lan = lanczos(
        [&op](const std::vector<double>& x) {
          std::vector<double> out;
          op.apply(x, out);
          return out;
        },
        start, steps);
    const RitzData rd = ritz_decompose(lan);
    const auto k = static_cast<Eigen::Index>(rd.theta.size());
    Eigen::VectorXd mu(k), mv(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      const double lam = rd.theta[static_cast<std::size_t>(i)];
      const double coef =
          lan.start_norm * rd.first_row[static_cast<std::size_t>(i)];
      const double fu = is_velocity ? evolution_sinc_factor(lam, t)
                                    : evolution_cos_factor(lam, t);
      const double fv = is_velocity ? evolution_cos_factor(lam, t)
                                    : evolution_dcos_factor(lam, t);
      mu(i) = fu * coef;
      mv(i) = fv * coef;
    }
    const Eigen::VectorXd cu = rd.vectors * mu;
    const Eigen::VectorXd cv = rd.vectors * mv;
    for (Eigen::Index j = 0; j < k; ++j) {
      const auto& qv = lan.q[static_cast<std::size_t>(j)];
      for (std::size_t i = 0; i < op.dim(); ++i) {
        ut[i] += cu(j) * qv[i];
        vt[i] += cv(j) * qv[i];
      }
    }
  };

  add_mode(pu, false);
  add_mode(pv, true);

  std::vector<cplx> uc(op.dim()), vc(op.dim());
  for (std::size_t i = 0; i < op.dim(); ++i) {
    uc[i] = cplx(ut[i], 0.0);
    vc[i] = cplx(vt[i], 0.0);
  }
  OracleWave w;
  w.u = op.unpack(uc);
  w.v = op.unpack(vc);
  w.t = t;
  return w;
}

}  // namespace starkg
