#include "thinstrip/schrodinger1d.hpp"

#include "thinstrip/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <random>
#include <sstream>

namespace thinstrip {

double TridiagonalSystem::weight(std::size_t dof) const noexcept {
  if (dof == 0 && bc_left == BoundaryKind::Neumann) return 0.5;
  if (dof + 1 == n_dof && bc_right == BoundaryKind::Neumann) return 0.5;
  return 1.0;
}

double TridiagonalSystem::norm_bound() const noexcept {
  double norm = 0.0;
  for (std::size_t i = 0; i < n_dof; ++i) {
    double row = std::abs(diagonal[i]);
    if (i > 0) row += std::abs(off_diagonal[i - 1]);
    if (i + 1 < n_dof) row += std::abs(off_diagonal[i]);
    norm = std::max(norm, row);
  }
  return norm;
}

double Spectrum1D::inner(std::size_t i, std::size_t j) const {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += weights[k] * vectors[i][k] * vectors[j][k];
  return s;
}

double Spectrum1D::eval(std::size_t j, double at) const {
  if (x.size() < 2) return 0.0;
  const double step = x[1] - x[0];
  // Dirichlet truncation: the grid function vanishes one step beyond each end.
  const double lo = x.front() - step, hi = x.back() + step;
  if (!(at > lo && at < hi)) return 0.0;
  const double s = (at - lo) / step;
  const auto cell = std::min(static_cast<std::size_t>(s), x.size());
  const double frac = s - static_cast<double>(cell);
  const auto sample = [&](std::size_t node) -> double {
    // node 0 is the virtual point lo, node x.size()+1 the virtual point hi
    if (node == 0 || node > x.size()) return 0.0;
    return vectors[j][node - 1];
  };
  return (1.0 - frac) * sample(cell) + frac * sample(cell + 1);
}

TridiagonalSystem assemble(std::span<const double> potential, double x0, double x1, std::size_t n,
                           BoundaryKind left, BoundaryKind right) {
  if (n < 16) fail(ErrorKind::Parameter, "grid count n must be >= 16");
  if (!(x1 > x0)) fail(ErrorKind::Parameter, "need x1 > x0");
  if (potential.size() != n + 2) fail(ErrorKind::Parameter, "potential must be sampled at all n + 2 grid nodes");

  TridiagonalSystem T;
  T.grid_start = x0;
  T.grid_step = (x1 - x0) / static_cast<double>(n + 1);
  T.bc_left = left;
  T.bc_right = right;
  const std::size_t first = left == BoundaryKind::Dirichlet ? 1 : 0;
  const std::size_t last = right == BoundaryKind::Dirichlet ? n : n + 1;
  T.n_dof = last - first + 1;

  const double inv_h2 = 1.0 / (T.grid_step * T.grid_step);
  T.diagonal.resize(T.n_dof);
  T.off_diagonal.assign(T.n_dof - 1, -inv_h2);
  for (std::size_t dof = 0; dof < T.n_dof; ++dof) {
    const std::size_t node = first + dof;
    const double v = potential[node];
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "non-finite potential at node " << node << " (x = " << x0 + static_cast<double>(node) * T.grid_step
         << ")";
      fail(ErrorKind::Assembly, os.str());
    }
    T.diagonal[dof] = 2.0 * inv_h2 + v;
  }
  // Ghost-node rows (2u_0 - 2u_1)/h^2 symmetrized with weight 1/2 on the end node.
  if (left == BoundaryKind::Neumann) T.off_diagonal.front() = -std::sqrt(2.0) * inv_h2;
  if (right == BoundaryKind::Neumann) T.off_diagonal.back() = -std::sqrt(2.0) * inv_h2;
  return T;
}

TridiagonalSystem assemble(const std::function<double(double)>& potential, double x0, double x1, std::size_t n,
                           BoundaryKind left, BoundaryKind right) {
  if (n < 16) fail(ErrorKind::Parameter, "grid count n must be >= 16");
  const double h = (x1 - x0) / static_cast<double>(n + 1);
  std::vector<double> v(n + 2);
  for (std::size_t i = 0; i < n + 2; ++i) v[i] = potential(x0 + static_cast<double>(i) * h);
  return assemble(v, x0, x1, n, left, right);
}

namespace {

double pivot_floor(const TridiagonalSystem& T) {
  double emax = 0.0;
  for (double e : T.off_diagonal) emax = std::max(emax, e * e);
  return DBL_MIN * std::max(1.0, emax);
}

std::size_t sturm_count_impl(const TridiagonalSystem& T, double lambda, double pivmin) {
  std::size_t count = 0;
  double q = T.diagonal[0] - lambda;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < T.n_dof; ++i) {
    const double e = T.off_diagonal[i - 1];
    q = T.diagonal[i] - lambda - e * e / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

/// LU with partial pivoting of a shifted symmetric tridiagonal matrix.
class ShiftedTridiagonalLU {
public:
  ShiftedTridiagonalLU(const TridiagonalSystem& T, double shift, double tiny)
      : n_(T.n_dof), dl_(T.off_diagonal), d_(T.diagonal), du_(T.off_diagonal), du2_(n_ > 2 ? n_ - 2 : 0, 0.0),
        piv_(n_ > 0 ? n_ - 1 : 0) {
    for (double& v : d_) v -= shift;
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      if (std::abs(d_[i]) >= std::abs(dl_[i])) {
        if (d_[i] == 0.0) d_[i] = tiny;
        const double fact = dl_[i] / d_[i];
        dl_[i] = fact;
        d_[i + 1] -= fact * du_[i];
        piv_[i] = false;
      } else {
        const double fact = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = fact;
        const double temp = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = temp - fact * d_[i + 1];
        if (i + 2 < n_) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -fact * du_[i + 1];
        }
        piv_[i] = true;
      }
    }
    if (n_ > 0 && d_[n_ - 1] == 0.0) d_[n_ - 1] = tiny;
  }

  void solve(std::vector<double>& b) const {
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      if (!piv_[i]) {
        b[i + 1] -= dl_[i] * b[i];
      } else {
        const double temp = b[i] - dl_[i] * b[i + 1];
        b[i] = b[i + 1];
        b[i + 1] = temp;
      }
    }
    b[n_ - 1] /= d_[n_ - 1];
    if (n_ > 1) b[n_ - 2] = (b[n_ - 2] - du_[n_ - 2] * b[n_ - 1]) / d_[n_ - 2];
    for (std::size_t i = n_ - 2; i-- > 0;) b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
  }

private:
  std::size_t n_;
  std::vector<double> dl_, d_, du_, du2_;
  std::vector<bool> piv_;
};

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double residual_norm(const TridiagonalSystem& T, const std::vector<double>& v, double lambda) {
  const std::size_t n = T.n_dof;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = (T.diagonal[i] - lambda) * v[i];
    if (i > 0) r += T.off_diagonal[i - 1] * v[i - 1];
    if (i + 1 < n) r += T.off_diagonal[i] * v[i + 1];
    s += r * r;
  }
  return std::sqrt(s);
}

void orthogonalize(std::vector<double>& y, const std::vector<std::vector<double>>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : basis) {
      double dot = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) dot += q[i] * y[i];
      for (std::size_t i = 0; i < y.size(); ++i) y[i] -= dot * q[i];
    }
  }
}

struct RawPair {
  std::vector<double> vector; // unit Euclidean norm, symmetric coordinates
  double residual = 0.0;
  bool converged = false;
};

RawPair inverse_iteration(const TridiagonalSystem& T, double lambda, double tol, double norm,
                          const std::vector<std::vector<double>>& previous, std::uint64_t seed) {
  constexpr int kMaxIterations = 10;
  const double jitter = 1e-8 * std::abs(lambda) + 1e-13 * norm;
  const ShiftedTridiagonalLU lu(T, lambda + jitter, DBL_EPSILON * norm);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> y(T.n_dof);
  for (double& v : y) v = dist(rng);

  RawPair out;
  for (int it = 0; it < kMaxIterations; ++it) {
    lu.solve(y);
    orthogonalize(y, previous);
    const double ny = norm2(y);
    if (!(ny > 0.0) || !std::isfinite(ny)) break;
    for (double& v : y) v /= ny;
    out.residual = residual_norm(T, y, lambda) / norm;
    if (it >= 1 && out.residual <= tol) {
      out.converged = true;
      break;
    }
  }
  out.vector = std::move(y);
  return out;
}

std::vector<double> bisection_values(const TridiagonalSystem& T, std::size_t k) {
  const std::size_t n = T.n_dof;
  double gl = T.diagonal[0], gu = T.diagonal[0];
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(T.off_diagonal[i - 1]);
    if (i + 1 < n) r += std::abs(T.off_diagonal[i]);
    gl = std::min(gl, T.diagonal[i] - r);
    gu = std::max(gu, T.diagonal[i] + r);
  }
  const double spread = std::max(gu - gl, std::max(std::abs(gl), std::abs(gu)));
  gl -= 2.0 * DBL_EPSILON * spread + 1e-300;
  gu += 2.0 * DBL_EPSILON * spread + 1e-300;

  const double pivmin = pivot_floor(T);
  if (sturm_count_impl(T, gl, pivmin) != 0 || sturm_count_impl(T, gu, pivmin) != n)
    fail(ErrorKind::Numeric, "Sturm bisection: Gershgorin bracket does not enclose the spectrum");

  std::vector<double> values(k);
  double lower = gl;
  for (std::size_t j = 0; j < k; ++j) {
    double lo = lower, hi = gu;
    for (int it = 0; it < 256; ++it) {
      const double width = hi - lo;
      if (width <= 2.0 * DBL_EPSILON * std::max(std::abs(lo), std::abs(hi)) + pivmin) break;
      const double mid = lo + 0.5 * width;
      if (mid <= lo || mid >= hi) break;
      if (sturm_count_impl(T, mid, pivmin) >= j + 1)
        hi = mid;
      else
        lo = mid;
    }
    if (sturm_count_impl(T, hi, pivmin) < j + 1)
      fail(ErrorKind::Numeric, "Sturm bisection lost its bracket for eigenvalue " + std::to_string(j + 1));
    values[j] = lo + 0.5 * (hi - lo);
    lower = lo;
  }
  return values;
}

Spectrum1D finalize(const TridiagonalSystem& T, const std::vector<double>& values, std::vector<RawPair> pairs) {
  Spectrum1D s;
  const std::size_t n = T.n_dof;
  s.x.resize(n);
  s.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.x[i] = T.node(i);
    s.weights[i] = T.weight(i) * T.grid_step;
  }
  const double scale = 1.0 / std::sqrt(T.grid_step);
  for (std::size_t j = 0; j < values.size(); ++j) {
    auto& v = pairs[j].vector;
    std::size_t imax = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
    const double sign = v[imax] < 0.0 ? -1.0 : 1.0;
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = sign * scale * v[i] / std::sqrt(T.weight(i));
    s.values.push_back(values[j]);
    s.vectors.push_back(std::move(u));
    s.residuals.push_back(pairs[j].residual);
    s.converged.push_back(pairs[j].converged);
  }
  return s;
}

void check_sizes(const TridiagonalSystem& T, std::size_t k, double tol) {
  if (k == 0 || k > T.n_dof) fail(ErrorKind::Parameter, "eigenpair count must be in [1, n_dof]");
  if (!(tol > 0.0)) fail(ErrorKind::Parameter, "tolerance must be > 0");
}

Spectrum1D dense_eigenpairs(const TridiagonalSystem& T, std::size_t k, double tol) {
  constexpr std::size_t kDenseVectorLimit = 3000;
  const auto n = static_cast<Eigen::Index>(T.n_dof);
  Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(T.diagonal.data(), n);
  Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(T.off_diagonal.data(), n - 1);
  const bool with_vectors = T.n_dof <= kDenseVectorLimit;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) fail(ErrorKind::Numeric, "dense tridiagonal QL iteration did not converge");

  const double norm = std::max(T.norm_bound(), DBL_MIN);
  std::vector<double> values(es.eigenvalues().data(), es.eigenvalues().data() + k);
  std::vector<RawPair> pairs;
  std::vector<std::vector<double>> previous;
  for (std::size_t j = 0; j < k; ++j) {
    RawPair p;
    if (with_vectors) {
      const auto col = es.eigenvectors().col(static_cast<Eigen::Index>(j));
      p.vector.assign(col.data(), col.data() + n);
      p.residual = residual_norm(T, p.vector, values[j]) / norm;
      p.converged = p.residual <= tol;
    } else {
      p = inverse_iteration(T, values[j], tol, norm, previous, j + 1);
      previous.push_back(p.vector);
    }
    pairs.push_back(std::move(p));
  }
  return finalize(T, values, std::move(pairs));
}

} // namespace

std::size_t sturm_count(const TridiagonalSystem& T, double lambda) {
  return sturm_count_impl(T, lambda, pivot_floor(T));
}

Spectrum1D smallest_eigenpairs(const TridiagonalSystem& T, std::size_t k, const SolveOptions1D& opts) {
  check_sizes(T, k, opts.tol);
  if (opts.method == EigenMethod::Dense) return dense_eigenpairs(T, k, opts.tol);

  const auto values = bisection_values(T, k);
  const double norm = std::max(T.norm_bound(), DBL_MIN);
  std::vector<RawPair> pairs;
  std::vector<std::vector<double>> previous;
  for (std::size_t j = 0; j < k; ++j) {
    auto p = inverse_iteration(T, values[j], opts.tol, norm, previous, j + 1);
    previous.push_back(p.vector);
    pairs.push_back(std::move(p));
  }
  return finalize(T, values, std::move(pairs));
}

double default_limit_window(const Profile& p) { return p.order() == 1 ? 14.0 : 10.0; }

namespace {

constexpr double kTailThreshold = 1e-6;

void orient_for_large_x(Spectrum1D& s) {
  for (auto& u : s.vectors) {
    double umax = 0.0;
    for (double v : u) umax = std::max(umax, std::abs(v));
    for (std::size_t i = u.size(); i-- > 0;) {
      if (std::abs(u[i]) >= 1e-3 * umax) {
        if (u[i] < 0.0)
          for (double& v : u) v = -v;
        break;
      }
    }
  }
}

void check_truncation(const Spectrum1D& s, double edge_potential_scaled, double window) {
  const double mu_k = s.values.back();
  if (!(edge_potential_scaled > mu_k)) {
    std::ostringstream os;
    os << "truncation window L = " << window << " too small: potential at the window edge (" << edge_potential_scaled
       << ") does not exceed mu_" << s.size() << " = " << mu_k << "; increase L";
    fail(ErrorKind::Truncation, os.str());
  }
  for (std::size_t j = 0; j < s.size(); ++j) {
    const auto& u = s.vectors[j];
    double umax = 0.0;
    for (double v : u) umax = std::max(umax, std::abs(v));
    const double edge = std::max(std::abs(u.front()), std::abs(u.back()));
    if (edge > kTailThreshold * umax) {
      std::ostringstream os;
      os << "eigenfunction " << j + 1 << " has not decayed at the truncation boundary (relative value " << edge / umax
         << " > " << kTailThreshold << "); increase L = " << window;
      fail(ErrorKind::Truncation, os.str());
    }
  }
}

} // namespace

Spectrum1D solve_limit(const Profile& p, double L, std::size_t n, std::size_t k, const SolveOptions1D& opts) {
  if (!(L > 0.0)) fail(ErrorKind::Parameter, "truncation half-width L must be > 0");
  const auto T = assemble([&](double x) { return limit_potential(p, x); }, -L, L, n, BoundaryKind::Dirichlet,
                          BoundaryKind::Dirichlet);
  auto s = smallest_eigenpairs(T, k, opts);
  orient_for_large_x(s);
  check_truncation(s, std::min(limit_potential(p, -L), limit_potential(p, L)), L);
  return s;
}

Spectrum1D solve_reduced(const Profile& p, double eps, BoundaryKind bc, std::size_t n, std::size_t k,
                         const SolveOptions1D& opts) {
  if (!(eps > 0.0)) fail(ErrorKind::Parameter, "eps must be > 0");
  if (n < 16) fail(ErrorKind::Parameter, "grid count n must be >= 16");
  const double x0 = p.lower(), x1 = p.upper();
  const double h = (x1 - x0) / static_cast<double>(n + 1);
  std::vector<double> v(n + 2);
  for (std::size_t i = 0; i < n + 2; ++i) {
    double x = x0 + static_cast<double>(i) * h;
    if (i == n + 1) x = x1;
    if (p.has_kink() && std::abs(x) < 1e-12 * (x1 - x0)) {
      // A node on the m = 1 kink takes the mean of the one-sided limits.
      v[i] = 0.5 * (effective_potential(p, eps, 0.0, Side::Left) + effective_potential(p, eps, 0.0, Side::Right));
    } else {
      v[i] = effective_potential(p, eps, x);
    }
  }
  const auto T = assemble(v, x0, x1, n, bc, bc);
  return smallest_eigenpairs(T, k, opts);
}

Spectrum1D solve_scaled_family(const Profile& p, double eps, double L, std::size_t n, std::size_t k,
                               const SolveOptions1D& opts) {
  if (!(eps > 0.0)) fail(ErrorKind::Parameter, "eps must be > 0");
  if (!(L > 0.0)) fail(ErrorKind::Parameter, "truncation half-width L must be > 0");
  const double a = alpha(p);
  const double stretch = std::pow(eps, a);
  const double scale = std::pow(eps, 2.0 * a);
  const double inv_eps2 = 1.0 / (eps * eps);
  const double window = L * stretch;
  const auto T = assemble([&](double x) { return limit_potential(p, x) * inv_eps2; }, -window, window, n,
                          BoundaryKind::Dirichlet, BoundaryKind::Dirichlet);
  auto s = smallest_eigenpairs(T, k, opts);
  for (double& v : s.values) v *= scale;
  orient_for_large_x(s);
  const double edge = std::min(limit_potential(p, -window), limit_potential(p, window)) * inv_eps2 * scale;
  check_truncation(s, edge, window);
  return s;
}

} // namespace thinstrip
