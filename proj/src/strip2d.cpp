#include "thinstrip/strip2d.hpp"

#include "thinstrip/error.hpp"

#include <Eigen/SparseCholesky>
#include <unsupported/Eigen/SparseExtra>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace thinstrip {

namespace {

struct GaussRule {
  std::vector<double> nodes;   // on [0, 1]
  std::vector<double> weights; // sum to 1
};

GaussRule gauss_legendre(int points) {
  static const std::array<std::vector<double>, 6> x = {{
      {},
      {0.0},
      {-0.57735026918962576451, 0.57735026918962576451},
      {-0.77459666924148337704, 0.0, 0.77459666924148337704},
      {-0.86113631159405257522, -0.33998104358485626480, 0.33998104358485626480, 0.86113631159405257522},
      {-0.90617984593866399280, -0.53846931010568309104, 0.0, 0.53846931010568309104, 0.90617984593866399280},
  }};
  static const std::array<std::vector<double>, 6> w = {{
      {},
      {2.0},
      {1.0, 1.0},
      {0.55555555555555555556, 0.88888888888888888889, 0.55555555555555555556},
      {0.34785484513745385737, 0.65214515486254614263, 0.65214515486254614263, 0.34785484513745385737},
      {0.23692688505618908751, 0.47862867049936646804, 0.56888888888888888889, 0.47862867049936646804,
       0.23692688505618908751},
  }};
  GaussRule r;
  for (std::size_t i = 0; i < x[points].size(); ++i) {
    r.nodes.push_back(0.5 * (1.0 + x[points][i]));
    r.weights.push_back(0.5 * w[points][i]);
  }
  return r;
}

// Lagrange basis on the equispaced points l / order of [0, 1].
void lagrange(int order, double s, std::vector<double>& value, std::vector<double>& slope) {
  value.assign(order + 1, 0.0);
  slope.assign(order + 1, 0.0);
  for (int l = 0; l <= order; ++l) {
    const double sl = static_cast<double>(l) / order;
    double v = 1.0;
    for (int q = 0; q <= order; ++q)
      if (q != l) v *= (s - static_cast<double>(q) / order) / (sl - static_cast<double>(q) / order);
    double d = 0.0;
    for (int r = 0; r <= order; ++r) {
      if (r == l) continue;
      double term = 1.0 / (sl - static_cast<double>(r) / order);
      for (int q = 0; q <= order; ++q)
        if (q != l && q != r) term *= (s - static_cast<double>(q) / order) / (sl - static_cast<double>(q) / order);
      d += term;
    }
    value[l] = v;
    slope[l] = d;
  }
}

double inf_norm(const SparsePair::Matrix& a) {
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(a.cols());
  for (Eigen::Index c = 0; c < a.outerSize(); ++c)
    for (SparsePair::Matrix::InnerIterator it(a, c); it; ++it) sums[c] += std::abs(it.value());
  return sums.size() ? sums.maxCoeff() : 0.0;
}

// Orthonormalize the columns of X in the M inner product. Columns that are
// numerically dependent are replaced by fresh random directions.
void m_orthonormalize(Eigen::MatrixXd& X, const SparsePair::Matrix& M, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  int refills = 0;
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::MatrixXd G = X.transpose() * (M * X);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (G + G.transpose()));
    const Eigen::VectorXd& d = es.eigenvalues();
    const double dmax = d.maxCoeff();
    Eigen::MatrixXd W = es.eigenvectors();
    bool rank_deficient = false;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      if (d[i] > 1e-14 * dmax) {
        W.col(i) /= std::sqrt(d[i]);
      } else {
        W.col(i).setZero();
        rank_deficient = true;
      }
    }
    X = X * W;
    if (rank_deficient) {
      if (++refills > 4) fail(ErrorKind::Numeric, "subspace basis keeps collapsing during orthonormalization");
      for (Eigen::Index i = 0; i < X.cols(); ++i)
        if (X.col(i).squaredNorm() == 0.0)
          for (Eigen::Index r = 0; r < X.rows(); ++r) X(r, i) = dist(rng);
      pass = -1; // start over with the refilled block
      continue;
    }
  }
}

} // namespace

std::vector<double> piecewise_uniform_nodes(const std::vector<double>& breakpoints,
                                            const std::vector<std::size_t>& counts) {
  if (breakpoints.size() < 2 || counts.size() + 1 != breakpoints.size())
    fail(ErrorKind::Parameter, "need one element count per segment");
  std::vector<double> nodes{breakpoints.front()};
  for (std::size_t s = 0; s < counts.size(); ++s) {
    const double lo = breakpoints[s], hi = breakpoints[s + 1];
    if (!(hi > lo) || counts[s] == 0) fail(ErrorKind::Parameter, "breakpoints must increase and segments be non-empty");
    const double h = (hi - lo) / static_cast<double>(counts[s]);
    for (std::size_t i = 1; i < counts[s]; ++i) nodes.push_back(lo + static_cast<double>(i) * h);
    nodes.push_back(hi);
  }
  return nodes;
}

std::vector<double> default_x_nodes(const Profile& p, std::size_t nx) {
  const double lo = p.lower(), hi = p.upper();
  const double share = -lo / (hi - lo);
  auto left = static_cast<std::size_t>(std::lround(share * static_cast<double>(nx)));
  left = std::clamp<std::size_t>(left, 1, nx - 1);
  return piecewise_uniform_nodes({lo, 0.0, hi}, {left, nx - left});
}

std::size_t default_nx(const Profile& p, double eps) {
  const double rule = std::ceil(40.0 / std::pow(eps, alpha(p)));
  auto nx = std::max<std::size_t>(400, static_cast<std::size_t>(rule));
  return nx + (nx % 2);
}

SparsePair assemble_mapped(const Profile& p, double eps, std::size_t nx, std::size_t nt, BoundaryKind bc_x,
                           const AssemblyOptions& opts) {
  if (nx < 8) fail(ErrorKind::Parameter, "nx must be >= 8");
  return assemble_mapped(p, eps, default_x_nodes(p, nx), nt, bc_x, opts);
}

SparsePair assemble_mapped(const Profile& p, double eps, std::vector<double> x_nodes, std::size_t nt,
                           BoundaryKind bc_x, const AssemblyOptions& opts) {
  if (!(eps > 0.0)) fail(ErrorKind::Parameter, "eps must be > 0");
  if (x_nodes.size() < 9) fail(ErrorKind::Parameter, "nx must be >= 8");
  if (nt < 4) fail(ErrorKind::Parameter, "nt must be >= 4");
  if (opts.t_order < 1 || opts.t_order > 4) fail(ErrorKind::Parameter, "t_order must be in 1..4");
  if (opts.x_order < 1 || opts.x_order > 4) fail(ErrorKind::Parameter, "x_order must be in 1..4");
  for (std::size_t i = 1; i < x_nodes.size(); ++i)
    if (!(x_nodes[i] > x_nodes[i - 1])) fail(ErrorKind::Assembly, "x nodes must be strictly increasing");
  if (p.has_kink()) {
    const bool has_zero = std::any_of(x_nodes.begin(), x_nodes.end(), [](double x) { return x == 0.0; });
    if (!has_zero) fail(ErrorKind::Assembly, "grid has no node on the m = 1 kink at x = 0");
  }

  const int tord = opts.t_order, xord = opts.x_order;
  SparsePair sp(p);
  sp.eps = eps;
  sp.bc_x = bc_x;
  sp.t_order = tord;
  sp.x_order = xord;
  sp.nx = x_nodes.size() - 1;
  sp.nt = nt;
  sp.x_nodes.reserve(sp.nx * xord + 1);
  for (std::size_t e = 0; e < sp.nx; ++e)
    for (int l = 0; l < xord; ++l)
      sp.x_nodes.push_back(l == 0 ? x_nodes[e] : x_nodes[e] + (x_nodes[e + 1] - x_nodes[e]) * l / xord);
  sp.x_nodes.push_back(x_nodes.back());
  const std::size_t n_t = nt * static_cast<std::size_t>(tord) + 1;
  sp.t_nodes.resize(n_t);
  for (std::size_t i = 0; i < n_t; ++i) sp.t_nodes[i] = static_cast<double>(i) / static_cast<double>(n_t - 1);

  const std::size_t n_x = sp.x_nodes.size();
  sp.dof_of_node.assign(n_x * n_t, -1);
  for (std::size_t ix = 0; ix < n_x; ++ix) {
    const bool x_end = ix == 0 || ix + 1 == n_x;
    for (std::size_t it = 0; it < n_t; ++it) {
      const bool t_end = it == 0 || it + 1 == n_t;
      const bool eliminated = !opts.keep_all_nodes && (t_end || (x_end && bc_x == BoundaryKind::Dirichlet));
      if (eliminated) continue;
      sp.dof_of_node[ix * n_t + it] = static_cast<std::ptrdiff_t>(sp.node_of_dof.size());
      sp.node_of_dof.push_back(ix * n_t + it);
    }
  }

  const GaussRule gx = gauss_legendre(xord + 1);
  const GaussRule gt = gauss_legendre(tord + 1);
  const int nloc_t = tord + 1, nloc_x = xord + 1;
  const int nloc = nloc_x * nloc_t;
  const std::size_t nqx = gx.nodes.size();

  // Reference basis values at the Gauss points.
  std::vector<std::vector<double>> lt(gt.nodes.size()), dlt(gt.nodes.size()), lx(nqx), dlx(nqx);
  for (std::size_t q = 0; q < gt.nodes.size(); ++q) lagrange(tord, gt.nodes[q], lt[q], dlt[q]);
  for (std::size_t q = 0; q < nqx; ++q) lagrange(xord, gx.nodes[q], lx[q], dlx[q]);

  std::vector<Eigen::Triplet<double>> kt, mt;
  kt.reserve(sp.nx * nt * nloc * nloc);
  mt.reserve(sp.nx * nt * nloc * nloc);
  Eigen::MatrixXd ke(nloc, nloc), me(nloc, nloc);
  std::vector<double> phi(nloc), phi_t(nloc), dphi(nloc);
  std::vector<std::ptrdiff_t> dofs(nloc);
  std::vector<double> hq(nqx), rq(nqx);

  for (std::size_t ex = 0; ex < sp.nx; ++ex) {
    const double xl = x_nodes[ex], dx = x_nodes[ex + 1] - xl;
    // Coefficients depend only on x and the t position within the element.
    for (std::size_t q = 0; q < nqx; ++q) {
      const double xq = xl + dx * gx.nodes[q];
      hq[q] = height(p, xq);
      rq[q] = height_derivative(p, xq) / hq[q];
    }
    for (std::size_t et = 0; et < nt; ++et) {
      const double tl = sp.t_nodes[et * tord], dt = sp.t_nodes[(et + 1) * tord] - tl;
      ke.setZero();
      me.setZero();
      for (std::size_t qx = 0; qx < nqx; ++qx) {
        const double eh = eps * hq[qx];
        for (std::size_t qt = 0; qt < gt.nodes.size(); ++qt) {
          const double t = tl + dt * gt.nodes[qt];
          const double w = gx.weights[qx] * dx * gt.weights[qt] * dt;
          for (int a = 0; a < nloc_x; ++a) {
            const double X = lx[qx][a], Xx = dlx[qx][a] / dx;
            for (int l = 0; l < nloc_t; ++l) {
              const int i = a * nloc_t + l;
              const double T = lt[qt][l], Tt = dlt[qt][l] / dt;
              phi[i] = X * T;
              phi_t[i] = X * Tt;
              dphi[i] = Xx * T - t * rq[qx] * phi_t[i];
            }
          }
          for (int i = 0; i < nloc; ++i) {
            for (int j = i; j < nloc; ++j) {
              ke(i, j) += w * (eh * dphi[i] * dphi[j] + phi_t[i] * phi_t[j] / eh);
              me(i, j) += w * eh * phi[i] * phi[j];
            }
          }
        }
      }
      for (int a = 0; a < nloc_x; ++a)
        for (int l = 0; l < nloc_t; ++l)
          dofs[a * nloc_t + l] = sp.dof_of_node[(ex * xord + a) * n_t + et * tord + l];
      for (int i = 0; i < nloc; ++i) {
        if (dofs[i] < 0) continue;
        for (int j = 0; j < nloc; ++j) {
          if (dofs[j] < 0) continue;
          const double kv = i <= j ? ke(i, j) : ke(j, i);
          const double mv = i <= j ? me(i, j) : me(j, i);
          kt.emplace_back(dofs[i], dofs[j], kv);
          mt.emplace_back(dofs[i], dofs[j], mv);
        }
      }
    }
  }

  const auto n = static_cast<Eigen::Index>(sp.n_dof());
  sp.stiffness.resize(n, n);
  sp.mass.resize(n, n);
  sp.stiffness.setFromTriplets(kt.begin(), kt.end());
  sp.mass.setFromTriplets(mt.begin(), mt.end());
  return sp;
}

Spectrum2D solve_strip(const SparsePair& sp, std::size_t k, const SolveOptions2D& opts) {
  const std::size_t n = sp.n_dof();
  if (k == 0) fail(ErrorKind::Parameter, "k must be >= 1");
  if (!(opts.tol > 0.0)) fail(ErrorKind::Parameter, "tolerance must be > 0");
  const std::size_t block = std::min(n, opts.block ? std::max(opts.block, k) : std::max(2 * k, k + 8));
  if (block <= k || k >= n) fail(ErrorKind::Parameter, "k must be well below the number of dofs");

  const auto& K = sp.stiffness;
  const auto& M = sp.mass;
  const double floor = spectral_floor(sp.profile, sp.eps);
  // Sitting exactly on the floor makes K - sigma M singular for flat
  // profiles with Neumann ends and swamps the block with one mode.
  double sigma = opts.shift.value_or(floor * (1.0 - 1e-4));

  Eigen::SimplicialLDLT<SparsePair::Matrix> ldlt;
  bool factored = false;
  for (int attempt = 0; attempt < 8 && !factored; ++attempt) {
    const SparsePair::Matrix A = K - sigma * M;
    ldlt.compute(A);
    factored = ldlt.info() == Eigen::Success;
    if (!factored) sigma *= 0.99;
  }
  if (!factored) fail(ErrorKind::Numeric, "factorization of K - sigma M failed after shift reductions");

  const double norm_k = inf_norm(K), norm_m = inf_norm(M);
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const auto nn = static_cast<Eigen::Index>(n), nb = static_cast<Eigen::Index>(block), nk = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd X(nn, nb);
  for (Eigen::Index c = 0; c < nb; ++c)
    for (Eigen::Index r = 0; r < nn; ++r) X(r, c) = dist(rng);
  m_orthonormalize(X, M, rng);

  Spectrum2D out;
  out.shift = sigma;
  Eigen::VectorXd theta;
  std::vector<double> res(k);
  std::ostringstream log;
  bool converged = false;
  std::size_t it = 0;
  for (it = 1; it <= opts.max_iterations; ++it) {
    Eigen::MatrixXd Y = ldlt.solve(M * X);
    m_orthonormalize(Y, M, rng);
    Eigen::MatrixXd H = Y.transpose() * (K * Y);
    H = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    theta = es.eigenvalues();
    X = Y * es.eigenvectors();

    const Eigen::MatrixXd Xk = X.leftCols(nk);
    const Eigen::MatrixXd R = K * Xk - (M * Xk) * theta.head(nk).asDiagonal();
    double worst = 0.0;
    for (Eigen::Index j = 0; j < nk; ++j) {
      res[j] = R.col(j).norm() / ((norm_k + std::abs(theta[j]) * norm_m) * Xk.col(j).norm());
      worst = std::max(worst, res[j]);
    }
    if (it % 25 == 1) log << " it=" << it << " worst_residual=" << worst << ";";
    if (worst <= opts.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "shift-invert iteration did not converge in " << opts.max_iterations << " iterations (k=" << k
       << ", block=" << block << "):" << log.str();
    fail(ErrorKind::Numeric, os.str());
  }

  out.iterations = it;
  out.factor_nonzeros = static_cast<std::size_t>(ldlt.matrixL().nestedExpression().nonZeros());
  out.vectors = X.leftCols(nk);
  for (std::size_t j = 0; j < k; ++j) {
    auto col = out.vectors.col(static_cast<Eigen::Index>(j));
    Eigen::Index imax = 0;
    col.cwiseAbs().maxCoeff(&imax);
    if (col[imax] < 0.0) col = -col;
    out.values.push_back(theta[static_cast<Eigen::Index>(j)]);
    out.shifted_values.push_back(theta[static_cast<Eigen::Index>(j)] - floor);
    out.residuals.push_back(res[j]);
  }
  return out;
}

std::size_t count_below(const SparsePair& sp, double lambda) {
  const SparsePair::Matrix A = sp.stiffness - lambda * sp.mass;
  Eigen::SimplicialLDLT<SparsePair::Matrix> ldlt(A);
  if (ldlt.info() != Eigen::Success) fail(ErrorKind::Numeric, "LDL^T factorization for the inertia count failed");
  const Eigen::VectorXd d = ldlt.vectorD();
  return static_cast<std::size_t>((d.array() < 0.0).count());
}

Eigen::VectorXd product_ansatz(const SparsePair& sp, const Spectrum1D& limit, std::size_t j) {
  if (j == 0 || j > limit.size()) fail(ErrorKind::Index, "mode number exceeds the limit spectrum");
  const double a = alpha(sp.profile);
  const double stretch = std::pow(sp.eps, -a);
  const double amp = 2.0 / std::pow(sp.eps, 1.0 + a);
  Eigen::VectorXd out(static_cast<Eigen::Index>(sp.n_dof()));
  for (std::size_t d = 0; d < sp.n_dof(); ++d) {
    const double x = sp.x_of_dof(d), t = sp.t_of_dof(d);
    out[static_cast<Eigen::Index>(d)] =
        std::sqrt(amp / height(sp.profile, x)) * limit.eval(j - 1, x * stretch) * std::sin(kPi * t);
  }
  return out;
}

double product_ansatz_error(const SparsePair& sp, const Spectrum2D& spec, std::size_t j, const Spectrum1D& limit) {
  if (j == 0 || j > spec.size()) fail(ErrorKind::Index, "mode number exceeds the computed 2D eigenpairs");
  const Eigen::VectorXd psi = spec.vectors.col(static_cast<Eigen::Index>(j - 1));
  const Eigen::VectorXd ansatz = product_ansatz(sp, limit, j);
  const double overlap = psi.dot(sp.mass * ansatz);
  const Eigen::VectorXd diff = psi - (overlap < 0.0 ? -1.0 : 1.0) * ansatz;
  return std::sqrt(std::max(0.0, diff.dot(sp.mass * diff)));
}

void write_matrix_market(const std::filesystem::path& path, const SparsePair::Matrix& m) {
  if (!Eigen::saveMarket(m, path.string())) fail(ErrorKind::Io, "cannot write matrix file " + path.string());
}

void write_eigenvector_csv(const std::filesystem::path& path, const SparsePair& sp, const Spectrum2D& spec,
                           std::size_t column) {
  if (column >= spec.size()) fail(ErrorKind::Index, "eigenvector column out of range");
  std::ofstream os(path);
  if (!os) fail(ErrorKind::Io, "cannot write eigenvector file " + path.string());
  os.precision(17);
  os << "x,t,value\n";
  const std::size_t n_t = sp.n_t_nodes();
  for (std::size_t ix = 0; ix < sp.x_nodes.size(); ++ix) {
    for (std::size_t it = 0; it < n_t; ++it) {
      const auto dof = sp.dof_of_node[ix * n_t + it];
      const double v = dof < 0 ? 0.0 : spec.vectors(dof, static_cast<Eigen::Index>(column));
      os << sp.x_nodes[ix] << ',' << sp.t_nodes[it] << ',' << v << '\n';
    }
  }
  if (!os) fail(ErrorKind::Io, "write failed for " + path.string());
}

} // namespace thinstrip
