#pragma once

// Conforming finite elements for the Dirichlet Laplacian on the thin strip
// {x in I, 0 < y < eps h(x)}, written on the mapped rectangle I x (0, 1)
// through y = eps h(x) t.
//
// In mapped coordinates the quadratic form and the L2 norm read
//
//   int int eps h (u_x - t (h'/h) u_t)^2 + u_t^2 / (eps h)  dx dt,
//   int int eps h u^2  dx dt,
//
// and the elements are tensor products of continuous piecewise polynomials
// of degree x_order in x and t_order in t.

#include "thinstrip/profile.hpp"
#include "thinstrip/schrodinger1d.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

namespace thinstrip {

struct AssemblyOptions {
  /// Polynomial degree of the transverse factor; 1 gives bilinear elements.
  int t_order = 2;
  /// Polynomial degree in x.
  int x_order = 1;
  /// Keep every node (no Dirichlet elimination). Only for inspecting the raw
  /// matrices; the eigensolver needs the eliminated pair.
  bool keep_all_nodes = false;
};

struct SparsePair {
  using Matrix = Eigen::SparseMatrix<double>;

  explicit SparsePair(Profile p) : profile(std::move(p)) {}

  Matrix stiffness;
  Matrix mass;
  /// Node (ix * n_t_nodes + it) -> dof, or -1 when eliminated.
  std::vector<std::ptrdiff_t> dof_of_node;
  std::vector<std::size_t> node_of_dof;
  /// All nodal x positions (element vertices plus interior nodes).
  std::vector<double> x_nodes;
  std::vector<double> t_nodes;
  std::size_t nx = 0; // elements in x
  std::size_t nt = 0; // elements in t
  int t_order = 1;
  int x_order = 1;
  BoundaryKind bc_x = BoundaryKind::Dirichlet;
  double eps = 0.0;
  Profile profile;

  std::size_t n_dof() const noexcept { return node_of_dof.size(); }
  std::size_t n_t_nodes() const noexcept { return t_nodes.size(); }
  double x_of_dof(std::size_t dof) const noexcept { return x_nodes[node_of_dof[dof] / n_t_nodes()]; }
  double t_of_dof(std::size_t dof) const noexcept { return t_nodes[node_of_dof[dof] % n_t_nodes()]; }
};

struct Spectrum2D {
  std::vector<double> values;
  /// values - pi^2 / (M^2 eps^2)
  std::vector<double> shifted_values;
  /// Mass-orthonormal eigenvectors, one column per eigenvalue.
  Eigen::MatrixXd vectors;
  /// Backward error ||K v - lambda M v|| / ((||K||_inf + |lambda| ||M||_inf) ||v||).
  std::vector<double> residuals;
  std::size_t iterations = 0;
  std::size_t factor_nonzeros = 0;
  double shift = 0.0;

  std::size_t size() const noexcept { return values.size(); }
};

struct SolveOptions2D {
  double tol = 1e-10;
  std::size_t max_iterations = 1000;
  /// Block size of the subspace iteration; 0 picks max(2k, k + 8).
  std::size_t block = 0;
  /// Explicit shift; by default just below the spectral floor pi^2 / (M^2 eps^2).
  std::optional<double> shift;
};

/// x nodes with a node on every breakpoint; segment i gets counts[i]
/// uniform elements.
std::vector<double> piecewise_uniform_nodes(const std::vector<double>& breakpoints,
                                            const std::vector<std::size_t>& counts);

/// nx uniform-ish elements on the profile domain, split at x = 0 so that the
/// peak is always a node.
std::vector<double> default_x_nodes(const Profile& p, std::size_t nx);

/// Grid rule max(400, 40 / eps^alpha), rounded up to an even count.
std::size_t default_nx(const Profile& p, double eps);

SparsePair assemble_mapped(const Profile& p, double eps, std::size_t nx, std::size_t nt, BoundaryKind bc_x,
                           const AssemblyOptions& opts = {});
SparsePair assemble_mapped(const Profile& p, double eps, std::vector<double> x_nodes, std::size_t nt,
                           BoundaryKind bc_x, const AssemblyOptions& opts = {});

/// k smallest eigenpairs of K v = lambda M v by shift-invert block subspace
/// iteration with Rayleigh-Ritz projection.
Spectrum2D solve_strip(const SparsePair& sp, std::size_t k, const SolveOptions2D& opts = {});

/// Number of generalized eigenvalues strictly below lambda, from the inertia
/// of the LDL^T factorization of K - lambda M.
std::size_t count_below(const SparsePair& sp, double lambda);

/// Nodal interpolant (on the dofs of sp) of the sine-completed product ansatz
/// sqrt(2 / (eps^{1+alpha} h(x))) X_j(x eps^-alpha) sin(pi t). j is 1-based.
Eigen::VectorXd product_ansatz(const SparsePair& sp, const Spectrum1D& limit, std::size_t j);

/// Mass-norm distance between Psi_j and the product ansatz, after choosing
/// the sign of the ansatz that maximizes their mass inner product.
double product_ansatz_error(const SparsePair& sp, const Spectrum2D& spec, std::size_t j, const Spectrum1D& limit);

/// Coordinate-format (Matrix Market) dump of a sparse matrix.
void write_matrix_market(const std::filesystem::path& path, const SparsePair::Matrix& m);

/// CSV table (x, t, value) of eigenvector column j (0-based) on the full grid,
/// with zeros on eliminated nodes.
void write_eigenvector_csv(const std::filesystem::path& path, const SparsePair& sp, const Spectrum2D& spec,
                           std::size_t column);

} // namespace thinstrip
