#pragma once

// 1D Sturm-Liouville eigenproblems -chi'' + V chi = lambda chi discretized by
// the three-point stencil, and their lowest eigenpairs.

#include "thinstrip/profile.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace thinstrip {

/// Symmetric tridiagonal matrix of the three-point discretization on a
/// uniform grid x_i = grid_start + i * grid_step, i = 0 .. n + 1.
///
/// Dirichlet ends are eliminated. A Neumann end keeps its node and is closed
/// with a mirrored ghost node; the resulting row is symmetrized by the
/// diagonal similarity with the trapezoid weights, so that the Euclidean
/// inner product of the symmetric system equals the trapezoid inner product
/// of the grid functions.
struct TridiagonalSystem {
  std::vector<double> diagonal;
  std::vector<double> off_diagonal;
  double grid_start = 0.0;
  double grid_step = 0.0;
  BoundaryKind bc_left = BoundaryKind::Dirichlet;
  BoundaryKind bc_right = BoundaryKind::Dirichlet;
  std::size_t n_dof = 0;

  /// Grid node index of dof 0.
  std::size_t first_node() const noexcept { return bc_left == BoundaryKind::Dirichlet ? 1 : 0; }
  double node(std::size_t dof) const noexcept {
    return grid_start + static_cast<double>(first_node() + dof) * grid_step;
  }
  /// Trapezoid weight (without the step) of a dof: 1/2 on kept Neumann end nodes.
  double weight(std::size_t dof) const noexcept;
  /// Gershgorin bound on the infinity norm.
  double norm_bound() const noexcept;
};

/// Lowest eigenpairs of a 1D operator. Vectors are grid functions at the dof
/// nodes, normalized to unit discrete L2 norm (trapezoid rule).
struct Spectrum1D {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
  /// Backward error ||T v - lambda v|| / (||T||_inf ||v||) of each pair.
  std::vector<double> residuals;
  std::vector<bool> converged;
  std::vector<double> x;
  /// Quadrature weights (trapezoid weight times step) at the dof nodes.
  std::vector<double> weights;

  std::size_t size() const noexcept { return values.size(); }
  double inner(std::size_t i, std::size_t j) const;
  /// Piecewise-linear interpolant of vector j; zero outside the grid.
  double eval(std::size_t j, double at) const;
};

enum class EigenMethod {
  Bisection, // Sturm bisection + inverse iteration
  Dense,     // full implicit QL on the tridiagonal (brute-force oracle)
};

struct SolveOptions1D {
  double tol = 1e-10;
  EigenMethod method = EigenMethod::Bisection;
};

TridiagonalSystem assemble(std::span<const double> potential_at_nodes, double x0, double x1, std::size_t n,
                           BoundaryKind left, BoundaryKind right);
TridiagonalSystem assemble(const std::function<double(double)>& potential, double x0, double x1, std::size_t n,
                           BoundaryKind left, BoundaryKind right);

/// Number of eigenvalues of T strictly below lambda (Sturm sign count).
std::size_t sturm_count(const TridiagonalSystem& T, double lambda);

Spectrum1D smallest_eigenpairs(const TridiagonalSystem& T, std::size_t k, const SolveOptions1D& opts = {});

/// Default truncation half-width for the limit operator: 10 for m >= 2, 14 for m = 1.
double default_limit_window(const Profile& p);

/// Eigenpairs (mu_j, X_j) of H = -d^2/dx^2 + q(x) on [-L, L] with Dirichlet
/// truncation. Signs are fixed so that X_j > 0 for large x. Throws
/// ErrorKind::Truncation when the eigenfunctions have not decayed at +-L.
Spectrum1D solve_limit(const Profile& p, double L, std::size_t n, std::size_t k, const SolveOptions1D& opts = {});

/// Eigenpairs of Q = -d^2/dx^2 + W_eps on the profile domain with the given
/// end condition at both ends.
Spectrum1D solve_reduced(const Profile& p, double eps, BoundaryKind bc, std::size_t n, std::size_t k,
                         const SolveOptions1D& opts = {});

/// Eigenpairs of eps^{2 alpha} (-d^2/dx^2 + q(x) / eps^2) on [-L eps^alpha, L eps^alpha].
/// Values are the scaled eigenvalues; vectors live on the unscaled x grid.
Spectrum1D solve_scaled_family(const Profile& p, double eps, double L, std::size_t n, std::size_t k,
                               const SolveOptions1D& opts = {});

} // namespace thinstrip
