#pragma once

// Independent reference values for the test suites. Nothing here calls into
// the toolkit's solvers.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

// Harmonic oscillator -u'' + k x^2 u: eigenvalues (2j - 1) sqrt(k).
inline double harmonic(double k, std::size_t j) { return (2.0 * static_cast<double>(j) - 1.0) * std::sqrt(k); }

// Eigenvalues of the Dirichlet three-point Laplacian with n interior nodes on (0, 1).
inline double discrete_laplacian(std::size_t n, std::size_t j) {
  const double dx = 1.0 / static_cast<double>(n + 1);
  const double s = std::sin(static_cast<double>(j) * pi * dx / 2.0);
  return 4.0 / (dx * dx) * s * s;
}

// Rectangle of length len and height H: pi^2 (jx^2 / len^2 + jy^2 / H^2), with
// jx >= 1 for Dirichlet ends and jx >= 0 for Neumann ends.
inline std::vector<double> rectangle(double len, double H, bool neumann_ends, std::size_t count) {
  std::vector<double> v;
  for (int jy = 1; jy <= 6; ++jy)
    for (int jx = neumann_ends ? 0 : 1; jx <= 60; ++jx)
      v.push_back(pi * pi * (jx * jx / (len * len) + jy * jy / (H * H)));
  std::sort(v.begin(), v.end());
  v.resize(count);
  return v;
}

// Lowest eigenvalues of -u'' + s u on (0, S) with u(S) = 0 and either u'(0) = 0
// (neumann) or u(0) = 0, on a cell-centred grid of n cells. Mirror ghost cells
// give second-order closures at both ends. Dense tridiagonal QL.
inline std::vector<double> half_line_airy(std::size_t n, double S, bool neumann, std::size_t k) {
  const double h = S / static_cast<double>(n);
  Eigen::VectorXd d(static_cast<Eigen::Index>(n));
  Eigen::VectorXd e(static_cast<Eigen::Index>(n - 1));
  for (std::size_t i = 0; i < n; ++i) d[static_cast<Eigen::Index>(i)] = 2.0 / (h * h) + (static_cast<double>(i) + 0.5) * h;
  d[0] += (neumann ? -1.0 : 1.0) / (h * h);
  d[static_cast<Eigen::Index>(n - 1)] += 1.0 / (h * h);
  e.setConstant(-1.0 / (h * h));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = es.eigenvalues()[static_cast<Eigen::Index>(i)];
  return out;
}

// |a'_1| (neumann) or |a_1| by Richardson extrapolation of the brute-force
// solve at n and 2n cells.
inline double airy_zero_magnitude(bool neumann, std::size_t n = 8000, double S = 20.0) {
  const double coarse = half_line_airy(n, S, neumann, 1)[0];
  const double fine = half_line_airy(2 * n, S, neumann, 1)[0];
  return (4.0 * fine - coarse) / 3.0;
}

} // namespace oracle

namespace gen {

// Seeded generators for property tests.
class Source {
public:
  explicit Source(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  // Sample that avoids a neighbourhood of zero.
  double nonzero(double lo, double hi, double gap) {
    for (;;) {
      const double x = uniform(lo, hi);
      if (std::abs(x) > gap) return x;
    }
  }

private:
  std::mt19937_64 rng_;
};

} // namespace gen
