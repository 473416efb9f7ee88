#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/oracles.hpp"
#include "thinstrip/asymptotics.hpp"
#include "thinstrip/error.hpp"
#include "thinstrip/strip2d.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace thinstrip;

namespace {

constexpr auto D = BoundaryKind::Dirichlet;
constexpr auto N = BoundaryKind::Neumann;

const Profile harmonic = Profile::polynomial(1.0, 1.0, 1.0, 2, 0.9, 0.9);

AssemblyOptions bilinear() {
  AssemblyOptions o;
  o.t_order = 1;
  o.x_order = 1;
  return o;
}

AssemblyOptions orders(int x, int t) {
  AssemblyOptions o;
  o.x_order = x;
  o.t_order = t;
  return o;
}

double asymmetry(const SparsePair::Matrix& A) { return (A - SparsePair::Matrix(A.transpose())).norm() / A.norm(); }

// dof permutation induced by x -> -x on a symmetric grid.
std::vector<std::size_t> mirror(const SparsePair& sp) {
  std::vector<std::size_t> perm(sp.n_dof());
  const std::size_t nxn = sp.x_nodes.size(), ntn = sp.n_t_nodes();
  for (std::size_t d = 0; d < sp.n_dof(); ++d) {
    const std::size_t node = sp.node_of_dof[d];
    const std::size_t ix = node / ntn, it = node % ntn;
    perm[d] = static_cast<std::size_t>(sp.dof_of_node[(nxn - 1 - ix) * ntn + it]);
  }
  return perm;
}

} // namespace

TEST_CASE("rectangle oracle, bilinear elements at nx = 400, nt = 12") {
  const double M = 1.0, eps = 0.1;
  const Profile rect = Profile::flat(M, 1.0, 1.0);
  for (auto bc : {D, N}) {
    const auto sp = assemble_mapped(rect, eps, 400, 12, bc, bilinear());
    const auto s = solve_strip(sp, 4);
    const auto ref = oracle::rectangle(2.0, M * eps, bc == N, 4);
    CHECK(s.values[0] == doctest::Approx(ref[0]).epsilon(0.01));
    for (std::size_t j = 0; j < 4; ++j) CHECK(s.values[j] >= ref[j]); // conforming upper bounds
  }
}

TEST_CASE("rectangle oracle, default elements") {
  const Profile rect = Profile::flat(0.7, 0.5, 1.5);
  for (auto bc : {D, N}) {
    const auto sp = assemble_mapped(rect, 0.2, 200, 12, bc, orders(2, 3));
    const auto s = solve_strip(sp, 5);
    const auto ref = oracle::rectangle(2.0, 0.7 * 0.2, bc == N, 5);
    for (std::size_t j = 0; j < 5; ++j) CHECK(s.values[j] == doctest::Approx(ref[j]).epsilon(1e-7));
  }
}

TEST_CASE("matrices are symmetric, mass and stiffness positive definite") {
  for (auto o : {bilinear(), orders(2, 3)}) {
    const auto sp = assemble_mapped(harmonic, 0.1, 64, 6, D, o);
    CHECK(asymmetry(sp.stiffness) < 1e-14);
    CHECK(asymmetry(sp.mass) < 1e-14);
    const Eigen::MatrixXd K(sp.stiffness), Mm(sp.mass);
    CHECK(Eigen::LLT<Eigen::MatrixXd>(Mm).info() == Eigen::Success);
    CHECK(Eigen::LLT<Eigen::MatrixXd>(K).info() == Eigen::Success);
  }
}

TEST_CASE("stiffness is invariant under the mirror permutation") {
  for (auto bc : {D, N}) {
    const auto sp = assemble_mapped(harmonic, 0.1, 40, 6, bc, orders(2, 2));
    const auto perm = mirror(sp);
    const Eigen::MatrixXd K(sp.stiffness);
    double worst = 0.0;
    for (std::size_t i = 0; i < sp.n_dof(); ++i)
      for (std::size_t j = 0; j < sp.n_dof(); ++j)
        worst = std::max(worst, std::abs(K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                                         K(static_cast<Eigen::Index>(perm[i]), static_cast<Eigen::Index>(perm[j]))));
    CHECK(worst < 1e-12 * K.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("mass matrix sums to the strip area") {
  const double eps = 0.3;
  // int_{-0.9}^{0.9} (1 - x^2) dx = 1.8 - 2 * 0.9^3 / 3
  const double area = eps * (1.8 - 2.0 * 0.729 / 3.0);
  for (auto o : {bilinear(), orders(2, 3)}) {
    o.keep_all_nodes = true;
    const auto sp = assemble_mapped(harmonic, eps, 50, 5, D, o);
    CHECK(sp.mass.sum() == doctest::Approx(area).epsilon(o.x_order == 1 ? 1e-4 : 1e-13));
  }
  // Lorentzian: integrate 0.7 + 0.3 / (1 + x^2) over [-3, 3] in closed form.
  const Profile lz = Profile::lorentzian(1.0, 0.7, 1.0, 2, 3.0);
  AssemblyOptions o = orders(2, 2);
  o.keep_all_nodes = true;
  const auto sp = assemble_mapped(lz, 0.2, 200, 4, D, o);
  CHECK(sp.mass.sum() == doctest::Approx(0.2 * (4.2 + 0.6 * std::atan(3.0))).epsilon(1e-9));
}

TEST_CASE("DN eigenvalues lie below D eigenvalues, all above the floor") {
  for (double eps : {0.2, 0.1}) {
    const auto d = solve_strip(assemble_mapped(harmonic, eps, 400, 8, D), 4);
    const auto n = solve_strip(assemble_mapped(harmonic, eps, 400, 8, N), 4);
    const double floor = spectral_floor(harmonic, eps);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(n.shifted_values[j] <= d.shifted_values[j] + 1e-9 * d.values[j]);
      CHECK(d.values[j] >= floor);
      CHECK(n.values[j] >= floor);
    }
  }
}

TEST_CASE("mass orthonormality and residuals") {
  for (auto bc : {D, N}) {
    const auto sp = assemble_mapped(harmonic, 0.1, 400, 12, bc);
    SolveOptions2D opts;
    opts.tol = 1e-10;
    const auto s = solve_strip(sp, 5, opts);
    const Eigen::MatrixXd G = s.vectors.transpose() * (sp.mass * s.vectors);
    CHECK((G - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-8);
    for (double r : s.residuals) CHECK(r <= opts.tol);
    for (std::size_t j = 1; j < 5; ++j) CHECK(s.values[j] >= s.values[j - 1]);
  }
}

TEST_CASE("eigenfunction parity alternates on a symmetric grid") {
  const auto sp = assemble_mapped(harmonic, 0.1, 200, 8, D);
  const auto s = solve_strip(sp, 3);
  const auto perm = mirror(sp);
  for (Eigen::Index j = 0; j < 3; ++j) {
    const double sign = j % 2 == 0 ? 1.0 : -1.0;
    double worst = 0.0;
    for (std::size_t d = 0; d < sp.n_dof(); ++d)
      worst = std::max(worst, std::abs(s.vectors(static_cast<Eigen::Index>(d), j) -
                                       sign * s.vectors(static_cast<Eigen::Index>(perm[d]), j)));
    CHECK(worst < 1e-6 * s.vectors.col(j).cwiseAbs().maxCoeff());
  }
}

TEST_CASE("nested refinement never raises an eigenvalue") {
  const Profile p = Profile::polynomial(1.0, 0.8, 1.2, 2, 0.7, 0.8);
  for (auto bc : {D, N}) {
    const auto coarse_nodes = piecewise_uniform_nodes({-0.7, 0.0, 0.8}, {30, 34});
    const auto fine_nodes = piecewise_uniform_nodes({-0.7, 0.0, 0.8}, {60, 68});
    const auto a = solve_strip(assemble_mapped(p, 0.2, coarse_nodes, 4, bc, orders(1, 2)), 3);
    const auto b = solve_strip(assemble_mapped(p, 0.2, fine_nodes, 4, bc, orders(1, 2)), 3);
    const auto c = solve_strip(assemble_mapped(p, 0.2, fine_nodes, 8, bc, orders(1, 2)), 3);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(b.values[j] <= a.values[j] * (1.0 + 1e-10));
      CHECK(c.values[j] <= b.values[j] * (1.0 + 1e-10));
    }
  }
}

TEST_CASE("inertia count matches the computed spectrum") {
  const auto sp = assemble_mapped(harmonic, 0.2, 100, 6, D);
  const auto s = solve_strip(sp, 4);
  CHECK(count_below(sp, 0.5 * (s.values[1] + s.values[2])) == 2);
  CHECK(count_below(sp, s.values[0] * (1.0 - 1e-6)) == 0);
  CHECK(count_below(sp, spectral_floor(harmonic, 0.2)) == 0);
}

TEST_CASE("product ansatz error: identity and sign invariance") {
  const double eps = 0.1;
  const auto limit = solve_limit(harmonic, 10.0, 8000, 2);
  const auto sp = assemble_mapped(harmonic, eps, 400, 12, D);
  auto s = solve_strip(sp, 2);

  // The ansatz compared against itself, and against its negative.
  Spectrum2D self = s;
  self.vectors.col(0) = product_ansatz(sp, limit, 1);
  CHECK(product_ansatz_error(sp, self, 1, limit) == 0.0);
  self.vectors.col(0) *= -1.0;
  CHECK(product_ansatz_error(sp, self, 1, limit) == 0.0);

  const double e1 = product_ansatz_error(sp, s, 1, limit);
  s.vectors.col(0) *= -1.0;
  CHECK(product_ansatz_error(sp, s, 1, limit) == e1);
  CHECK(e1 >= 0.0);
  CHECK(e1 <= 2.0);
  CHECK(e1 < 0.05);

  CHECK_THROWS_AS(product_ansatz_error(sp, s, 3, limit), Error);
  try {
    product_ansatz_error(sp, s, 3, limit);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Index);
  }
}

TEST_CASE("kink profiles need a node at the origin") {
  const Profile kink = Profile::polynomial(1.0, 1.0, 1.0, 1, 0.5, 0.5);
  CHECK_NOTHROW(assemble_mapped(kink, 0.1, 40, 4, D));
  const auto nodes = piecewise_uniform_nodes({-0.5, 0.5}, {41});
  try {
    assemble_mapped(kink, 0.1, nodes, 4, D);
    FAIL("expected an assembly error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Assembly);
  }
}

TEST_CASE("grid arguments are validated") {
  CHECK_THROWS_AS(assemble_mapped(harmonic, 0.1, 4, 12, D), Error);
  CHECK_THROWS_AS(assemble_mapped(harmonic, 0.1, 40, 2, D), Error);
  CHECK_THROWS_AS(assemble_mapped(harmonic, 0.0, 40, 12, D), Error);
}

TEST_CASE("grid rule") {
  CHECK(default_nx(harmonic, 0.2) == 400);
  CHECK(default_nx(harmonic, 0.001) == 1266);
  const auto nodes = default_x_nodes(harmonic, 401);
  CHECK(std::count(nodes.begin(), nodes.end(), 0.0) == 1);
}

TEST_CASE("matrix and eigenvector dumps") {
  const auto dir = std::filesystem::temp_directory_path() / "thinstrip_dump_test";
  std::filesystem::create_directories(dir);
  const auto sp = assemble_mapped(harmonic, 0.2, 16, 4, D, bilinear());
  const auto s = solve_strip(sp, 1);
  write_matrix_market(dir / "K.mtx", sp.stiffness);
  std::ifstream in(dir / "K.mtx");
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("%%MatrixMarket", 0) == 0);

  write_eigenvector_csv(dir / "v.csv", sp, s, 0);
  std::ifstream vin(dir / "v.csv");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(vin, line)) ++lines;
  CHECK(lines == 1 + sp.x_nodes.size() * sp.n_t_nodes());

  CHECK_THROWS_AS(write_matrix_market(dir / "missing" / "K.mtx", sp.stiffness), Error);
  std::filesystem::remove_all(dir);
}
