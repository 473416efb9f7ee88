#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/oracles.hpp"
#include "thinstrip/error.hpp"
#include "thinstrip/profile.hpp"

#include <cmath>

using namespace thinstrip;

namespace {

const Profile harmonic = Profile::polynomial(1.0, 1.0, 1.0, 2, 0.9, 0.9);

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

} // namespace

TEST_CASE("height at the peak and on the cap") {
  CHECK(height(harmonic, 0.0) == 1.0);
  CHECK(height(harmonic, 0.5) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("lorentzian tail approaches M_tail") {
  const Profile p = Profile::lorentzian(1.0, 0.5, 1.0, 2, 2000.0);
  // 0.5 + 0.5 / (1 + x^2) evaluated in long double.
  for (double x : {-1e3, 1e3}) {
    const long double ref = 0.5L + 0.5L / (1.0L + static_cast<long double>(x) * x);
    CHECK(std::abs(height(p, x) - static_cast<double>(ref)) < 1e-15);
    CHECK(std::abs(height(p, x) - 0.5) < 1e-5);
  }
}

TEST_CASE("height outside the domain is a domain error") {
  CHECK(kind_of([] { height(harmonic, 0.95); }) == ErrorKind::Domain);
  CHECK(kind_of([] { height(harmonic, -1.5); }) == ErrorKind::Domain);
}

TEST_CASE("height derivative") {
  CHECK(height_derivative(harmonic, 0.0) == 0.0);
  CHECK(height_derivative(harmonic, 0.5) == doctest::Approx(-1.0).epsilon(1e-15));
  const Profile kink = Profile::polynomial(1.0, 2.0, 0.5, 1, 0.4, 0.4);
  CHECK(height_derivative(kink, 0.0, Side::Right) == -2.0);
  CHECK(height_derivative(kink, 0.0, Side::Left) == 0.5);
  CHECK(kind_of([&] { height_derivative(kink, 0.0); }) == ErrorKind::Kink);
}

TEST_CASE("effective potential") {
  CHECK(effective_potential(harmonic, 0.3, 0.0) == 0.0);
  CHECK(effective_potential(harmonic, 0.01, 0.0) == 0.0);

  // Direct long double evaluation at eps = 0.1, x = 0.1.
  const long double pi = 3.141592653589793238462643383279503L;
  const long double h = 1.0L - 0.01L, dh = -0.2L, eps = 0.1L;
  const long double ref = pi * pi / (eps * eps) * (1.0L / (h * h) - 1.0L) + (pi * pi / 3.0L + 0.25L) * (dh / h) * (dh / h);
  CHECK(effective_potential(harmonic, 0.1, 0.1) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-13));
  CHECK(effective_potential(harmonic, 0.1, 0.1) == doctest::Approx(20.18).epsilon(1e-3));

  CHECK(kind_of([] { effective_potential(harmonic, 0.0, 0.1); }) == ErrorKind::Parameter);
  CHECK(kind_of([] { effective_potential(harmonic, -0.1, 0.1); }) == ErrorKind::Parameter);
}

TEST_CASE("limit potential") {
  CHECK(limit_potential(harmonic, 0.0) == 0.0);
  CHECK(limit_potential(harmonic, 0.5) == doctest::Approx(oracle::pi * oracle::pi / 2.0).epsilon(1e-15));
  // Defined beyond the profile domain.
  CHECK(limit_potential(harmonic, 5.0) == doctest::Approx(2.0 * oracle::pi * oracle::pi * 25.0).epsilon(1e-15));
  const Profile skew = Profile::polynomial(2.0, 1.0, 3.0, 3, 0.5, 1.0);
  CHECK(limit_potential(skew, 0.5) == doctest::Approx(2.0 * oracle::pi * oracle::pi / 8.0 * 0.125).epsilon(1e-14));
  CHECK(limit_potential(skew, -0.5) == doctest::Approx(2.0 * oracle::pi * oracle::pi / 8.0 * 3.0 * 0.125).epsilon(1e-14));
}

TEST_CASE("alpha") {
  CHECK(alpha(harmonic) == 0.5);
  CHECK(alpha(Profile::polynomial(1.0, 1.0, 1.0, 1, 0.5, 0.5)) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(alpha(Profile::polynomial(1.0, 1.0, 1.0, 4, 0.5, 0.5)) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("spectral floor") {
  CHECK(spectral_floor(harmonic, 0.1) == doctest::Approx(986.9604401089358).epsilon(1e-14));
  CHECK(spectral_floor(Profile::polynomial(2.0, 1.0, 1.0, 2, 1.0, 1.0), 0.1) ==
        doctest::Approx(986.9604401089358 / 4.0).epsilon(1e-14));
}

TEST_CASE("invalid profiles are rejected") {
  CHECK_THROWS_AS(Profile::polynomial(0.0, 1.0, 1.0, 2, 0.5, 0.5), Error);
  CHECK_THROWS_AS(Profile::polynomial(1.0, 0.0, 1.0, 2, 0.5, 0.5), Error);
  CHECK_THROWS_AS(Profile::polynomial(1.0, 1.0, 1.0, 0, 0.5, 0.5), Error);
  CHECK_THROWS_AS(Profile::polynomial(1.0, 1.0, 1.0, 2, 1.0, 0.5), Error); // h(-1) = 0
  CHECK_THROWS_AS(Profile::polynomial(1.0, 1.0, 1.0, 2, -0.1, 0.5), Error);
  CHECK_THROWS_AS(Profile::lorentzian(1.0, 1.0, 1.0, 2, 5.0), Error);
  CHECK_THROWS_AS(Profile::lorentzian(1.0, 0.0, 1.0, 2, 5.0), Error);
  CHECK_THROWS_AS(Profile::lorentzian(1.0, 0.5, 1.0, 2, 5.0).with_domain(-1.0, 2.0), Error);
}

// ---------------------------------------------------------------------------
// Properties over seeded random profiles.

namespace {

Profile random_polynomial(gen::Source& g) {
  const double M = g.uniform(0.5, 2.0);
  const int m = g.integer(1, 4);
  const double cp = g.uniform(0.2, 2.0), cm = g.uniform(0.2, 2.0);
  // Keep h >= M / 4 on the domain.
  const double a = std::pow(0.75 * M / cm, 1.0 / m) * g.uniform(0.3, 1.0);
  const double b = std::pow(0.75 * M / cp, 1.0 / m) * g.uniform(0.3, 1.0);
  return Profile::polynomial(M, cp, cm, m, a, b);
}

Profile random_profile(gen::Source& g) {
  if (g.integer(0, 2) == 0)
    return Profile::lorentzian(g.uniform(1.0, 2.0), g.uniform(0.2, 0.9), g.uniform(0.5, 3.0), g.integer(1, 4),
                               g.uniform(2.0, 10.0));
  return random_polynomial(g);
}

} // namespace

TEST_CASE("property: height is continuous and bounded by the peak") {
  gen::Source g(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Profile p = random_profile(g);
    const double x = g.uniform(p.lower(), p.upper());
    const double h = height(p, x);
    CHECK(h <= p.peak());
    CHECK(h > 0.0);
    double prev = 1.0;
    for (double d : {1e-3, 1e-5, 1e-7}) {
      const double xn = std::clamp(x + d, p.lower(), p.upper());
      const double jump = std::abs(height(p, xn) - h);
      CHECK(jump <= prev);
      prev = jump + 1e-15;
    }
  }
}

TEST_CASE("property: derivative matches central differences to second order") {
  gen::Source g(12);
  for (int trial = 0; trial < 200; ++trial) {
    const Profile p = random_profile(g);
    const double span = p.upper() - p.lower();
    double x = g.nonzero(p.lower() + 0.1 * span, p.upper() - 0.1 * span, 0.05 * span);
    auto fd = [&](double d) { return (height(p, x + d) - height(p, x - d)) / (2.0 * d); };
    const double exact = height_derivative(p, x);
    const double d = 0.01 * std::abs(x);
    const double e1 = std::abs(fd(d) - exact), e2 = std::abs(fd(d / 2.0) - exact);
    if (e1 < 1e-9) continue; // already at round-off (e.g. exact for quadratics)
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
  }
}

TEST_CASE("property: transverse excess is non-negative and vanishes only at the peak") {
  gen::Source g(13);
  for (int trial = 0; trial < 200; ++trial) {
    const Profile p = random_profile(g);
    CHECK(transverse_excess(p, 0.0) == 0.0);
    const double x = g.nonzero(p.lower(), p.upper(), 1e-6);
    CHECK(transverse_excess(p, x) > 0.0);
  }
}

TEST_CASE("property: eps^2 times the first term of W does not depend on eps") {
  gen::Source g(14);
  for (int trial = 0; trial < 200; ++trial) {
    const Profile p = random_profile(g);
    const double x = g.nonzero(p.lower(), p.upper(), 1e-6);
    const double e1 = g.uniform(0.01, 1.0), e2 = g.uniform(0.01, 1.0);
    const double t1 = (effective_potential(p, e1, x) - gradient_term(p, x)) * e1 * e1;
    const double t2 = (effective_potential(p, e2, x) - gradient_term(p, x)) * e2 * e2;
    CHECK(t1 == doctest::Approx(t2).epsilon(1e-10));
    CHECK(t1 == doctest::Approx(transverse_excess(p, x)).epsilon(1e-10));
  }
}

TEST_CASE("property: scaling identity of the limit potential") {
  gen::Source g(15);
  for (int trial = 0; trial < 200; ++trial) {
    const Profile p = random_polynomial(g);
    const double eps = g.uniform(0.01, 1.0), t = g.uniform(-5.0, 5.0);
    const double a = alpha(p);
    const double lhs = std::pow(eps, 2.0 * a) * limit_potential(p, t * std::pow(eps, a)) / (eps * eps);
    CHECK(lhs == doctest::Approx(limit_potential(p, t)).epsilon(1e-12).scale(1e-300));
  }
}

TEST_CASE("property: W is bounded below by sigma eps^-2 min(|x|^m, 1)") {
  gen::Source g(16);
  for (int trial = 0; trial < 30; ++trial) {
    const Profile p = random_profile(g);
    const double eps = g.uniform(0.02, 0.5);
    double sigma = INFINITY;
    for (int s = 0; s < 400; ++s) {
      const double x = g.nonzero(p.lower(), p.upper(), 1e-6);
      const double lower = std::min(std::pow(std::abs(x), p.order()), 1.0) / (eps * eps);
      sigma = std::min(sigma, effective_potential(p, eps, x) / lower);
    }
    CHECK(sigma > 0.0);
  }
}

TEST_CASE("property: limit potential is even for symmetric caps") {
  gen::Source g(17);
  for (int trial = 0; trial < 100; ++trial) {
    const double c = g.uniform(0.1, 3.0);
    const Profile p = Profile::polynomial(g.uniform(0.5, 2.0), c, c, g.integer(1, 5), 0.1, 0.1);
    const double x = g.uniform(0.0, 20.0);
    CHECK(limit_potential(p, -x) == limit_potential(p, x));
  }
}

// ---------------------------------------------------------------------------
// Sampled profiles.

namespace {

Profile sample(const Profile& exact, double lo, double hi, std::size_t n_side) {
  std::vector<double> x, h;
  for (std::size_t i = n_side; i > 0; --i) x.push_back(lo * static_cast<double>(i) / static_cast<double>(n_side));
  x.push_back(0.0);
  for (std::size_t i = 1; i <= n_side; ++i) x.push_back(hi * static_cast<double>(i) / static_cast<double>(n_side));
  for (double v : x) h.push_back(height(exact, v));
  return Profile::sampled(x, h, exact.order(), exact.c_plus(), exact.c_minus());
}

} // namespace

TEST_CASE("sampled profile interpolates the samples") {
  const Profile s = sample(harmonic, -0.9, 0.9, 18);
  CHECK(s.peak() == 1.0);
  CHECK(s.lower() == doctest::Approx(-0.9).epsilon(1e-15));
  CHECK(s.upper() == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(height(s, 0.5) == doctest::Approx(0.75).epsilon(1e-15));
  // Chords of 1 - x^2 on a 0.05 grid sit (x - x_i)(x_{i+1} - x) below it.
  CHECK(height(harmonic, 0.525) - height(s, 0.525) == doctest::Approx(0.025 * 0.025).epsilon(1e-10));
  CHECK(kind_of([&] { height(s, 0.95); }) == ErrorKind::Domain);
}

TEST_CASE("sampled derivative is exact at nodes for a quadratic") {
  const Profile s = sample(harmonic, -0.9, 0.9, 18);
  // Central differences are exact for quadratics.
  for (double x : {-0.85, -0.5, 0.05, 0.3}) CHECK(height_derivative(s, x) == doctest::Approx(-2.0 * x).epsilon(1e-12));
  CHECK(height_derivative(s, 0.0) == 0.0);
  CHECK(transverse_excess(s, 0.0) == 0.0);
}

TEST_CASE("sampled kink keeps one-sided slopes") {
  const Profile tent = Profile::polynomial(1.0, 0.5, 0.25, 1, 1.0, 1.0);
  const Profile s = sample(tent, -1.0, 1.0, 10);
  CHECK(height_derivative(s, 0.0, Side::Right) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(height_derivative(s, 0.0, Side::Left) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(kind_of([&] { height_derivative(s, 0.0); }) == ErrorKind::Kink);
  for (double x : {-0.95, -0.05, 0.05, 0.55, 1.0})
    CHECK(height_derivative(s, x) == doctest::Approx(height_derivative(tent, x)).epsilon(1e-12));
  CHECK(limit_potential(s, -2.0) == limit_potential(tent, -2.0));
}

TEST_CASE("sampled profiles are validated") {
  const std::vector<double> x{-0.5, 0.0, 0.5}, h{0.75, 1.0, 0.75};
  CHECK_NOTHROW(Profile::sampled(x, h, 2, 1.0, 1.0));
  CHECK(kind_of([&] { Profile::sampled({-0.5, 0.1, 0.5}, h, 2, 1.0, 1.0); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { Profile::sampled({-0.5, 0.0}, h, 2, 1.0, 1.0); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { Profile::sampled({0.5, 0.0, -0.5}, h, 2, 1.0, 1.0); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { Profile::sampled(x, {0.75, 1.0, 1.0}, 2, 1.0, 1.0); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { Profile::sampled(x, {0.75, 1.0, -0.1}, 2, 1.0, 1.0); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { Profile::sampled(x, h, 2, 5.0, 1.0); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { Profile::sampled(x, h, 0, 1.0, 1.0); }) == ErrorKind::Parameter);
}

TEST_CASE("sampled profile restricted to a sub-window") {
  const Profile s = sample(harmonic, -0.9, 0.9, 18).with_domain(-0.42, 0.3);
  CHECK(s.lower() == -0.42);
  CHECK(s.upper() == 0.3);
  CHECK(height(s, -0.42) == doctest::Approx(1.0 - 0.42 * 0.42).epsilon(1e-3));
  CHECK(height(s, 0.2) == doctest::Approx(0.96).epsilon(1e-15));
  CHECK(kind_of([&] { s.with_domain(-0.5, 0.3); }) == ErrorKind::Parameter);
}

TEST_CASE("property: sampled profiles converge to the sampled function") {
  gen::Source g(18);
  for (int trial = 0; trial < 20; ++trial) {
    const Profile exact = random_polynomial(g);
    const Profile coarse = sample(exact, exact.lower(), exact.upper(), 20);
    const Profile fine = sample(exact, exact.lower(), exact.upper(), 40);
    double ec = 0.0, ef = 0.0;
    for (int k = 0; k < 50; ++k) {
      const double x = g.uniform(exact.lower(), exact.upper());
      ec = std::max(ec, std::abs(height(coarse, x) - height(exact, x)));
      ef = std::max(ef, std::abs(height(fine, x) - height(exact, x)));
    }
    CHECK(ef <= ec + 1e-15);
  }
}
