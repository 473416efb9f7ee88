#include "thinstrip/profile.hpp"

#include "thinstrip/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace thinstrip {

namespace {

double ipow(double x, int m) {
  double r = 1.0;
  for (int i = 0; i < m; ++i) r *= x;
  return r;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void check_finite_positive(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0)
    fail(ErrorKind::Parameter, std::string(name) + " must be finite and > 0");
}

} // namespace

Profile::Profile(Family family, bool flat) : family_(std::move(family)), flat_(flat) { validate(); }

Profile Profile::polynomial(double M, double c_plus, double c_minus, int m, double a, double b) {
  return Profile(PolynomialCap{M, c_plus, c_minus, m, a, b});
}

Profile Profile::lorentzian(double M, double M_tail, double beta, int m, double R) {
  return Profile(LorentzianCap{M, M_tail, beta, m, R});
}

Profile Profile::sampled(std::vector<double> x, std::vector<double> h, int m, double c_plus, double c_minus) {
  if (x.size() != h.size()) fail(ErrorKind::Parameter, "sampled profile needs as many h values as x values");
  const auto zero = std::find(x.begin(), x.end(), 0.0);
  if (zero == x.end()) fail(ErrorKind::Parameter, "sampled profile must include x = 0");
  const double M = h[static_cast<std::size_t>(zero - x.begin())];
  return Profile(SampledCap{std::move(x), std::move(h), m, c_plus, c_minus, M});
}

Profile Profile::flat(double M, double a, double b) {
  return Profile(PolynomialCap{M, 0.0, 0.0, 2, a, b}, true);
}

void Profile::validate() const {
  std::visit(overloaded{
                 [&](const PolynomialCap& c) {
                   check_finite_positive(c.M, "M");
                   check_finite_positive(c.a, "a");
                   check_finite_positive(c.b, "b");
                   if (c.m < 1) fail(ErrorKind::Parameter, "cap order m must be >= 1");
                   if (!flat_) {
                     check_finite_positive(c.c_plus, "c_plus");
                     check_finite_positive(c.c_minus, "c_minus");
                   }
                   if (c.M - c.c_minus * ipow(c.a, c.m) <= 0.0)
                     fail(ErrorKind::Parameter, "h(-a) <= 0: need M - c_minus a^m > 0");
                   if (c.M - c.c_plus * ipow(c.b, c.m) <= 0.0)
                     fail(ErrorKind::Parameter, "h(b) <= 0: need M - c_plus b^m > 0");
                 },
                 [&](const LorentzianCap& c) {
                   check_finite_positive(c.M, "M");
                   check_finite_positive(c.M_tail, "M_tail");
                   check_finite_positive(c.beta, "beta");
                   check_finite_positive(c.R, "R");
                   if (c.m < 1) fail(ErrorKind::Parameter, "cap order m must be >= 1");
                   if (c.M_tail >= c.M) fail(ErrorKind::Parameter, "need 0 < M_tail < M");
                 },
                 [&](const SampledCap& c) {
                   if (c.m < 1) fail(ErrorKind::Parameter, "cap order m must be >= 1");
                   check_finite_positive(c.c_plus, "c_plus");
                   check_finite_positive(c.c_minus, "c_minus");
                   if (c.x.front() >= 0.0 || c.x.back() <= 0.0)
                     fail(ErrorKind::Parameter, "sampled profile needs samples on both sides of 0");
                   for (std::size_t i = 0; i < c.x.size(); ++i) {
                     if (!std::isfinite(c.x[i])) fail(ErrorKind::Parameter, "sample positions must be finite");
                     check_finite_positive(c.h[i], "sampled h");
                     if (i > 0 && !(c.x[i] > c.x[i - 1]))
                       fail(ErrorKind::Parameter, "sample positions must be strictly increasing");
                     if (c.x[i] != 0.0 && !(c.h[i] < c.M))
                       fail(ErrorKind::Parameter, "h must take its strict maximum at x = 0");
                   }
                   // The innermost samples must roughly agree with the declared cap.
                   const auto z = static_cast<std::size_t>(std::find(c.x.begin(), c.x.end(), 0.0) - c.x.begin());
                   const double rp = (c.M - c.h[z + 1]) / (c.c_plus * ipow(c.x[z + 1], c.m));
                   const double rm = (c.M - c.h[z - 1]) / (c.c_minus * ipow(-c.x[z - 1], c.m));
                   if (!(rp > 0.5 && rp < 2.0 && rm > 0.5 && rm < 2.0))
                     fail(ErrorKind::Parameter, "samples next to 0 disagree with M - c |x|^m by more than a factor 2");
                 },
             },
             family_);
}

double Profile::peak() const noexcept {
  return std::visit([](const auto& c) { return c.M; }, family_);
}

double Profile::c_plus() const noexcept {
  return std::visit(overloaded{[](const PolynomialCap& c) { return c.c_plus; },
                               [](const LorentzianCap& c) { return (c.M - c.M_tail) * c.beta; },
                               [](const SampledCap& c) { return c.c_plus; }},
                    family_);
}

double Profile::c_minus() const noexcept {
  return std::visit(overloaded{[](const PolynomialCap& c) { return c.c_minus; },
                               [](const LorentzianCap& c) { return (c.M - c.M_tail) * c.beta; },
                               [](const SampledCap& c) { return c.c_minus; }},
                    family_);
}

int Profile::order() const noexcept {
  return std::visit([](const auto& c) { return c.m; }, family_);
}

double Profile::lower() const noexcept {
  return std::visit(overloaded{[](const PolynomialCap& c) { return -c.a; },
                               [](const LorentzianCap& c) { return -c.R; },
                               [](const SampledCap& c) { return c.x.front(); }},
                    family_);
}

double Profile::upper() const noexcept {
  return std::visit(overloaded{[](const PolynomialCap& c) { return c.b; },
                               [](const LorentzianCap& c) { return c.R; },
                               [](const SampledCap& c) { return c.x.back(); }},
                    family_);
}

Profile Profile::with_domain(double lo, double hi) const {
  if (!(lo < 0.0 && hi > 0.0)) fail(ErrorKind::Parameter, "domain must contain 0 in its interior");
  return std::visit(overloaded{[&](const PolynomialCap& c) {
                                 PolynomialCap r = c;
                                 r.a = -lo;
                                 r.b = hi;
                                 return Profile(r, flat_);
                               },
                               [&](const LorentzianCap& c) {
                                 if (std::abs(lo + hi) > 1e-14 * hi)
                                   fail(ErrorKind::Parameter, "Lorentzian cap domain must be symmetric");
                                 LorentzianCap r = c;
                                 r.R = hi;
                                 return Profile(r);
                               },
                               [&](const SampledCap& c) {
                                 if (lo < c.x.front() || hi > c.x.back())
                                   fail(ErrorKind::Parameter, "a sampled profile cannot be extended");
                                 SampledCap r = c;
                                 r.x.clear();
                                 r.h.clear();
                                 r.x.push_back(lo);
                                 r.h.push_back(height(*this, lo));
                                 for (std::size_t i = 0; i < c.x.size(); ++i)
                                   if (c.x[i] > lo && c.x[i] < hi) {
                                     r.x.push_back(c.x[i]);
                                     r.h.push_back(c.h[i]);
                                   }
                                 r.x.push_back(hi);
                                 r.h.push_back(height(*this, hi));
                                 return Profile(r);
                               }},
                    family_);
}

std::string Profile::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{[&](const PolynomialCap& c) {
                          os << (flat_ ? "flat" : "polynomial") << "(M=" << c.M;
                          if (!flat_) os << ", c_plus=" << c.c_plus << ", c_minus=" << c.c_minus << ", m=" << c.m;
                          os << ", a=" << c.a << ", b=" << c.b << ")";
                        },
                        [&](const LorentzianCap& c) {
                          os << "lorentzian(M=" << c.M << ", M_tail=" << c.M_tail << ", beta=" << c.beta
                             << ", m=" << c.m << ", R=" << c.R << ")";
                        },
                        [&](const SampledCap& c) {
                          os << "sampled(m=" << c.m << ", c_plus=" << c.c_plus << ", c_minus=" << c.c_minus << ", x=[";
                          for (std::size_t i = 0; i < c.x.size(); ++i) os << (i ? "," : "") << c.x[i];
                          os << "], h=[";
                          for (std::size_t i = 0; i < c.h.size(); ++i) os << (i ? "," : "") << c.h[i];
                          os << "])";
                        }},
             family_);
  return os.str();
}

namespace {

// Grid nodes computed as lo + i*dx may miss the end points by a few ulps.
double in_domain(const Profile& p, double x) {
  const double lo = p.lower(), hi = p.upper();
  const double slack = 1e-12 * (hi - lo);
  if (!std::isfinite(x) || x < lo - slack || x > hi + slack) {
    std::ostringstream os;
    os << "x = " << x << " outside profile domain [" << lo << ", " << hi << "]";
    fail(ErrorKind::Domain, os.str());
  }
  return std::clamp(x, lo, hi);
}

// Index i of the sample interval [x_i, x_{i+1}] holding x.
std::size_t segment(const SampledCap& c, double x) {
  const auto it = std::upper_bound(c.x.begin() + 1, c.x.end() - 1, x);
  return static_cast<std::size_t>(it - c.x.begin()) - 1;
}

// Finite-difference h' at sample i: central inside, one-sided at the ends.
// At x = 0 it is 0 for m >= 2 and the one-sided difference on `side` for
// the m = 1 kink, so that the slope never straddles the peak.
double sampled_slope(const SampledCap& c, std::size_t i, Side side) {
  const std::size_t last = c.x.size() - 1;
  auto diff = [&](std::size_t l, std::size_t r) { return (c.h[r] - c.h[l]) / (c.x[r] - c.x[l]); };
  if (c.x[i] == 0.0) {
    if (c.m >= 2) return 0.0;
    return side == Side::Right ? diff(i, i + 1) : diff(i - 1, i);
  }
  if (i == 0) return diff(0, 1);
  if (i == last) return diff(last - 1, last);
  // Do not difference across the peak.
  if (c.x[i - 1] == 0.0 && c.m == 1) return diff(i, i + 1);
  if (c.x[i + 1] == 0.0 && c.m == 1) return diff(i - 1, i);
  return diff(i - 1, i + 1);
}

} // namespace

double height(const Profile& p, double x) {
  x = in_domain(p, x);
  return std::visit(overloaded{[&](const PolynomialCap& c) {
                                 return x >= 0.0 ? c.M - c.c_plus * ipow(x, c.m)
                                                 : c.M - c.c_minus * ipow(-x, c.m);
                               },
                               [&](const LorentzianCap& c) {
                                 // Written so that h(0) == M exactly.
                                 const double s = c.beta * ipow(std::abs(x), c.m);
                                 return c.M - (c.M - c.M_tail) * (s / (1.0 + s));
                               },
                               [&](const SampledCap& c) {
                                 const std::size_t i = segment(c, x);
                                 const double w = (x - c.x[i]) / (c.x[i + 1] - c.x[i]);
                                 return (1.0 - w) * c.h[i] + w * c.h[i + 1];
                               }},
                    p.family());
}

double height_derivative(const Profile& p, double x, Side side) {
  x = in_domain(p, x);
  const int m = p.order();
  if (x == 0.0) {
    if (m >= 2 || p.is_flat()) return 0.0;
    if (side == Side::None)
      fail(ErrorKind::Kink, "h'(0) is undefined for m = 1; a one-sided limit must be requested");
    if (const auto* c = std::get_if<SampledCap>(&p.family())) {
      const auto z = static_cast<std::size_t>(std::find(c->x.begin(), c->x.end(), 0.0) - c->x.begin());
      return sampled_slope(*c, z, side);
    }
    return side == Side::Right ? -p.c_plus() : p.c_minus();
  }
  return std::visit(overloaded{[&](const PolynomialCap& c) {
                                 return x > 0.0 ? -c.c_plus * m * ipow(x, m - 1)
                                                : c.c_minus * m * ipow(-x, m - 1);
                               },
                               [&](const LorentzianCap& c) {
                                 const double ax = std::abs(x);
                                 const double d = 1.0 + c.beta * ipow(ax, m);
                                 const double mag = (c.M - c.M_tail) * c.beta * m * ipow(ax, m - 1) / (d * d);
                                 return x > 0.0 ? -mag : mag;
                               },
                               [&](const SampledCap& c) {
                                 const std::size_t i = segment(c, x);
                                 const Side towards = x > 0.0 ? Side::Right : Side::Left;
                                 const double w = (x - c.x[i]) / (c.x[i + 1] - c.x[i]);
                                 return (1.0 - w) * sampled_slope(c, i, towards) + w * sampled_slope(c, i + 1, towards);
                               }},
                    p.family());
}

double transverse_excess(const Profile& p, double x) {
  const double h = height(p, x);
  const double M = p.peak();
  // (M^2 - h^2) / (h^2 M^2) keeps the excess exactly >= 0 in floating point.
  return kPi * kPi * ((M - h) * (M + h)) / (h * h * M * M);
}

double gradient_term(const Profile& p, double x, Side side) {
  const double r = height_derivative(p, x, side) / height(p, x);
  return (kPi * kPi / 3.0 + 0.25) * r * r;
}

double effective_potential(const Profile& p, double eps, double x, Side side) {
  if (!(eps > 0.0) || !std::isfinite(eps)) fail(ErrorKind::Parameter, "eps must be > 0");
  return transverse_excess(p, x) / (eps * eps) + gradient_term(p, x, side);
}

double limit_potential(const Profile& p, double x) {
  const double M = p.peak();
  const double c = x >= 0.0 ? p.c_plus() : p.c_minus();
  return 2.0 * kPi * kPi * c * ipow(std::abs(x), p.order()) / (M * M * M);
}

double alpha(const Profile& p) { return 2.0 / (p.order() + 2.0); }

double spectral_floor(const Profile& p, double eps) {
  if (!(eps > 0.0)) fail(ErrorKind::Parameter, "eps must be > 0");
  const double M = p.peak();
  return kPi * kPi / (M * M * eps * eps);
}

} // namespace thinstrip
