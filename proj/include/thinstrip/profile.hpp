#pragma once

// Height profiles h(x) of a thin strip {x in I, 0 < y < eps*h(x)} and the
// scalar fields derived from them.

#include <numbers>
#include <string>
#include <variant>
#include <vector>

namespace thinstrip {

inline constexpr double kPi = std::numbers::pi;

/// End condition on the vertical parts of the strip boundary. The horizontal
/// parts always carry a Dirichlet condition.
enum class BoundaryKind { Dirichlet, Neumann };

/// Which one-sided limit to take at x = 0 when the cap has a kink (m = 1).
enum class Side { None, Left, Right };

/// h(x) = M - c_plus x^m (x >= 0), M - c_minus |x|^m (x < 0) on [-a, b].
struct PolynomialCap {
  double M;
  double c_plus;
  double c_minus;
  int m;
  double a;
  double b;
};

/// h(x) = M_tail + (M - M_tail) / (1 + beta |x|^m) on [-R, R]. Near the peak
/// this behaves like M - (M - M_tail) beta |x|^m, so c_plus = c_minus =
/// (M - M_tail) beta.
struct LorentzianCap {
  double M;
  double M_tail;
  double beta;
  int m;
  double R;
};

/// Sampled profile: h interpolated linearly between the samples (x_i, h_i),
/// h' from finite differences of the samples. The samples must include
/// x = 0, where h takes its strict maximum M. The cap order m and the
/// coefficients c_plus, c_minus are declared, since a table cannot pin down
/// the limit of (M - h) / |x|^m.
struct SampledCap {
  std::vector<double> x;
  std::vector<double> h;
  int m;
  double c_plus;
  double c_minus;
  double M; // h at x = 0, filled in on construction
};

class Profile {
public:
  using Family = std::variant<PolynomialCap, LorentzianCap, SampledCap>;

  static Profile polynomial(double M, double c_plus, double c_minus, int m, double a, double b);
  static Profile lorentzian(double M, double M_tail, double beta, int m, double R);
  static Profile sampled(std::vector<double> x, std::vector<double> h, int m, double c_plus, double c_minus);

  /// Constant height M on [-a, b]. This has no unique maximum and is only
  /// meant as the separable rectangle oracle for the 2D discretization.
  static Profile flat(double M, double a, double b);

  const Family& family() const noexcept { return family_; }
  bool is_flat() const noexcept { return flat_; }
  bool is_lorentzian() const noexcept { return std::holds_alternative<LorentzianCap>(family_); }

  double peak() const noexcept;
  double c_plus() const noexcept;
  double c_minus() const noexcept;
  int order() const noexcept;
  double lower() const noexcept;
  double upper() const noexcept;
  bool has_kink() const noexcept { return order() == 1 && !flat_; }

  /// Same family with the domain replaced by [lo, hi]; for the Lorentzian
  /// cap only symmetric windows [-R, R] are representable, and a sampled
  /// profile can only shrink.
  Profile with_domain(double lo, double hi) const;

  std::string describe() const;

private:
  explicit Profile(Family family, bool flat = false);
  void validate() const;

  Family family_;
  bool flat_ = false;
};

/// h(x). Throws ErrorKind::Domain outside the profile domain.
double height(const Profile& p, double x);

/// h'(x). At x = 0 with m = 1 a side must be given.
double height_derivative(const Profile& p, double x, Side side = Side::None);

/// pi^2 (1/h^2 - 1/M^2): the eps-free part of the transverse excess.
double transverse_excess(const Profile& p, double x);

/// (pi^2/3 + 1/4) (h'/h)^2.
double gradient_term(const Profile& p, double x, Side side = Side::None);

/// Effective 1D potential of the transverse ground-mode reduction,
/// W(x) = transverse_excess(x) / eps^2 + gradient_term(x).
double effective_potential(const Profile& p, double eps, double x, Side side = Side::None);

/// q(x) = 2 pi^2 M^-3 c_(+/-) |x|^m, defined on the whole line.
double limit_potential(const Profile& p, double x);

/// Scaling exponent 2 / (m + 2).
double alpha(const Profile& p);

/// pi^2 / (M^2 eps^2), the bottom of the transverse spectrum at the peak.
double spectral_floor(const Profile& p, double eps);

} // namespace thinstrip
