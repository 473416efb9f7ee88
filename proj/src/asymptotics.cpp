#include "thinstrip/asymptotics.hpp"

#include "thinstrip/error.hpp"

#include <cmath>
#include <sstream>

namespace thinstrip {

Prediction predict_eigenvalue(const Profile& p, double eps, double mu_j, std::size_t j, std::string mu_source) {
  if (!(eps > 0.0)) fail(ErrorKind::Parameter, "eps must be > 0");
  if (!(mu_j > 0.0)) fail(ErrorKind::Parameter, "mu_j must be > 0");
  Prediction out;
  out.eps = eps;
  out.j = j;
  out.floor_term = spectral_floor(p, eps);
  out.correction_term = std::pow(eps, -2.0 * alpha(p)) * mu_j;
  out.predicted_lambda = out.floor_term + out.correction_term;
  out.mu_used = mu_j;
  out.mu_source = std::move(mu_source);
  return out;
}

double scaled_gap(double lambda, const Profile& p, double eps) {
  return std::pow(eps, 2.0 * alpha(p)) * (lambda - spectral_floor(p, eps));
}

double resolvent_gap(double lambda2d, double lambda_reduced, const Profile& p, double eps) {
  const double floor = spectral_floor(p, eps);
  if (!(lambda2d > floor)) {
    std::ostringstream os;
    os.precision(17);
    os << "2D eigenvalue " << lambda2d << " is not above the spectral floor " << floor;
    fail(ErrorKind::Numeric, os.str());
  }
  if (!(lambda_reduced > 0.0)) fail(ErrorKind::Parameter, "reduced eigenvalue must be > 0");
  return std::abs(1.0 / (lambda2d - floor) - 1.0 / lambda_reduced);
}

double loglog_slope(std::span<const double> eps, std::span<const double> values) {
  if (eps.size() != values.size() || eps.size() < 2) fail(ErrorKind::Parameter, "need >= 2 matching samples");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto n = static_cast<double>(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || !(values[i] > 0.0)) fail(ErrorKind::Parameter, "log-log fit needs positive samples");
    const double x = std::log(eps[i]), y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) fail(ErrorKind::Parameter, "log-log fit needs distinct eps values");
  return (n * sxy - sx * sy) / den;
}

} // namespace thinstrip
