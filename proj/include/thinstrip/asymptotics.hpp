#pragma once

// Two-term eigenvalue prediction and the observables used to check it
// against computed spectra.

#include "thinstrip/profile.hpp"

#include <cstddef>
#include <span>
#include <string>

namespace thinstrip {

/// lambda_j(eps) ~ pi^2 / (M^2 eps^2) + eps^{-2 alpha} mu_j.
struct Prediction {
  double eps = 0.0;
  std::size_t j = 0;
  double floor_term = 0.0;
  double correction_term = 0.0;
  double predicted_lambda = 0.0;
  double mu_used = 0.0;
  /// Where mu_j came from, e.g. the limit-solver grid.
  std::string mu_source;
};

Prediction predict_eigenvalue(const Profile& p, double eps, double mu_j, std::size_t j = 0,
                              std::string mu_source = {});

/// eps^{2 alpha} (lambda - pi^2 / (M^2 eps^2)). Not clamped: negative values
/// mean the eigenvalue sits below the spectral floor.
double scaled_gap(double lambda, const Profile& p, double eps);

/// |(lambda2d - pi^2 / (M^2 eps^2))^-1 - lambda_reduced^-1|.
double resolvent_gap(double lambda2d, double lambda_reduced, const Profile& p, double eps);

/// Least-squares slope of log(values) against log(eps). Needs at least two
/// points with positive values.
double loglog_slope(std::span<const double> eps, std::span<const double> values);

} // namespace thinstrip
