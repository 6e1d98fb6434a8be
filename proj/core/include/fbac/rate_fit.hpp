#pragma once

#include <span>

namespace fbac {

/// Least-squares line through (log eps, log err).
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
};

/// Needs at least 3 points, all strictly positive.
RateFit fit_rate(std::span<const double> eps, std::span<const double> err);

}  // namespace fbac
