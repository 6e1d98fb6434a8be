#include "fbac/rate_fit.hpp"

#include <cmath>

#include "fbac/errors.hpp"

namespace fbac {

RateFit fit_rate(std::span<const double> eps, std::span<const double> err) {
  if (eps.size() != err.size()) throw DomainError("fit_rate: size mismatch");
  if (eps.size() < 3) throw DomainError("fit_rate needs at least 3 points");
  const double n = static_cast<double>(eps.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || !(err[i] > 0.0) || !std::isfinite(eps[i]) ||
        !std::isfinite(err[i]))
      throw DomainError("fit_rate needs positive finite data");
    const double x = std::log(eps[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  const double cxy = sxy - sx * sy / n;
  if (!(vx > 0.0)) throw DomainError("fit_rate: eps values must differ");
  RateFit f;
  f.slope = cxy / vx;
  f.intercept = (sy - f.slope * sx) / n;
  f.r_squared = vy > 0.0 ? (cxy * cxy) / (vx * vy) : 1.0;
  f.points_used = static_cast<int>(eps.size());
  return f;
}

}  // namespace fbac
