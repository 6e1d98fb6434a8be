#include "fbac/potential.hpp"

#include <algorithm>
#include <cmath>

#include "fbac/errors.hpp"

namespace fbac {

PotentialSpec PotentialSpec::make(double delta, double eps) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  if (!(delta == 0.0 || (delta > 0.0 && delta <= 2.0)))
    throw DomainError("delta must be 0 or lie in (0, 2]");
  PotentialSpec p;
  p.delta = delta;
  p.eps = eps;
  if (delta == 0.0) {
    p.W = [](double u) { return std::abs(u) < 1.0 ? 1.0 : 0.0; };
    p.dW = [](double) { return 0.0; };
    p.ddW = [](double) { return 0.0; };
    p.f = [](double) { return 0.0; };
    p.df = [](double) { return 0.0; };
    return p;
  }
  const auto clampu = [delta](double u) {
    if (delta >= 2.0) return u;
    return std::clamp(u, -1.0 + kPotentialClamp, 1.0 - kPotentialClamp);
  };
  p.W = [delta](double u) {
    const double s = 1.0 - u * u;
    return s <= 0.0 ? 0.0 : std::pow(s, delta);
  };
  p.dW = [delta, clampu](double u0) {
    const double u = clampu(u0);
    const double s = std::max(1.0 - u * u, 0.0);
    if (delta == 1.0) return -2.0 * u;
    return -2.0 * delta * u * std::pow(s, delta - 1.0);
  };
  p.ddW = [delta, clampu](double u0) {
    const double u = clampu(u0);
    const double s = std::max(1.0 - u * u, 0.0);
    if (delta == 1.0) return -2.0;
    if (delta == 2.0) return -4.0 + 12.0 * u * u;
    return -2.0 * delta * std::pow(s, delta - 1.0) +
           4.0 * delta * (delta - 1.0) * u * u * std::pow(s, delta - 2.0);
  };
  const double scale = 1.0 / (2.0 * eps * eps);
  auto dW = p.dW;
  auto ddW = p.ddW;
  p.f = [dW, scale](double u) { return scale * dW(u); };
  p.df = [ddW, scale](double u) { return scale * ddW(u); };
  return p;
}

PotentialSpec PotentialSpec::with_reaction(
    std::function<double(double)> f_new,
    std::function<double(double)> df_new) const {
  PotentialSpec p = *this;
  p.f = std::move(f_new);
  p.df = std::move(df_new);
  return p;
}

}  // namespace fbac
