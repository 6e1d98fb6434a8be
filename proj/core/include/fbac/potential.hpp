#pragma once

#include <functional>

namespace fbac {

/// Member of the double-well family W_delta on [-1, 1]:
///   W_delta(u) = (1 - u^2)^delta   for 0 < delta <= 2,
///   W_0(u)     = indicator of (-1, 1).
/// Also carries the reaction term f of ut = Lap u - f(u) and its derivative.
/// For delta = 0 the reaction vanishes (free-boundary case); for delta > 0
/// the default is f = W'/(2 eps^2), i.e. the time-halved form of
/// ut = 2 Lap u - W'(u)/eps^2.
struct PotentialSpec {
  double delta = 0.0;
  double eps = 0.1;
  std::function<double(double)> W;
  std::function<double(double)> dW;
  std::function<double(double)> ddW;
  std::function<double(double)> f;
  std::function<double(double)> df;

  static PotentialSpec make(double delta, double eps);
  static PotentialSpec free_boundary(double eps) { return make(0.0, eps); }

  bool free_boundary_case() const noexcept { return delta == 0.0; }

  /// Same potential with a custom reaction term (for manufactured fields).
  PotentialSpec with_reaction(std::function<double(double)> f_new,
                              std::function<double(double)> df_new) const;
};

/// Values of |u| are clamped to 1 - this before evaluating W' and W'' for
/// delta < 2, where the derivatives are singular or non-smooth at +-1.
inline constexpr double kPotentialClamp = 1e-8;

}  // namespace fbac
