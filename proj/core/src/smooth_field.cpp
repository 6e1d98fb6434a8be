#include "fbac/smooth_field.hpp"

#include <cmath>
#include <limits>

#include "fbac/errors.hpp"

namespace fbac {

AnalyticField::AnalyticField(int dim, ValueFn u, GradFn grad, HessFn hess)
    : dim_(dim), u_(std::move(u)), grad_(std::move(grad)), hess_(std::move(hess)) {
  if (dim < 1 || dim > 3) throw DomainError("field dimension must be 1, 2 or 3");
}

bool AnalyticField::contains(const Vec& x) const {
  if (x.size() != dim_) return false;
  if (!boxed_) return x.allFinite();
  for (int a = 0; a < dim_; ++a)
    if (!(x[a] >= lo_[a] && x[a] <= hi_[a])) return false;
  return true;
}

AnalyticField& AnalyticField::with_box(Vec lo, Vec hi) {
  boxed_ = true;
  lo_ = std::move(lo);
  hi_ = std::move(hi);
  return *this;
}

AnalyticField AnalyticField::paraboloid(int dim) {
  return AnalyticField(
      dim, [](const Vec& x) { return 0.5 * x.squaredNorm(); },
      [](const Vec& x) { return Vec(x); },
      [dim](const Vec&) { return identity(dim); });
}

AnalyticField AnalyticField::cone(int dim) {
  return AnalyticField(
      dim, [](const Vec& x) { return x.norm(); },
      [](const Vec& x) { return Vec(x / x.norm()); },
      [dim](const Vec& x) {
        const double r = x.norm();
        const Vec e = x / r;
        return Mat((identity(dim) - e * e.transpose()) / r);
      });
}

AnalyticField AnalyticField::planar(int dim, double eps) {
  return AnalyticField(
      dim, [eps](const Vec& x) { return x[0] / eps; },
      [dim, eps](const Vec&) {
        Vec g = zero_vec(dim);
        g[0] = 1.0 / eps;
        return g;
      },
      [dim](const Vec&) { return zero_mat(dim); });
}

GridField::GridField(ScalarField field, const BandMask* mask)
    : field_(std::move(field)) {
  const Grid& grid = field_.grid();
  const int n = grid.dim();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  grad_.assign(static_cast<std::size_t>(n), std::vector<double>(grid.size(), nan));
  hess_.assign(static_cast<std::size_t>(n * n),
               std::vector<double>(grid.size(), nan));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Derivatives d;
    try {
      d = derivatives(field_, grid.unravel(i), mask);
    } catch (const DomainError&) {
      continue;
    }
    for (int a = 0; a < n; ++a) {
      grad_[static_cast<std::size_t>(a)][i] = d.grad[a];
      for (int b = 0; b < n; ++b)
        hess_[static_cast<std::size_t>(a * n + b)][i] = d.hess(a, b);
    }
  }
}

double GridField::value(const Vec& x) const { return interpolate(field_, x); }

Vec GridField::gradient(const Vec& x) const {
  const int n = dim();
  Vec g(n);
  for (int a = 0; a < n; ++a)
    g[a] = interpolate(field_.grid(), grad_[static_cast<std::size_t>(a)], x);
  return g;
}

Mat GridField::hessian(const Vec& x) const {
  const int n = dim();
  Mat h(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      h(a, b) = interpolate(field_.grid(),
                            hess_[static_cast<std::size_t>(a * n + b)], x);
  return h;
}

bool GridField::contains(const Vec& x) const {
  return inside_box(field_.grid(), x);
}

}  // namespace fbac
