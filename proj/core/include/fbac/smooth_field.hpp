#pragma once

#include <functional>
#include <memory>

#include "fbac/field.hpp"

namespace fbac {

/// Point-evaluable scalar field with first and second derivatives. Backed
/// either by closed-form expressions or by a ScalarField.
class SmoothField {
 public:
  virtual ~SmoothField() = default;
  virtual int dim() const = 0;
  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;
  virtual Mat hessian(const Vec& x) const = 0;
  virtual bool contains(const Vec& x) const = 0;
};

class AnalyticField final : public SmoothField {
 public:
  using ValueFn = std::function<double(const Vec&)>;
  using GradFn = std::function<Vec(const Vec&)>;
  using HessFn = std::function<Mat(const Vec&)>;

  AnalyticField(int dim, ValueFn u, GradFn grad, HessFn hess);

  int dim() const override { return dim_; }
  double value(const Vec& x) const override { return u_(x); }
  Vec gradient(const Vec& x) const override { return grad_(x); }
  Mat hessian(const Vec& x) const override { return hess_(x); }
  bool contains(const Vec& x) const override;

  /// Restrict evaluation to an axis-aligned box (default: all of R^n).
  AnalyticField& with_box(Vec lo, Vec hi);

  /// u = |x|^2/2.
  static AnalyticField paraboloid(int dim);
  /// u = |x| (radial distance).
  static AnalyticField cone(int dim);
  /// u = x_1/eps.
  static AnalyticField planar(int dim, double eps);

 private:
  int dim_;
  ValueFn u_;
  GradFn grad_;
  HessFn hess_;
  bool boxed_ = false;
  Vec lo_, hi_;
};

/// Grid-backed field: value by multilinear interpolation of u, derivatives by
/// multilinear interpolation of nodal finite-difference gradients/Hessians.
class GridField final : public SmoothField {
 public:
  explicit GridField(ScalarField field, const BandMask* mask = nullptr);

  int dim() const override { return field_.grid().dim(); }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  Mat hessian(const Vec& x) const override;
  bool contains(const Vec& x) const override;

  const ScalarField& field() const { return field_; }

 private:
  ScalarField field_;
  std::vector<std::vector<double>> grad_;  // per axis
  std::vector<std::vector<double>> hess_;  // row-major a*n+b
};

}  // namespace fbac
