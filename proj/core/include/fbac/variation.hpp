#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fbac/field.hpp"
#include "fbac/potential.hpp"

namespace fbac {

/// Domain deformation direction U with its Jacobian (grad U)_ij = d_j U_i.
struct DeformationField {
  std::function<Vec(const Vec&)> U;
  std::function<Mat(const Vec&)> grad_U;  // empty: central differences

  Vec operator()(const Vec& x) const { return U(x); }
  Mat jacobian(const Vec& x, double h) const;

  /// amplitude * beta(|x - c|/radius) with beta(s) = exp(1 - 1/(1 - s^2)).
  static DeformationField bump(const Vec& center, double radius,
                               const Vec& amplitude);
  /// beta(|x - c|/radius) * (-(y - cy), x - cx): divergence-free, tangent to
  /// circles about c (2D).
  static DeformationField swirl(const Vec& center, double radius,
                                double amplitude);
  static DeformationField zero(int dim);
};

/// Energy density e = eps |grad u|^2 + W(u)/eps and stress
/// T = 2 eps grad u (x) grad u - e I at one node.
struct StressSample {
  Mat T;
  double e = 0.0;
};

StressSample stress(const Vec& grad, double u, const PotentialSpec& pot);

/// J = int eps |grad u|^2 + W(u)/eps by dual-cell quadrature, restricted to
/// `domain` when given. For delta = 0 the integrand lives on {|u| < 1} with
/// sub-cell band measure from a linear extension of u.
double energy(const ScalarField& u, const PotentialSpec& pot,
              const BandMask* domain = nullptr);

struct VariationReport {
  double delta = 0.0;
  double eps = 0.0;
  double analytic = 0.0;
  double fd = 0.0;
  double rel_gap = 0.0;
  double bulk_term = 0.0;
  double boundary_term = 0.0;

  nlohmann::json to_json() const;
};

/// delta J[U] = int div T . U - oint n^T T U over the band boundary (n the
/// outward band normal; absent for delta > 0, where U is compactly supported
/// in the grid box). The bulk integrand is (2 eps Lap u - W'(u)/eps) grad u.U.
/// Throws DomainError when delta = 0 and no boundary curve is found or the
/// grid is not 2D.
VariationReport inner_variation_analytic(const ScalarField& u,
                                         const DeformationField& U,
                                         const PotentialSpec& pot);

/// (J(t) - J(-t)) / (2 t) of the pullback energy
/// J(t) = int (eps |DPhi^-T grad u|^2 + W(u)/eps) det DPhi, Phi = Id + t U.
double inner_variation_fd(const ScalarField& u, const DeformationField& U,
                          const PotentialSpec& pot, double t_step);

/// Both evaluations plus their relative gap.
VariationReport compare_inner_variation(const ScalarField& u,
                                        const DeformationField& U,
                                        const PotentialSpec& pot,
                                        double t_step);

/// max over masked nodes of |div T - (2 eps Lap u - W'(u)/eps) grad u|, with
/// div T by central differences of nodal T. Nodes whose T-stencil leaves the
/// mask are skipped.
double div_stress_check(const ScalarField& u, const PotentialSpec& pot,
                        const BandMask& mask);

enum class InnerFlowVariant { StatedPde, LiteralVelocity };

/// ut for the variant: 2 Lap u - W'(u)/eps^2, or -eps |grad u|^2 times that.
/// Edge nodes (and, for delta = 0, nodes off the band) get 0.
std::vector<double> inner_flow_rate(const ScalarField& u,
                                    const PotentialSpec& pot,
                                    InnerFlowVariant variant);

/// Explicit Euler step of the variant; the result carries ut as dt_values.
/// Throws StepRejected when dt exceeds the explicit stability bound.
ScalarField inner_gradient_flow_step(const ScalarField& u,
                                     const PotentialSpec& pot, double dt,
                                     InnerFlowVariant variant);

}  // namespace fbac
