#pragma once

#include <cstddef>
#include <optional>

#include "fbac/field.hpp"
#include "fbac/potential.hpp"

namespace fbac {

/// Level-surface curvature quantities of u at one point:
///   nu = grad u/|grad u|, P = I - nu nu^T, C = Hess u/|grad u|,
///   A = P C P, B = P C, H = tr A, phi = log(1/|grad u|),
///   grad phi = -C nu, dnu_phi = grad phi . nu, v = -ut/|grad u|.
struct CurvatureSample {
  Vec nu;
  Mat P;
  Mat C;
  Mat A;
  Mat B;
  double H = 0.0;
  double phi = 0.0;
  Vec grad_phi;
  double dnu_phi = 0.0;
  std::optional<double> v;
  double grad_norm = 0.0;
  double lap = 0.0;
};

/// Gradient floor that excludes the critical set but never the interface,
/// where |grad u| is about 1/eps.
inline double default_grad_floor(double eps) { return 1e-8 / eps; }

/// Builds a sample from (analytic or discrete) first and second derivatives.
/// Throws DegenerateGradient when |grad| <= grad_floor.
CurvatureSample sample_from_derivatives(const Vec& grad, const Mat& hess,
                                        std::optional<double> ut,
                                        double grad_floor);

/// Sample at a grid node. Stencils are restricted to `mask` when given.
CurvatureSample sample(const ScalarField& field, const NodeIndex& idx,
                       double grad_floor, const BandMask* mask = nullptr);

struct BlockFormReport {
  double normal_B = 0.0;       // |nu^T B|
  double trace_A = 0.0;        // |tr A - H|
  double dnu_phi = 0.0;        // |dnu_phi - (H - Lap u/|grad u|)|
  double norm_identity = 0.0;  // ||C|^2 - 2|grad phi|^2 - |A|^2 + dnu_phi^2|
  double max_defect = 0.0;
};

BlockFormReport block_form_check(const CurvatureSample& s);

/// Nodal residual with NaN at nodes that were not evaluated.
struct ResidualField {
  ScalarField residual;
  std::size_t evaluated = 0;
  std::size_t excluded = 0;  // masked nodes dropped for a degenerate gradient
  double max_abs = 0.0;
};

struct ResidualOptions {
  double grad_floor = 0.0;  // 0 selects default_grad_floor(pot.eps)
  int edge_margin = 0;      // skip nodes closer than this to the grid edge
};

/// r = v + H - dnu_phi - f(u)/|grad u| at every masked node.
ResidualField forced_mcf_residual(const ScalarField& field,
                                  const PotentialSpec& pot,
                                  const BandMask& mask,
                                  const ResidualOptions& opts = {});

/// r = dt_phi - Lap phi - |A|^2 + dnu_phi^2 - f'(u), with dt_phi from the
/// backward difference of phi between the two snapshots and every spatial
/// term taken from `now`.
ResidualField phi_evolution_residual(const ScalarField& now,
                                     const ScalarField& prev,
                                     const PotentialSpec& pot,
                                     const BandMask& mask,
                                     const ResidualOptions& opts = {});

/// phi = log(1/|grad u|) at masked nodes, NaN elsewhere or where degenerate.
std::vector<double> phi_field(const ScalarField& field, const BandMask& mask,
                              double grad_floor);

}  // namespace fbac
