#include "fbac/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fbac/errors.hpp"

namespace fbac {

CurvatureSample sample_from_derivatives(const Vec& grad, const Mat& hess,
                                        std::optional<double> ut,
                                        double grad_floor) {
  const int n = static_cast<int>(grad.size());
  const double g = grad.norm();
  if (!(g > grad_floor))
    throw DegenerateGradient("gradient below floor", g);
  CurvatureSample s;
  s.grad_norm = g;
  s.nu = grad / g;
  s.P = identity(n) - s.nu * s.nu.transpose();
  s.C = hess / g;
  s.A = s.P * s.C * s.P;
  s.B = s.P * s.C;
  s.H = s.A.trace();
  s.phi = -std::log(g);
  s.grad_phi = -(s.C * s.nu);
  s.dnu_phi = s.grad_phi.dot(s.nu);
  s.lap = hess.trace();
  if (ut) s.v = -*ut / g;
  return s;
}

CurvatureSample sample(const ScalarField& field, const NodeIndex& idx,
                       double grad_floor, const BandMask* mask) {
  const Derivatives d = derivatives(field, idx, mask);
  std::optional<double> ut;
  if (field.has_dt()) ut = field.dt_values()[field.grid().linear(idx)];
  return sample_from_derivatives(d.grad, d.hess, ut, grad_floor);
}

BlockFormReport block_form_check(const CurvatureSample& s) {
  BlockFormReport r;
  r.normal_B = (s.nu.transpose() * s.B).norm();
  r.trace_A = std::abs(s.A.trace() - s.H);
  r.dnu_phi = std::abs(s.dnu_phi - (s.H - s.lap / s.grad_norm));
  r.norm_identity = std::abs(frob2(s.C) - 2.0 * s.grad_phi.squaredNorm() -
                             frob2(s.A) + s.dnu_phi * s.dnu_phi);
  r.max_defect = std::max({r.normal_B, r.trace_A, r.dnu_phi, r.norm_identity});
  return r;
}

namespace {

double resolve_floor(const ResidualOptions& opts, const PotentialSpec& pot) {
  return opts.grad_floor > 0.0 ? opts.grad_floor : default_grad_floor(pot.eps);
}

ResidualField finish(const Grid& grid, double time, std::vector<double> r,
                     std::size_t evaluated, std::size_t excluded) {
  double m = 0.0;
  for (double x : r)
    if (std::isfinite(x)) m = std::max(m, std::abs(x));
  return ResidualField{ScalarField(grid, std::move(r), time), evaluated,
                       excluded, m};
}

}  // namespace

ResidualField forced_mcf_residual(const ScalarField& field,
                                  const PotentialSpec& pot,
                                  const BandMask& mask,
                                  const ResidualOptions& opts) {
  if (!field.has_dt()) throw DomainError("forced_mcf_residual needs dt_values");
  if (mask.inside.size() != field.grid().size())
    throw DomainError("mask does not match grid");
  if (mask.empty()) throw DomainError("forced_mcf_residual: empty mask");
  const double floor = resolve_floor(opts, pot);
  const Grid& grid = field.grid();
  std::vector<double> r(grid.size(), std::numeric_limits<double>::quiet_NaN());
  std::size_t evaluated = 0, excluded = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!mask.contains(i)) continue;
    const NodeIndex idx = grid.unravel(i);
    if (grid.edge_distance(idx) < opts.edge_margin) continue;
    try {
      const CurvatureSample s = sample(field, idx, floor, &mask);
      const double u = field[i];
      r[i] = *s.v + s.H - s.dnu_phi - pot.f(u) / s.grad_norm;
      ++evaluated;
    } catch (const DegenerateGradient&) {
      ++excluded;
    }
  }
  return finish(grid, field.time(), std::move(r), evaluated, excluded);
}

std::vector<double> phi_field(const ScalarField& field, const BandMask& mask,
                              double grad_floor) {
  const Grid& grid = field.grid();
  std::vector<double> phi(grid.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!mask.contains(i)) continue;
    const Derivatives d = derivatives(field, grid.unravel(i), &mask);
    const double g = d.grad.norm();
    if (g > grad_floor) phi[i] = -std::log(g);
  }
  return phi;
}

ResidualField phi_evolution_residual(const ScalarField& now,
                                     const ScalarField& prev,
                                     const PotentialSpec& pot,
                                     const BandMask& mask,
                                     const ResidualOptions& opts) {
  if (!now.grid().same_layout(prev.grid()))
    throw DomainError("phi_evolution_residual: snapshots on different grids");
  const double dt = now.time() - prev.time();
  if (dt == 0.0)
    throw DomainError("phi_evolution_residual: identical time stamps");
  if (mask.inside.size() != now.grid().size())
    throw DomainError("mask does not match grid");
  const double floor = resolve_floor(opts, pot);
  const Grid& grid = now.grid();

  const std::vector<double> phi_now = phi_field(now, mask, floor);
  const std::vector<double> phi_prev = phi_field(prev, mask, floor);

  std::vector<double> r(grid.size(), std::numeric_limits<double>::quiet_NaN());
  std::size_t evaluated = 0, excluded = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!mask.contains(i)) continue;
    const NodeIndex idx = grid.unravel(i);
    if (grid.edge_distance(idx) < opts.edge_margin) continue;
    if (!std::isfinite(phi_now[i]) || !std::isfinite(phi_prev[i])) {
      ++excluded;
      continue;
    }
    try {
      const CurvatureSample s = sample(now, idx, floor, &mask);
      const Derivatives dphi = derivatives(grid, phi_now, idx, &mask);
      const double dt_phi = (phi_now[i] - phi_prev[i]) / dt;
      r[i] = dt_phi - dphi.lap - frob2(s.A) + s.dnu_phi * s.dnu_phi -
             pot.df(now[i]);
      ++evaluated;
    } catch (const DegenerateGradient&) {
      ++excluded;
    } catch (const DomainError&) {
      ++excluded;  // phi stencil cut off by degenerate neighbours
    }
  }
  return finish(grid, now.time(), std::move(r), evaluated, excluded);
}

}  // namespace fbac
