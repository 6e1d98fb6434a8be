#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fbac/field.hpp"
#include "fbac/smooth_field.hpp"

namespace fbac {

enum class PathStatus { Complete, Truncated, Degenerate };

std::string to_string(PathStatus s);

/// Trajectory of F(x0, tau) through the level sets of u:
/// dF/dtau = grad u / |grad u|^2, F(x0, tau0) = x0, sigma = 1/|grad u o F|.
struct ImmersionPath {
  std::vector<double> taus;
  std::vector<Vec> points;
  std::vector<double> sigmas;
  std::vector<double> u_of_F;
  PathStatus status = PathStatus::Complete;

  std::size_t size() const { return taus.size(); }
};

struct ImmersionOptions {
  double max_dtau = 2.5e-4;  // output spacing in tau; RK steps never cross it
  double grad_floor = 1e-12;
  int max_steps = 2'000'000;
};

/// Dormand-Prince 5(4) integration with absolute error tolerance `tol` on F.
/// Stops with Truncated status when the path would leave the field's domain
/// and with Degenerate status when |grad u| drops below the floor.
ImmersionPath integrate_immersion(const SmoothField& field, const Vec& x0,
                                  double tau0, double tau1, double tol,
                                  const ImmersionOptions& opts = {});

/// Convenience overload for grid data (derivatives interpolated from nodal
/// finite differences restricted to `mask`).
ImmersionPath integrate_immersion(const ScalarField& field, const Vec& x0,
                                  double tau0, double tau1, double tol,
                                  const ImmersionOptions& opts = {},
                                  const BandMask* mask = nullptr);

/// Independent paths, integrated on `jobs` threads (0 = hardware count).
std::vector<ImmersionPath> integrate_immersions(
    const SmoothField& field, std::span<const Vec> starts, double tau1,
    double tol, const ImmersionOptions& opts = {}, unsigned jobs = 0);

/// Launch point for a grid path: if x0 lies within one cell of the band edge
/// the nearest node at least one cell inside the band is returned instead.
Vec adjust_launch_point(const ScalarField& field, const BandMask& mask,
                        const Vec& x0);

/// max over samples of |u(F) - tau|.
double level_preservation_error(const ImmersionPath& path,
                                const SmoothField& field);

struct HmcfReport {
  double max_abs = 0.0;
  std::size_t evaluated = 0;
  std::size_t excluded = 0;
};

/// max over interior samples of |dsigma/dtau - sigma^2 (H - sigma Lap u)|,
/// with dsigma/dtau by centered differences. Needs at least 3 samples.
HmcfReport hmcf_residual(const ImmersionPath& path, const SmoothField& field,
                         double grad_floor = 1e-12);

struct EnvelopeReport {
  double sup_dev_gradu = 0.0;  // sup ||grad u| - 1/eps|
  double sup_dev_phi = 0.0;    // sup |phi - log eps|
  double bound_gradu = 0.0;
  double bound_phi = 0.0;
  std::size_t evaluated = 0;
  bool pass = false;
};

struct EnvelopeOptions {
  double c0 = 0.0;  // 0 selects 10 sqrt(n)
  // Optional ball restriction: only nodes with |x - center| <= radius -
  // shrink * eps * eta are evaluated (radius <= 0 disables).
  Vec center;
  double radius = 0.0;
  double shrink = 4.0;
};

/// Envelope check from precomputed gradient magnitudes.
EnvelopeReport gradient_envelope(std::span<const double> grad_norms, int dim,
                                 double eps, double eta, double c0 = 0.0);

EnvelopeReport gradient_envelope_check(const ScalarField& field, double eps,
                                       double eta, const BandMask& mask,
                                       const EnvelopeOptions& opts = {});

/// Columns tau,x1..xn,sigma,u_of_F.
void write_path_csv(const std::string& path, const ImmersionPath& p);

}  // namespace fbac
