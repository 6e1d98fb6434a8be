#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fbac/contour.hpp"
#include "fbac/field.hpp"
#include "fbac/radial_solver.hpp"

namespace fbac {

/// Closed or straight initial interface. Signed distance increases along the
/// outward normal (for `Line`: along +x, the line being x = offset).
struct Curve {
  enum class Kind { Circle, Ellipse, Line };
  Kind kind = Kind::Circle;
  double cx = 0.0, cy = 0.0;
  double a = 1.0;  // circle radius, ellipse semi-axis along x
  double b = 1.0;  // ellipse semi-axis along y
  double offset = 0.0;

  static Curve circle(double r0, double cx = 0.0, double cy = 0.0);
  static Curve ellipse(double a, double b, double cx = 0.0, double cy = 0.0);
  static Curve line(double offset);

  double signed_distance(double x, double y) const;
  double min_curvature_radius() const;  // +inf for lines
};

/// Band {psi_minus > 0, psi_plus < 0}; both distances increase along nu.
struct Grid2DState {
  ScalarField u;
  ScalarField psi_minus;
  ScalarField psi_plus;
  double eps = 0.1;
  double t = 0.0;
  long steps = 0;
};

struct Grid2DParams {
  SchemeParams scheme{.dt = 5e-5, .lambda = 0.05, .mismatch_tol = 0.1};
  int redistance_every = 5;
  double solve_tol = 1e-10;  // SOR update tolerance
  int max_sweeps = 2000;
  double omega = 1.2;        // SOR relaxation
};

enum class Grid2DStatus { Ok, Topology };

std::string to_string(Grid2DStatus s);

struct Grid2DStepInfo {
  Grid2DStatus status = Grid2DStatus::Ok;
  double max_mismatch = 0.0;  // max |eps |grad u| - 1| at boundary samples
  int sweeps = 0;
};

/// u = clamp(d/eps), psi_+- = d -+ eps. Throws DomainError for a curvature
/// radius below 2 eps or fewer than 8 cells across the band.
Grid2DState init_from_curve(const Curve& curve, double eps, const Grid& grid);

/// One step: boundary speeds on the psi tubes, psi advection, band update,
/// implicit heat solve with Shortley-Weller Dirichlet boundaries,
/// redistancing every `redistance_every` steps.
Grid2DState step(const Grid2DState& s, const Grid2DParams& p,
                 Grid2DStepInfo* info = nullptr);

/// Level curve of u; empty for levels outside (-1, 1) or absent sets.
std::vector<Polyline> extract_level_curve(const Grid2DState& s, double level);

BandMask band_of(const Grid2DState& s);

struct Grid2DRunConfig {
  Curve curve;
  double eps = 0.1;
  double h = 0.0125;
  double half_width = 1.5;  // box [-w, w]^2 around the curve centre
  double T = 0.2;
  Grid2DParams params;
  int sample_every = 0;  // 0: max(1, floor(T/(100 dt)))
};

struct Grid2DSample {
  double t = 0.0;
  double area = 0.0;     // enclosed by u = 0
  double length = 0.0;
  double max_mismatch = 0.0;
};

struct Grid2DRun {
  std::optional<Grid2DState> final_state;
  Grid2DStatus status = Grid2DStatus::Ok;
  std::string failure;
  std::vector<Grid2DSample> samples;
  double area_rate = 0.0;  // least-squares slope of area against t
};

Grid2DRun run(const Grid2DRunConfig& cfg);

}  // namespace fbac
