#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fbac/field.hpp"

namespace fbac {

/// Radially symmetric band {s_minus < r < s_plus} on the mapped coordinate
/// xi_j = j/(M-1), r(xi) = s_minus + xi (s_plus - s_minus). For n = 1 the
/// radii are positions on a line.
struct RadialState {
  int n = 2;
  double eps = 0.1;
  double t = 0.0;
  double s_minus = 0.0;
  double s_plus = 0.0;
  std::vector<double> u;

  int M() const { return static_cast<int>(u.size()); }
  double width() const { return s_plus - s_minus; }
  double h_xi() const { return 1.0 / (M() - 1); }
  double radius(int j) const { return s_minus + j * h_xi() * width(); }
  double radius_mid() const { return 0.5 * (s_minus + s_plus); }
};

struct SchemeParams {
  double dt = 1e-4;
  double lambda = 0.5;         // predictor feedback gain
  double mismatch_tol = 1e-3;  // acceptance bound on |eps |u_r| - 1|
  double theta = 1.0;          // implicitness in [1/2, 1]
  double diffusion = 1.0;      // ut = D Lap u
  double newton_tol = 1e-12;   // corrector target
  int max_corrector = 8;
};

enum class RadialStatus { Ok, Extinct };

std::string to_string(RadialStatus s);

struct StepInfo {
  double mismatch_minus = 0.0;  // signed eps |u_r| - 1 at s_minus
  double mismatch_plus = 0.0;
  int iterations = 0;
  double sdot_minus = 0.0;
  double sdot_plus = 0.0;
  RadialStatus status = RadialStatus::Ok;
};

/// Truncated signed distance: u = (r - r0)/eps on [r0 - eps, r0 + eps].
RadialState init_from_sphere(double r0, int n, double eps, int M);

/// One time step. Predictor: kinematic boundary velocity plus mismatch
/// feedback; corrector: Newton on (s_minus, s_plus) so that the implicit
/// profile meets |u_r| = 1/eps at both ends. Throws StepRejected if the
/// mismatch stays above p.mismatch_tol. On extinction the input state is
/// returned unchanged with info->status = Extinct.
RadialState step(const RadialState& s, const SchemeParams& p,
                 StepInfo* info = nullptr);

/// Signed eps |u_r| - 1 at (s_minus, s_plus) from one-sided second-order
/// differences.
std::pair<double, double> boundary_mismatch(const RadialState& s);

/// Shell-weighted J = int eps |u_r|^2 + 1/eps over the band
/// (weight 1, 2 pi r, 4 pi r^2 for n = 1, 2, 3).
double radial_energy(const RadialState& s);

/// Nodal radial derivatives (second order, one-sided at the ends).
struct RadialDerivatives {
  std::vector<double> r, ur, urr;
};
RadialDerivatives radial_derivatives(const RadialState& s);

/// Curvature diagnostics of one profile. grad phi = -(u_rr/u_r) e_r, so
/// |grad phi| = |dnu_phi|; A = P/r, H = (n-1)/r; ut from the PDE operator.
struct ProfileDiagnostics {
  double t = 0.0;
  double s_minus = 0.0;
  double s_plus = 0.0;
  double sup_grad_phi = 0.0;
  double holder_grad_phi = 0.0;  // seminorm of dnu_phi along r
  double holder_dnu_phi = 0.0;   // sup + seminorm
  double sup_A = 0.0;
  double sup_v = 0.0;
  double eta = 0.0;              // max(sup_A, sup_v)
  double sup_dev_gradu = 0.0;    // sup ||u_r| - 1/eps|
  double sup_dev_phi = 0.0;      // sup |phi - log eps|
  double mismatch_minus = 0.0;
  double mismatch_plus = 0.0;
  double energy = 0.0;
};

ProfileDiagnostics diagnose_profile(const RadialState& s, double alpha = 0.5,
                                    double diffusion = 1.0,
                                    std::uint64_t holder_seed = 0x5EED);

struct RadialRunConfig {
  int n = 2;
  double eps = 0.05;
  double r0 = 1.0;
  int M = 1024;
  double T = 0.3;
  SchemeParams scheme;
  double alpha = 0.5;
  int sample_every = 0;    // 0: max(1, floor(T/(100 dt)))
  int snapshot_every = 0;  // profile dumps (0: none)
  bool record_states = false;
  std::uint64_t holder_seed = 0x5EED;
};

struct RadialRun {
  RadialState final_state;
  RadialStatus status = RadialStatus::Ok;
  std::string failure;  // non-empty when a step was rejected
  std::vector<ProfileDiagnostics> samples;
  std::vector<double> energy;  // after every accepted step (index 0: initial)
  std::vector<double> times;   // matching `energy`
  std::vector<RadialState> snapshots;
  double eta = 0.0;            // sup over samples
  double radius_err_max = 0.0; // vs sqrt(r0^2 - 2(n-1)t), pre-extinction
  double max_mismatch = 0.0;   // over accepted steps
  double max_energy_increase = 0.0;
  long steps = 0;
  bool regime_warning = false; // eps * eta >= 0.1
};

RadialRun run(const RadialRunConfig& cfg);

/// Writes trajectory.csv, diagnostics.csv, energy.csv and profile snapshots
/// (profile_<k>.csv in the fields format, 1D grid in r) under dir.
std::vector<std::string> write_radial_outputs(const RadialRun& run,
                                              const std::string& dir);

/// Samples the profile onto a Cartesian grid of dimension s.n: u(|x|),
/// clamped to -1/+1 inside/outside; dt_values from the PDE operator inside
/// the band and 0 outside.
ScalarField radial_to_grid(const RadialState& s, const Grid& grid,
                           double diffusion = 1.0);

}  // namespace fbac
