#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fbac/radial_solver.hpp"
#include "fbac/rate_fit.hpp"

namespace fbac {

struct ReferenceRadius {
  double radius = 0.0;
  bool extinct = false;  // t at or beyond r0^2 / (2(n-1)); radius is then 0
};

/// Sphere under mean curvature flow: sqrt(r0^2 - 2(n-1) t).
ReferenceRadius mcf_reference_radius(double r0, int n, double t);

/// r0^2 / (2(n-1)); +inf for n = 1.
double extinction_time(double r0, int n);

struct SweepConfig {
  std::vector<double> eps_list;
  std::string geometry = "sphere";
  int n = 2;
  double r0 = 4.0;
  double T = 1.0;
  double alpha = 0.5;
  int M = 512;
  SchemeParams scheme{.dt = 1e-3};
  int sample_every = 0;
  unsigned jobs = 0;  // 0: hardware threads
  std::uint64_t seed = 0x5EED;
};

struct SweepRecord {
  double eps = 0.0;
  double eta = 0.0;
  double h = 0.0;  // physical node spacing 2 eps / (M - 1) at t = 0
  double sup_grad_phi = 0.0;
  double holder_grad_phi = 0.0;
  double holder_dnu_phi = 0.0;
  double alpha = 0.5;
  double radius_err_max = 0.0;
  double runtime_s = 0.0;
  std::string status = "ok";  // ok, eta_excluded, step_rejected, extinct, error
  std::string detail;

  bool fit_eligible() const { return status == "ok"; }
};

/// Norms fitted against eps: sup_grad_phi, holder_grad_phi, holder_dnu_phi,
/// radius_err_max. A fit with fewer than 3 eligible points has
/// points_used < 3 and NaN coefficients.
struct SweepResult {
  std::vector<SweepRecord> records;
  std::map<std::string, RateFit> fits;
};

/// One radial run per eps on `jobs` threads; results are joined in eps_list
/// order, so the output does not depend on the thread count. Members with
/// eta >= 1/2 are kept with status eta_excluded and left out of the fits.
SweepResult run_sweep(const SweepConfig& cfg);

RateFit fit_or_empty(const std::vector<double>& eps,
                     const std::vector<double>& err);

nlohmann::json fits_to_json(const std::map<std::string, RateFit>& fits);

/// Writes sweep.csv and fits.json into dir (created if needed); returns the
/// paths written. runtime_s is the only non-deterministic column.
std::vector<std::string> write_sweep_outputs(const SweepResult& r,
                                             const std::string& dir);

}  // namespace fbac
