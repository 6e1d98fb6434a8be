// Acceptance suite: one line per criterion, exit status 1 if any fails.
// Usage: fbac_acceptance [--out DIR]   (DIR receives the eps-sweep outputs)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "fbac/curvature.hpp"
#include "fbac/grid2d_solver.hpp"
#include "fbac/harness.hpp"
#include "fbac/levelset_flow.hpp"
#include "fbac/radial_solver.hpp"
#include "fbac/rate_fit.hpp"
#include "fbac/smooth_field.hpp"
#include "fbac/variation.hpp"

using namespace fbac;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
};

int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int id, const char* name, double budget_s, const std::function<Result()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Result r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  const double dt = seconds_since(t0);
  const bool in_time = budget_s <= 0.0 || dt < budget_s;
  const bool ok = r.pass && in_time;
  if (!ok) ++failures;
  std::printf("[%s] %2d %-28s %s; %.2f s%s\n", ok ? "PASS" : "FAIL", id, name, r.detail.c_str(), dt,
              in_time ? "" : " (over time budget)");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

// ---- 1: forced mean curvature flow identity on a manufactured field
Result forced_mcf() {
  const double eps = 0.5, a = 0.3, b = 0.2;
  const auto pot = PotentialSpec::make(2.0, eps);
  auto u = [&](const Vec& x) { return 0.5 * std::tanh(x[0] + a * std::sin(2 * x[1])) + b * x[1]; };
  auto lap = [&](const Vec& x) {
    const double s = x[0] + a * std::sin(2 * x[1]);
    const double t = std::tanh(s), q = 1 - t * t;
    const double sy = 2 * a * std::cos(2 * x[1]), syy = -4 * a * std::sin(2 * x[1]);
    return 0.5 * (-2 * t * q * (1 + sy * sy) + q * syy);
  };
  std::vector<double> hs, res;
  for (double h : {0.04, 0.02, 0.01}) {
    const Grid g = Grid::box(2, -1.0, 1.0, h);
    const auto f = ScalarField::sample(g, u, [&](const Vec& x) { return lap(x) - pot.f(u(x)); }, 0.0);
    ResidualOptions o;
    o.edge_margin = 1;
    const ResidualField r = forced_mcf_residual(f, pot, full_mask(g), o);
    hs.push_back(h);
    res.push_back(r.max_abs);
  }
  const RateFit fit = fit_rate(hs, res);
  return {std::abs(fit.slope - 2.0) <= 0.3,
          fmt("slope %.3f", fit.slope) + fmt(" (window 2.0 +- 0.3), |r| at finest %.2e", res.back())};
}

// ---- 2: phi evolution identity on an exact heat solution, dt ~ h^2
Result phi_evolution() {
  const auto pot = PotentialSpec::free_boundary(0.1);  // f = 0
  auto u = [](const Vec& x, double t) {
    return x[1] + 0.3 * std::exp(-2 * t) * std::sin(x[0]) * std::sin(x[1]);
  };
  std::vector<double> hs, res;
  const double t1 = 0.1;
  for (double h : {0.1, 0.05, 0.025}) {
    const double dt = h * h;
    Vec lo(2), hi(2);
    lo << 0.0, 0.0;
    hi << 3.0, 3.0;
    const Grid g = Grid::box(lo, hi, h);
    const auto now = ScalarField::sample(g, [&](const Vec& x) { return u(x, t1); }, t1);
    const auto prev = ScalarField::sample(g, [&](const Vec& x) { return u(x, t1 - dt); }, t1 - dt);
    ResidualOptions o;
    o.edge_margin = 2;
    const ResidualField r = phi_evolution_residual(now, prev, pot, full_mask(g), o);
    hs.push_back(h);
    res.push_back(r.max_abs);
  }
  const RateFit fit = fit_rate(hs, res);
  return {fit.slope >= 1.5, fmt("slope %.3f (>= 1.5)", fit.slope) + fmt(", |r| at finest %.2e", res.back())};
}

// ---- 3: immersion through the level sets of |x|^2/2
Result level_set_flow() {
  const AnalyticField par = AnalyticField::paraboloid(2);
  const ImmersionPath p = integrate_immersion(par, v2(1.0, 0.0), 0.5, 2.0, 1e-8);
  const double h = hmcf_residual(p, par).max_abs;
  const double l = level_preservation_error(p, par);
  return {p.status == PathStatus::Complete && h < 1e-6 && l < 1e-7,
          fmt("hmcf %.2e (< 1e-6)", h) + fmt(", level error %.2e (< 1e-7)", l)};
}

// ---- 4: planar front stationarity
Result planar_front() {
  const RadialState s0 = init_from_sphere(1.0, 1, 0.1, 256);
  SchemeParams p;
  p.dt = 1e-3;
  RadialState s = s0;
  double mm = 0.0;
  for (int k = 0; k < 1000; ++k) {
    StepInfo info;
    s = step(s, p, &info);
    mm = std::max({mm, std::abs(info.mismatch_minus), std::abs(info.mismatch_plus)});
  }
  double du = 0.0;
  for (int j = 0; j < s.M(); ++j) du = std::max(du, std::abs(s.u[j] - s0.u[j]));
  return {du <= 1e-8 && mm <= 1e-3, fmt("|u(t)-u(0)| %.2e (<= 1e-8)", du) + fmt(", mismatch %.2e (<= 1e-3)", mm)};
}

// ---- 5, 6, 11 share the shrinking-circle run
RadialRun circle_run;
double circle_seconds = 0.0;

Result shrinking_circle() {
  RadialRunConfig c;
  c.n = 2;
  c.r0 = 1.0;
  c.eps = 0.05;
  c.M = 1024;
  c.T = 0.3;
  c.scheme.dt = 1e-4;
  const auto t0 = std::chrono::steady_clock::now();
  circle_run = run(c);
  circle_seconds = seconds_since(t0);
  const bool ok = circle_run.failure.empty() && circle_run.status == RadialStatus::Ok &&
                  circle_run.radius_err_max <= 5 * c.eps;
  return {ok, fmt("max |r - sqrt(1-2t)| %.2e (<= 0.25)", circle_run.radius_err_max) +
                  (circle_run.failure.empty() ? "" : ", " + circle_run.failure)};
}

Result envelopes() {
  if (circle_run.samples.empty()) return {false, "criterion 5 run missing"};
  const double eps = 0.05, c0 = 10.0 * std::sqrt(2.0), eta = circle_run.eta;
  double dg = 0.0, dp = 0.0;
  for (const auto& d : circle_run.samples) {
    dg = std::max(dg, d.sup_dev_gradu);
    dp = std::max(dp, d.sup_dev_phi);
  }
  const EnvelopeReport r = {dg, dp, c0 * eta, c0 * eps * eta, circle_run.samples.size(), false};
  return {r.sup_dev_gradu <= r.bound_gradu && r.sup_dev_phi <= r.bound_phi,
          fmt("eta %.3f", eta) + fmt(", ||grad u|-1/eps| %.3g", dg) + fmt(" <= %.3g", r.bound_gradu) +
              fmt(", |phi-log eps| %.3g", dp) + fmt(" <= %.3g", r.bound_phi)};
}

// ---- 7, 8 share the eps sweep
SweepResult sweep_result;
std::string sweep_out;

Result rate_sup() {
  SweepConfig c;
  c.eps_list = {0.1, 0.05, 0.025, 0.0125};
  c.r0 = 4.0;
  c.n = 2;
  c.T = 1.0;
  c.alpha = 0.5;
  c.M = 512;
  c.scheme.dt = 1e-3;
  sweep_result = run_sweep(c);
  if (!sweep_out.empty()) write_sweep_outputs(sweep_result, sweep_out);
  const RateFit f = sweep_result.fits.at("sup_grad_phi");
  return {f.points_used == 4 && f.slope >= 0.8 && f.r_squared >= 0.95,
          fmt("slope %.3f (>= 0.8)", f.slope) + fmt(", r2 %.4f (>= 0.95)", f.r_squared) +
              fmt(", points %.0f", f.points_used)};
}

Result rate_holder() {
  const auto it = sweep_result.fits.find("holder_dnu_phi");
  if (it == sweep_result.fits.end()) return {false, "criterion 7 sweep missing"};
  const RateFit f = it->second;
  return {f.points_used == 4 && f.slope >= 0.4 && f.r_squared >= 0.9,
          fmt("slope %.3f (>= 0.4)", f.slope) + fmt(", r2 %.4f (>= 0.9)", f.r_squared)};
}

// ---- 9: inner variation
Result inner_variation() {
  const double eps = 0.1;
  const Grid g = Grid::box(2, -1.0, 1.0, 0.01);
  const auto smooth = ScalarField::sample(g, [](const Vec& x) {
    return std::sin(std::numbers::pi * x[0]) * std::cos(std::numbers::pi * x[1]);
  });
  const auto bump = DeformationField::bump(v2(0.1, 0.2), 0.6, v2(0.5, -0.8));
  const VariationReport r2 = compare_inner_variation(smooth, bump, PotentialSpec::make(2.0, eps), 1e-4);

  const auto pot0 = PotentialSpec::free_boundary(eps);
  const auto band = ScalarField::sample(g, [&](const Vec& x) { return std::clamp(1.3 * x[0] / eps + 0.1, -1.0, 1.0); });
  const VariationReport r0 = compare_inner_variation(
      band, DeformationField::bump(v2(0.05, 0.1), 0.4, v2(0.7, -0.4)), pot0, 1e-4);

  const auto crit = ScalarField::sample(g, [&](const Vec& x) { return std::clamp(x[0] / eps, -1.0, 1.0); });
  const std::vector<DeformationField> Us = {
      DeformationField::bump(v2(0.0, 0.0), 0.5, v2(1.0, 0.0)),
      DeformationField::bump(v2(0.05, 0.3), 0.4, v2(0.3, 0.9)),
      DeformationField::bump(v2(-0.2, -0.1), 0.6, v2(-0.5, 0.5)),
      DeformationField::swirl(v2(0.0, 0.0), 0.5, 1.0),
      DeformationField::swirl(v2(0.1, -0.2), 0.3, -2.0),
  };
  double worst = 0.0;  // |dJ| / ||U||
  for (const auto& U : Us) {
    double sup = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) sup = std::max(sup, U(g.position(i)).norm());
    const VariationReport r = compare_inner_variation(crit, U, pot0, 1e-4);
    worst = std::max(worst, std::max(std::abs(r.analytic), std::abs(r.fd)) / sup);
  }
  return {r2.rel_gap <= 1e-3 && r0.rel_gap <= 1e-2 && worst <= 1e-6,
          fmt("smooth gap %.2e (<= 1e-3)", r2.rel_gap) + fmt(", band gap %.2e (<= 1e-2)", r0.rel_gap) +
              fmt(", critical |dJ|/|U| %.2e (<= 1e-6)", worst)};
}

// ---- 10: stress divergence
Result stress_divergence() {
  const auto pot = PotentialSpec::make(2.0, 0.5);
  std::vector<double> hs, res;
  for (double h : {0.1, 0.05, 0.025}) {
    const Grid g = Grid::box(2, -1.0, 1.0, h);
    const auto u = ScalarField::sample(g, [](const Vec& x) { return std::sin(x[0]); });
    hs.push_back(h);
    res.push_back(div_stress_check(u, pot, full_mask(g)));
  }
  const RateFit fit = fit_rate(hs, res);
  const Grid g = Grid::box(2, -1.0, 1.0, 0.02);
  const ScalarField c(g, std::vector<double>(g.size(), 0.3));
  const double zc = div_stress_check(c, pot, full_mask(g));
  const auto front = ScalarField::sample(g, [](const Vec& x) { return std::clamp(x[0] / 0.1, -1.0, 1.0); });
  const double zf = div_stress_check(front, PotentialSpec::free_boundary(0.1), band_mask(front));
  return {std::abs(fit.slope - 2.0) <= 0.3 && zc == 0.0 && zf < 1e-9,
          fmt("slope %.3f (window 2.0 +- 0.3)", fit.slope) + fmt(", constant %.1e", zc) +
              fmt(", harmonic front %.1e", zf)};
}

// ---- 11: energy monotonicity along the criterion-5 run
Result energy_monotone() {
  if (circle_run.energy.size() < 2) return {false, "criterion 5 run missing"};
  return {circle_run.max_energy_increase <= 1e-6,
          fmt("max J(t+dt) - J(t) %.2e (<= 1e-6)", circle_run.max_energy_increase) +
              fmt(" over %.0f steps", static_cast<double>(circle_run.steps))};
}

// ---- 12: two-dimensional area law
Result area_law() {
  Grid2DRunConfig c;
  c.curve = Curve::circle(1.0);
  c.eps = 0.1;
  c.h = 0.0125;
  c.T = 0.2;
  c.params.scheme.dt = 0.5 * c.h * c.h;
  const Grid2DRun r = run(c);
  if (!r.failure.empty()) return {false, r.failure};
  const double target = -2.0 * std::numbers::pi;
  const double rel = std::abs(r.area_rate - target) / std::abs(target);
  return {r.status == Grid2DStatus::Ok && rel <= 0.1,
          fmt("dA/dt %.4f", r.area_rate) + fmt(" vs -2pi (rel err %.3f <= 0.1)", rel)};
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i)
    if (std::strcmp(argv[i], "--out") == 0) sweep_out = argv[i + 1];

  report(1, "forced-MCF identity", 10, forced_mcf);
  report(2, "phi-evolution identity", 10, phi_evolution);
  report(3, "level-set flow", 1, level_set_flow);
  report(4, "planar-front stationarity", 5, planar_front);
  report(5, "shrinking circle", 30, shrinking_circle);
  report(6, "gradient envelopes", 0, envelopes);
  report(7, "eps-rate, sup norm", 120, rate_sup);
  report(8, "eps-rate, Holder norm", 0, rate_holder);
  report(9, "inner variation", 10, inner_variation);
  report(10, "stress divergence", 5, stress_divergence);
  report(11, "energy dissipation", 0, energy_monotone);
  report(12, "2D area law", 120, area_law);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
