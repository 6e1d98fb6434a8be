#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fbac/curvature.hpp"
#include "fbac/errors.hpp"
#include "fbac/radial_solver.hpp"

using namespace fbac;

TEST(RadialInit, SignedDistanceProfile) {
  const RadialState s = init_from_sphere(1.0, 2, 0.1, 101);
  EXPECT_NEAR(s.s_minus, 0.9, 1e-15);
  EXPECT_NEAR(s.s_plus, 1.1, 1e-15);
  for (int j = 0; j < s.M(); ++j) EXPECT_NEAR(s.u[j], (s.radius(j) - 1.0) / 0.1, 1e-13);
  const auto mm = boundary_mismatch(s);
  EXPECT_NEAR(mm.first, 0.0, 1e-12);
  EXPECT_NEAR(mm.second, 0.0, 1e-12);
  const ProfileDiagnostics d = diagnose_profile(s);
  EXPECT_LT(d.sup_grad_phi, 1e-9);
  EXPECT_LT(d.sup_dev_phi, 1e-12);
}

TEST(RadialInit, Preconditions) {
  EXPECT_THROW(init_from_sphere(0.2, 2, 0.1, 128), DomainError);
  EXPECT_THROW(init_from_sphere(1.0, 2, 0.1, 32), DomainError);
}

TEST(RadialEnergy, InitialBandEnergyIsClosedForm) {
  // density 2/eps on an annulus of area 4 pi r0 eps
  const RadialState s = init_from_sphere(1.5, 2, 0.05, 513);
  EXPECT_NEAR(radial_energy(s), 8.0 * std::numbers::pi * 1.5, 1e-10);
  const RadialState line = init_from_sphere(1.5, 1, 0.05, 513);
  EXPECT_NEAR(radial_energy(line), 4.0, 1e-12);
}

TEST(RadialStep, PlanarFrontIsStationary) {
  const RadialState s0 = init_from_sphere(1.0, 1, 0.1, 256);
  SchemeParams p;
  p.dt = 1e-3;
  RadialState s = s0;
  for (int k = 0; k < 1000; ++k) {
    StepInfo info;
    s = step(s, p, &info);
    ASSERT_LE(std::abs(info.mismatch_minus), 1e-3);
    ASSERT_LE(std::abs(info.mismatch_plus), 1e-3);
  }
  double du = 0.0;
  for (int j = 0; j < s.M(); ++j) du = std::max(du, std::abs(s.u[j] - s0.u[j]));
  EXPECT_LE(du, 1e-8);
  EXPECT_NEAR(s.s_minus, s0.s_minus, 1e-8);
  EXPECT_NEAR(s.t, 1.0, 1e-9);
}

TEST(RadialStep, CircleShrinksAndStaysInRange) {
  RadialState s = init_from_sphere(1.0, 2, 0.05, 256);
  SchemeParams p;
  p.dt = 1e-4;
  for (int k = 0; k < 200; ++k) s = step(s, p);
  for (double v : s.u) {
    EXPECT_GE(v, -1.0 - 1e-12);
    EXPECT_LE(v, 1.0 + 1e-12);
  }
  EXPECT_NEAR(s.radius_mid(), std::sqrt(1.0 - 2.0 * s.t), 0.01);
  const auto mm = boundary_mismatch(s);
  EXPECT_LT(std::abs(mm.first), 1e-3);
  EXPECT_LT(std::abs(mm.second), 1e-3);
}

TEST(RadialStep, ExplicitStepNeedsParabolicDt) {
  const RadialState s = init_from_sphere(1.0, 2, 0.1, 128);
  SchemeParams p;
  p.theta = 0.5;
  p.dt = 1e-3;  // > 0.5 h_xi^2
  EXPECT_THROW(step(s, p), DomainError);
}

TEST(RadialStep, HugeStepIsRejectedOrAccurate) {
  // a single step of 0.05 must not silently break the gradient condition
  const RadialState s = init_from_sphere(0.3, 2, 0.05, 128);
  SchemeParams p;
  p.dt = 0.05;
  try {
    StepInfo info;
    const RadialState n = step(s, p, &info);
    if (info.status == RadialStatus::Ok) {
      EXPECT_LE(std::abs(info.mismatch_minus), p.mismatch_tol);
      EXPECT_LE(std::abs(info.mismatch_plus), p.mismatch_tol);
    }
  } catch (const StepRejected& e) {
    EXPECT_GT(e.measured(), p.mismatch_tol);
  }
}

TEST(RadialRun, ZeroDurationEchoesInitialState) {
  RadialRunConfig c;
  c.M = 128;
  c.T = 0.0;
  const RadialRun r = run(c);
  const RadialState s0 = init_from_sphere(c.r0, c.n, c.eps, c.M);
  EXPECT_EQ(r.steps, 0);
  EXPECT_EQ(r.final_state.u, s0.u);
  EXPECT_EQ(r.final_state.s_minus, s0.s_minus);
  EXPECT_EQ(r.samples.size(), 1u);
}

TEST(RadialRun, ExtinctionNearMcfTime) {
  RadialRunConfig c;
  c.n = 3;
  c.r0 = 0.5;
  c.eps = 0.02;
  c.M = 128;
  c.T = 0.1;
  c.scheme.dt = 2e-5;
  const RadialRun r = run(c);
  ASSERT_TRUE(r.failure.empty()) << r.failure;
  EXPECT_EQ(r.status, RadialStatus::Extinct);
  EXPECT_NEAR(r.final_state.t, 0.0625, 0.01);
}

TEST(RadialRun, DeterministicTrajectory) {
  RadialRunConfig c;
  c.M = 128;
  c.T = 0.02;
  const RadialRun a = run(c), b = run(c);
  EXPECT_EQ(a.final_state.u, b.final_state.u);
  EXPECT_EQ(a.energy, b.energy);
}

TEST(RadialToGrid, ForcedMcfResidualOnSnapshotIsSmall) {
  RadialRunConfig c;
  c.eps = 0.05;
  c.M = 256;
  c.T = 0.05;
  const RadialRun r = run(c);
  const double h = 0.005;
  const Grid g = Grid::box(2, -1.2, 1.2, h);
  const ScalarField f = radial_to_grid(r.final_state, g);
  ASSERT_TRUE(f.has_dt());
  const auto pot = PotentialSpec::free_boundary(c.eps);
  const ResidualField res = forced_mcf_residual(f, pot, band_mask(f, 0.1));
  EXPECT_GT(res.evaluated, 1000u);
  EXPECT_LE(res.max_abs, 10.0 * h);
}
