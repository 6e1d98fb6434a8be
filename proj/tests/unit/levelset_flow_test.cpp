#include <gtest/gtest.h>

#include <cmath>

#include "fbac/errors.hpp"
#include "fbac/levelset_flow.hpp"
#include "fbac/smooth_field.hpp"

using namespace fbac;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

}  // namespace

TEST(Immersion, ConeMovesRadiallyAtUnitSpeed) {
  const AnalyticField cone = AnalyticField::cone(2);
  const Vec x0 = v2(0.6, 0.8);
  const ImmersionPath p = integrate_immersion(cone, x0, 1.0, 2.0, 1e-10);
  ASSERT_EQ(p.status, PathStatus::Complete);
  for (std::size_t k = 0; k < p.size(); ++k) {
    EXPECT_NEAR((p.points[k] - p.taus[k] * x0).norm(), 0.0, 1e-9);
    EXPECT_NEAR(p.sigmas[k], 1.0, 1e-12);
    EXPECT_NEAR(p.u_of_F[k], p.taus[k], 1e-9);
  }
  EXPECT_NEAR(p.taus.back(), 2.0, 1e-15);
}

TEST(Immersion, PlanarFrontAdvancesEpsPerUnitTau) {
  const double eps = 0.05;
  const AnalyticField plane = AnalyticField::planar(2, eps);
  const ImmersionPath p = integrate_immersion(plane, v2(0.0, 0.3), 0.0, 3.0, 1e-10);
  ASSERT_EQ(p.status, PathStatus::Complete);
  EXPECT_NEAR(p.points.back()[0], 3.0 * eps, 1e-12);
  EXPECT_NEAR(p.points.back()[1], 0.3, 1e-15);
  for (double s : p.sigmas) EXPECT_NEAR(s, eps, 1e-15);
  EXPECT_LT(level_preservation_error(p, plane), 1e-12);
  EXPECT_LT(hmcf_residual(p, plane).max_abs, 1e-9);
}

TEST(Immersion, ParaboloidSigmaAndHmcfIdentity) {
  const AnalyticField par = AnalyticField::paraboloid(2);
  const ImmersionPath p = integrate_immersion(par, v2(1.0, 0.0), 0.5, 2.0, 1e-8);
  ASSERT_EQ(p.status, PathStatus::Complete);
  for (std::size_t k = 0; k < p.size(); ++k)
    EXPECT_NEAR(p.sigmas[k], 1.0 / std::sqrt(2.0 * p.taus[k]), 1e-8);
  EXPECT_LT(level_preservation_error(p, par), 1e-7);
  const HmcfReport h = hmcf_residual(p, par);
  EXPECT_GT(h.evaluated, 100u);
  EXPECT_LT(h.max_abs, 1e-6);
}

TEST(Immersion, LeavingTheBoxTruncates) {
  AnalyticField cone = AnalyticField::cone(2);
  cone.with_box(v2(-1.5, -1.5), v2(1.5, 1.5));
  const ImmersionPath p = integrate_immersion(cone, v2(1.0, 0.0), 1.0, 2.0, 1e-10);
  EXPECT_EQ(p.status, PathStatus::Truncated);
  EXPECT_LE(p.points.back()[0], 1.5);
  EXPECT_GT(p.points.back()[0], 1.4);
}

TEST(Immersion, StartOffTheLevelThrows) {
  const AnalyticField cone = AnalyticField::cone(2);
  EXPECT_THROW(integrate_immersion(cone, v2(1.0, 0.0), 1.1, 2.0, 1e-8), DomainError);
}

TEST(Immersion, GridParaboloidConvergesWithResolution) {
  std::vector<double> res;
  for (double h : {0.1, 0.05}) {
    const Grid g = Grid::box(2, -2.5, 2.5, h);
    const auto f = ScalarField::sample(g, [](const Vec& x) { return std::cosh(x[0]) + 0.5 * x[1] * x[1]; });
    const GridField gf(f);
    const Vec x0 = v2(0.5, 0.5);
    const ImmersionPath p = integrate_immersion(gf, x0, gf.value(x0), 2.0, 1e-9);
    ASSERT_NE(p.status, PathStatus::Degenerate);
    res.push_back(hmcf_residual(p, gf).max_abs);
  }
  EXPECT_LT(res[1], res[0]);
}

TEST(Immersion, ParallelPathsMatchSerial) {
  const AnalyticField par = AnalyticField::paraboloid(2);
  std::vector<Vec> starts;
  for (int k = 0; k < 6; ++k) starts.push_back(v2(std::cos(k), std::sin(k)));
  const auto paths = integrate_immersions(par, starts, 1.5, 1e-9, {}, 3);
  ASSERT_EQ(paths.size(), starts.size());
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const ImmersionPath serial = integrate_immersion(par, starts[k], par.value(starts[k]), 1.5, 1e-9);
    ASSERT_EQ(serial.size(), paths[k].size());
    EXPECT_EQ((serial.points.back() - paths[k].points.back()).norm(), 0.0);
  }
}

TEST(GradientEnvelope, SignedDistanceHasZeroDeviation) {
  const double eps = 0.1;
  const Grid g = Grid::box(2, -1.0, 1.0, 0.02);
  const auto u = ScalarField::sample(g, [&](const Vec& x) { return std::clamp(x[1] / eps, -1.0, 1.0); });
  const EnvelopeReport r = gradient_envelope_check(u, eps, 0.2, band_mask(u));
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.sup_dev_gradu, 1e-9);
  EXPECT_LT(r.sup_dev_phi, 1e-12);
}

TEST(GradientEnvelope, DoubledGradientFails) {
  const double eps = 0.1;
  const Grid g = Grid::box(2, -1.0, 1.0, 0.01);
  const auto u = ScalarField::sample(g, [&](const Vec& x) { return std::clamp(2 * x[1] / eps, -1.0, 1.0); });
  const EnvelopeReport r = gradient_envelope_check(u, eps, 0.2, band_mask(u));
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.sup_dev_gradu, 1.0 / eps, 1e-8);
}

TEST(GradientEnvelope, EmptyMaskAndLargeEtaThrow) {
  const Grid g = Grid::box(2, -1.0, 1.0, 0.1);
  const ScalarField u(g, std::vector<double>(g.size(), 1.0));
  EXPECT_THROW(gradient_envelope_check(u, 0.1, 0.2, band_mask(u)), DomainError);
  const std::vector<double> norms{10.0};
  EXPECT_THROW(gradient_envelope(norms, 2, 0.1, 5.0), DomainError);
}
