#include <gtest/gtest.h>

#include <cmath>

#include "fbac/errors.hpp"
#include "fbac/field.hpp"

using namespace fbac;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

}  // namespace

TEST(Grid, BoxLayoutAndIndexing) {
  const Grid g = Grid::box(2, -1.0, 1.0, 0.25);
  EXPECT_EQ(g.count(0), 9);
  EXPECT_EQ(g.count(1), 9);
  EXPECT_EQ(g.size(), 81u);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g.linear(g.unravel(i)), i);
  EXPECT_NEAR(g.position(NodeIndex{8, 0, 0})[0], 1.0, 1e-15);
  EXPECT_EQ(g.edge_distance(NodeIndex{0, 4, 0}), 0);
  EXPECT_EQ(g.edge_distance(NodeIndex{4, 4, 0}), 4);
}

TEST(Grid, DualVolumesTileTheBox) {
  for (int dim = 1; dim <= 3; ++dim) {
    const Grid g = Grid::box(dim, 0.0, 1.0, 0.1);
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) sum += g.dual_volume(g.unravel(i));
    EXPECT_NEAR(sum, 1.0, 1e-12) << "dim " << dim;
  }
}

TEST(Grid, OutOfRangeIndexThrows) {
  const Grid g = Grid::box(2, 0.0, 1.0, 0.1);
  EXPECT_THROW(g.linear(NodeIndex{11, 0, 0}), DomainError);
  EXPECT_THROW(g.linear(NodeIndex{-1, 0, 0}), DomainError);
}

TEST(Derivatives, QuadraticIsExact) {
  const Grid g = Grid::box(2, -2.0, 2.0, 0.25);
  const auto u = ScalarField::sample(g, [](const Vec& x) { return x.squaredNorm(); });
  const NodeIndex at{12, 8, 0};  // (1, 0)
  ASSERT_NEAR(g.position(at)[0], 1.0, 1e-15);
  const Derivatives d = derivatives(u, at);
  EXPECT_NEAR(d.grad[0], 2.0, 1e-12);
  EXPECT_NEAR(d.grad[1], 0.0, 1e-12);
  EXPECT_NEAR(d.hess(0, 0), 2.0, 1e-10);
  EXPECT_NEAR(d.hess(1, 1), 2.0, 1e-10);
  EXPECT_NEAR(d.hess(0, 1), 0.0, 1e-10);
  EXPECT_NEAR(d.lap, 4.0, 1e-10);
}

TEST(Derivatives, OneSidedStencilsExactForQuadraticsAtEdges) {
  const Grid g = Grid::box(2, 0.0, 1.0, 0.1);
  const auto u = ScalarField::sample(g, [](const Vec& x) { return x[0] * x[0] + 3 * x[0] * x[1]; });
  const Derivatives d = derivatives(u, NodeIndex{0, 10, 0});  // corner (0, 1)
  EXPECT_NEAR(d.grad[0], 3.0, 1e-10);
  EXPECT_NEAR(d.grad[1], 0.0, 1e-10);
  EXPECT_NEAR(d.hess(0, 0), 2.0, 1e-8);
  EXPECT_NEAR(d.hess(0, 1), 3.0, 1e-8);
  EXPECT_NEAR(d.hess(1, 0), d.hess(0, 1), 0.0);
}

TEST(Derivatives, ConstantFieldIsZero) {
  const Grid g = Grid::box(3, 0.0, 1.0, 0.25);
  const ScalarField u(g, std::vector<double>(g.size(), 0.7));
  const Derivatives d = derivatives(u, NodeIndex{2, 2, 2});
  EXPECT_EQ(d.grad.norm(), 0.0);
  EXPECT_EQ(d.hess.norm(), 0.0);
  EXPECT_EQ(d.lap, 0.0);
}

TEST(Derivatives, SineGradientConvergesAtSecondOrder) {
  std::vector<double> err;
  for (double h : {0.1, 0.05, 0.025}) {
    const Grid g = Grid::box(1, -1.0, 1.0, h);
    const auto u = ScalarField::sample(g, [](const Vec& x) { return std::sin(x[0]); });
    const NodeIndex mid{g.count(0) / 2, 0, 0};
    ASSERT_NEAR(g.position(mid)[0], 0.0, 1e-14);
    err.push_back(std::abs(derivatives(u, mid).grad[0] - 1.0));
  }
  const double slope = std::log(err[0] / err[2]) / std::log(4.0);
  EXPECT_NEAR(slope, 2.0, 0.2);
}

TEST(Interpolate, AffineAndNodalExactness) {
  const Grid g = Grid::box(2, 0.0, 1.0, 0.1);
  const auto u = ScalarField::sample(g, [](const Vec& x) { return 2.0 * x[0] + 1.0; });
  EXPECT_NEAR(interpolate(u, v2(0.3371, 0.918)), 2.0 * 0.3371 + 1.0, 1e-14);
  const auto w = ScalarField::sample(g, [](const Vec& x) { return std::sin(7 * x[0]) * x[1]; });
  const NodeIndex n{3, 4, 0};
  EXPECT_EQ(interpolate(w, g.position(n)), w.at(n));
}

TEST(Interpolate, SineMidpointsWithinBound) {
  const double h = 0.05;
  const Grid g = Grid::box(1, 0.0, 3.0, h);
  const auto u = ScalarField::sample(g, [](const Vec& x) { return std::sin(x[0]); });
  for (int i = 0; i + 1 < g.count(0); ++i) {
    Vec x(1);
    x << (i + 0.5) * h;
    EXPECT_LE(std::abs(interpolate(u, x) - std::sin(x[0])), h * h / 8.0 + 1e-15);
  }
}

TEST(Interpolate, OutsideBoxThrows) {
  const Grid g = Grid::box(2, 0.0, 1.0, 0.1);
  const ScalarField u(g, std::vector<double>(g.size(), 0.0));
  EXPECT_THROW(interpolate(u, v2(1.01, 0.5)), DomainError);
}

TEST(BandMask, PlanarFrontIsSlab) {
  const double eps = 0.1;
  const Grid g = Grid::box(2, -1.0, 1.0, 0.025);
  const auto u = ScalarField::sample(g, [&](const Vec& x) { return std::clamp(x[0] / eps, -1.0, 1.0); });
  const BandMask m = band_mask(u);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = std::abs(g.position(i)[0]);
    if (std::abs(x - eps) < 1e-9) continue;  // on the band edge up to round-off
    EXPECT_EQ(m.contains(i), x < eps) << i;
  }
}

TEST(BandMask, ConstantOneIsEmpty) {
  const Grid g = Grid::box(2, -1.0, 1.0, 0.1);
  const ScalarField u(g, std::vector<double>(g.size(), 1.0));
  EXPECT_TRUE(band_mask(u).empty());
}
