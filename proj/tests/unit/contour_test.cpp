#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fbac/contour.hpp"
#include "fbac/field.hpp"

using namespace fbac;

TEST(Contour, CircleRadiusErrorWithinInterpolationBound) {
  const double h = 0.05, r = 0.7;
  const Grid g = Grid::box(2, -1.0, 1.0, h);
  const auto u = ScalarField::sample(g, [](const Vec& x) { return x.norm(); });
  const auto curves = extract_contours(g, u.values(), r);
  ASSERT_EQ(curves.size(), 1u);
  EXPECT_TRUE(curves[0].closed);
  for (const Point2& p : curves[0].pts)
    EXPECT_LE(std::abs(std::hypot(p.x, p.y) - r), h * h / (2 * r) + 1e-12);
  EXPECT_NEAR(enclosed_area(curves), std::numbers::pi * r * r, 4 * std::numbers::pi * r * h * h / (2 * r));
  EXPECT_NEAR(total_length(curves), 2 * std::numbers::pi * r, 0.01);
}

TEST(Contour, AbsentLevelIsEmpty) {
  const Grid g = Grid::box(2, -1.0, 1.0, 0.1);
  const auto u = ScalarField::sample(g, [](const Vec& x) { return x[0]; });
  EXPECT_TRUE(extract_contours(g, u.values(), 5.0).empty());
}

TEST(Contour, OpenLineAcrossTheBox) {
  const Grid g = Grid::box(2, -1.0, 1.0, 0.1);
  const auto u = ScalarField::sample(g, [](const Vec& x) { return x[0] - 0.33; });
  const auto curves = extract_contours(g, u.values(), 0.0);
  ASSERT_EQ(curves.size(), 1u);
  EXPECT_FALSE(curves[0].closed);
  EXPECT_NEAR(length(curves[0]), 2.0, 1e-12);
  for (const Point2& p : curves[0].pts) EXPECT_NEAR(p.x, 0.33, 1e-12);
}

TEST(Contour, SquarePolygonArea) {
  Polyline sq{{{0, 0}, {2, 0}, {2, 1}, {0, 1}}, true};
  EXPECT_DOUBLE_EQ(signed_area(sq), 2.0);
  EXPECT_DOUBLE_EQ(length(sq), 6.0);
}

TEST(Contour, TwoBlobsGiveTwoComponents) {
  const Grid g = Grid::box(2, -2.0, 2.0, 0.05);
  const auto u = ScalarField::sample(g, [](const Vec& x) {
    Vec a = x, b = x;
    a[0] -= 1.0;
    b[0] += 1.0;
    return std::min(a.norm(), b.norm());
  });
  const auto curves = extract_contours(g, u.values(), 0.5);
  EXPECT_EQ(curves.size(), 2u);
  EXPECT_NEAR(enclosed_area(curves), 2 * std::numbers::pi * 0.25, 0.01);
}
