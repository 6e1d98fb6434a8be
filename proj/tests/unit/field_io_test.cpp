#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "fbac/field_io.hpp"

using namespace fbac;

TEST(FieldIo, RoundTripIsBitExact) {
  const auto dir = std::filesystem::temp_directory_path() / "fbac_field_io_test";
  std::filesystem::create_directories(dir);
  const Grid g = Grid::box(2, -0.5, 0.75, 0.05);
  const auto u = ScalarField::sample(
      g, [](const Vec& x) { return std::sin(3 * x[0]) / 7.0 + x[1] * 1e-17; },
      [](const Vec& x) { return std::cos(x[1]) / 3.0; }, 0.125);
  write_field_csv(dir / "u.csv", u);
  const ScalarField back = read_field_csv(dir / "u.csv");
  ASSERT_TRUE(back.grid().same_layout(g));
  EXPECT_EQ(back.time(), 0.125);
  ASSERT_TRUE(back.has_dt());
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(back[i], u[i]);
    EXPECT_EQ(back.dt_values()[i], u.dt_values()[i]);
  }
  EXPECT_TRUE(std::filesystem::exists(field_manifest_path(dir / "u.csv")));
}

TEST(FieldIo, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(std::nan("")), "nan");
}
