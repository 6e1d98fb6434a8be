#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "fbac/errors.hpp"
#include "fbac/harness.hpp"

using namespace fbac;

TEST(ReferenceRadius, ClosedForm) {
  EXPECT_EQ(mcf_reference_radius(1.3, 2, 0.0).radius, 1.3);
  EXPECT_NEAR(mcf_reference_radius(1.0, 2, 0.375).radius, 0.5, 1e-15);
  EXPECT_NEAR(extinction_time(0.5, 3), 0.0625, 1e-15);
  EXPECT_TRUE(mcf_reference_radius(0.5, 3, 0.07).extinct);
  EXPECT_FALSE(mcf_reference_radius(0.5, 3, 0.06).extinct);
  EXPECT_EQ(mcf_reference_radius(2.0, 1, 10.0).radius, 2.0);
}

namespace {

SweepConfig small_sweep() {
  SweepConfig c;
  c.r0 = 4.0;
  c.T = 0.05;
  c.M = 128;
  c.scheme.dt = 1e-3;
  return c;
}

}  // namespace

TEST(Sweep, SingleMemberHasNoFit) {
  SweepConfig c = small_sweep();
  c.eps_list = {0.1};
  const SweepResult r = run_sweep(c);
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].status, "ok");
  EXPECT_GT(r.records[0].sup_grad_phi, 0.0);
  EXPECT_LT(r.fits.at("sup_grad_phi").points_used, 3);
  EXPECT_TRUE(std::isnan(r.fits.at("sup_grad_phi").slope));
}

TEST(Sweep, ResultsIndependentOfThreadCount) {
  SweepConfig c = small_sweep();
  c.eps_list = {0.1, 0.07, 0.05};
  c.jobs = 1;
  const SweepResult a = run_sweep(c);
  c.jobs = 3;
  const SweepResult b = run_sweep(c);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].sup_grad_phi, b.records[i].sup_grad_phi);
    EXPECT_EQ(a.records[i].holder_dnu_phi, b.records[i].holder_dnu_phi);
    EXPECT_EQ(a.records[i].eta, b.records[i].eta);
  }
  EXPECT_EQ(a.fits.at("sup_grad_phi").slope, b.fits.at("sup_grad_phi").slope);
  EXPECT_EQ(a.fits.at("sup_grad_phi").points_used, 3);
}

TEST(Sweep, LargeEtaMembersAreExcluded) {
  SweepConfig c = small_sweep();
  c.r0 = 0.5;  // |A| = 2 on the band
  c.T = 0.01;
  c.eps_list = {0.05, 0.04, 0.03};
  const SweepResult r = run_sweep(c);
  for (const auto& rec : r.records) EXPECT_EQ(rec.status, "eta_excluded");
  EXPECT_EQ(r.fits.at("sup_grad_phi").points_used, 0);
}

TEST(Sweep, OutputsHaveDocumentedColumns) {
  SweepConfig c = small_sweep();
  c.eps_list = {0.1, 0.05};
  const auto dir = std::filesystem::temp_directory_path() / "fbac_sweep_test";
  const auto files = write_sweep_outputs(run_sweep(c), dir.string());
  ASSERT_EQ(files.size(), 2u);
  std::ifstream in(dir / "sweep.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header,
            "eps,eta,h,sup_grad_phi,holder_grad_phi,holder_dnu_phi,alpha,radius_err_max,"
            "runtime_s,status");
  std::ifstream fj(dir / "fits.json");
  const auto j = nlohmann::json::parse(fj);
  EXPECT_TRUE(j.contains("sup_grad_phi"));
  EXPECT_TRUE(j["sup_grad_phi"]["slope"].is_null());
  EXPECT_EQ(j["sup_grad_phi"]["points_used"], 2);
}

TEST(Sweep, InvalidConfigsThrow) {
  SweepConfig c = small_sweep();
  EXPECT_THROW(run_sweep(c), DomainError);  // empty list
  c.eps_list = {0.1};
  c.geometry = "torus";
  EXPECT_THROW(run_sweep(c), DomainError);
  c.geometry = "sphere";
  c.T = 10.0;
  EXPECT_THROW(run_sweep(c), DomainError);
}
