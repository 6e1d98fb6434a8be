#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fbac/field_io.hpp"
#include "fbac/potential.hpp"
#include "fbaclab/cli.hpp"

namespace fs = std::filesystem;
using fbaclab::run_cli;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream o, e;
  const int code = run_cli(args, o, e);
  return {code, o.str(), e.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "fbac_cli_test" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

nlohmann::json manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  return nlohmann::json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Cli, UnknownSubcommandAndFlagExitTwoWithUsage) {
  CliRun r = cli({"frobnicate"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("simulate-radial"), std::string::npos);
  r = cli({"sweep", "--bogus"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST(Cli, UnknownConfigKeyExitsTwo) {
  const fs::path d = scratch("badkey");
  std::ofstream(d / "c.toml") << "[radial]\nMM = 3\n";
  const CliRun r = cli({"simulate-radial", "--config", (d / "c.toml").string(), "--out", (d / "o").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("radial.MM"), std::string::npos);
}

TEST(Cli, SimulateRadialWritesTrajectoryAndManifest) {
  const fs::path d = scratch("radial");
  std::ofstream(d / "c.toml") << "[radial]\nM = 128\nT = 0.02\n[scheme]\ndt = 1e-3\n";
  const CliRun r = cli({"simulate-radial", "--config", (d / "c.toml").string(), "--out", (d / "a").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(d / "a" / "trajectory.csv"));
  const auto m = manifest(d / "a");
  EXPECT_EQ(m["command"], "simulate-radial");
  EXPECT_EQ(m["status"], "ok");
  EXPECT_EQ(m["config"]["radial"]["M"], 128);
  EXPECT_EQ(m["config_hash"].get<std::string>().size(), 16u);
  // identical config gives identical bytes
  const CliRun again = cli({"simulate-radial", "--config", (d / "c.toml").string(), "--out", (d / "b").string()});
  EXPECT_EQ(again.code, 0);
  for (const char* f : {"trajectory.csv", "diagnostics.csv", "energy.csv", "manifest.json"})
    EXPECT_EQ(slurp(d / "a" / f), slurp(d / "b" / f)) << f;
}

TEST(Cli, InvalidParameterExitsTwo) {
  const fs::path d = scratch("invalid");
  std::ofstream(d / "c.json") << R"({"radial": {"r0": 0.05}})";
  EXPECT_EQ(cli({"simulate-radial", "--config", (d / "c.json").string(), "--out", (d / "o").string()}).code, 2);
}

TEST(Cli, RejectedStepExitsThree) {
  const fs::path d = scratch("reject");
  std::ofstream(d / "c.toml")
      << "[radial]\nM = 128\nT = 0.2\nr0 = 2.0\n[scheme]\ndt = 0.1\nmismatch_tol = 1e-14\nmax_corrector = 1\n";
  const CliRun r = cli({"simulate-radial", "--config", (d / "c.toml").string(), "--out", (d / "o").string()});
  EXPECT_EQ(r.code, 3) << r.out << r.err;
  EXPECT_EQ(manifest(d / "o")["status"], "failed");
}

TEST(Cli, SweepGateFailureExitsFourButWritesFits) {
  const fs::path d = scratch("sweep");
  std::ofstream(d / "s.toml") << "[sweep]\neps_list = [0.1, 0.07, 0.05]\nr0 = 4.0\nT = 0.05\nM = 128\n"
                                 "[scheme]\ndt = 1e-3\n[gates]\nsup_slope_min = 100.0\n";
  const CliRun r = cli({"sweep", "--config", (d / "s.toml").string(), "--out", d.string(), "--assert", "--jobs", "2"});
  EXPECT_EQ(r.code, 4) << r.err;
  bool found = false;
  for (const auto& e : fs::directory_iterator(d)) {
    if (!e.is_directory()) continue;
    found = true;
    EXPECT_TRUE(fs::exists(e.path() / "fits.json"));
    EXPECT_TRUE(fs::exists(e.path() / "sweep.csv"));
    EXPECT_EQ(manifest(e.path())["config_hash"], e.path().filename().string());
    // report on the same directory, same gates
    const CliRun rep = cli({"report", e.path().string()});
    EXPECT_EQ(rep.code, 0);
    EXPECT_TRUE(fs::exists(e.path() / "report.md"));
  }
  EXPECT_TRUE(found);
}

TEST(Cli, DiagnoseManufacturedPairPrintsResidual) {
  const fs::path d = scratch("diagnose");
  const double eps = 0.1;
  const auto pot = fbac::PotentialSpec::make(2.0, eps);
  const fbac::Grid g = fbac::Grid::box(2, -1.0, 1.0, 0.02);
  auto u = [](const fbac::Vec& x) { return 0.5 * std::tanh(x[0] + 0.3 * std::sin(2 * x[1])) + 0.2 * x[1]; };
  const auto f = fbac::ScalarField::sample(g, u);
  // ut = Lap u - f(u) with Lap u from the closed form
  auto lap = [](const fbac::Vec& x) {
    const double a = x[0] + 0.3 * std::sin(2 * x[1]);
    const double t = std::tanh(a), s2 = 1 - t * t;
    const double ax = 1.0, ay = 0.6 * std::cos(2 * x[1]), ayy = -1.2 * std::sin(2 * x[1]);
    return 0.5 * (-2 * t * s2 * (ax * ax + ay * ay) + s2 * ayy);
  };
  const auto ut = fbac::ScalarField::sample(g, [&](const fbac::Vec& x) { return lap(x) - pot.f(u(x)); });
  fbac::write_field_csv(d / "f.csv", f, "u", false);
  fbac::write_field_csv(d / "g.csv", ut, "ut", false);
  std::ofstream(d / "c.toml") << "[diagnose]\ndelta = 2.0\neps = 0.1\n";
  const CliRun r = cli({"diagnose", "--field", (d / "f.csv").string(), "--ut", (d / "g.csv").string(),
                     "--config", (d / "c.toml").string(), "--out", (d / "o").string(), "--assert"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("forced-MCF residual max |r|"), std::string::npos);
  EXPECT_TRUE(fs::exists(d / "o" / "residual.csv"));
  EXPECT_LT(manifest(d / "o")["summary"]["forced_mcf_residual_max"].get<double>(), 1e-2);
}

TEST(Cli, LevelsetAndVariationChecksPassTheirGates) {
  const fs::path d = scratch("checks");
  EXPECT_EQ(cli({"levelset-check", "--out", (d / "l").string(), "--assert"}).code, 0);
  EXPECT_TRUE(fs::exists(d / "l" / "path.csv"));
  EXPECT_EQ(cli({"variation-check", "--out", (d / "v").string(), "--assert"}).code, 0);
  std::ofstream(d / "v0.toml") << "[variation]\ndelta = 0.0\nfield = \"planar\"\nslope = 1.3\n"
                                  "center = [0.05, 0.1]\n";
  EXPECT_EQ(cli({"variation-check", "--config", (d / "v0.toml").string(), "--out", (d / "v0").string(),
                 "--assert"}).code, 0);
}

TEST(Cli, HelpExitsZero) {
  const CliRun r = cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("variation-check"), std::string::npos);
}
