#include "fbaclab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <map>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "fbac/config.hpp"
#include "fbac/curvature.hpp"
#include "fbac/errors.hpp"
#include "fbac/field_io.hpp"
#include "fbac/grid2d_solver.hpp"
#include "fbac/harness.hpp"
#include "fbac/levelset_flow.hpp"
#include "fbac/potential.hpp"
#include "fbac/radial_solver.hpp"
#include "fbac/smooth_field.hpp"
#include "fbac/variation.hpp"

namespace fbaclab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Gate outcome recorded in the manifest; only consulted under --assert.
struct Gate {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

json gates_json(const std::vector<Gate>& gates) {
  json j = json::array();
  for (const Gate& g : gates)
    j.push_back({{"name", g.name}, {"value", std::isfinite(g.value) ? json(g.value) : json()},
                 {"bound", g.bound}, {"pass", g.pass}});
  return j;
}

bool all_pass(const std::vector<Gate>& gates) {
  return std::all_of(gates.begin(), gates.end(), [](const Gate& g) { return g.pass; });
}

Gate at_most(std::string name, double value, double bound) {
  return {std::move(name), value, bound, std::isfinite(value) && value <= bound};
}

Gate at_least(std::string name, double value, double bound) {
  return {std::move(name), value, bound, std::isfinite(value) && value >= bound};
}

struct Context {
  std::string command;
  std::string config_path;
  json config;  // resolved
  std::string hash;
  std::uint64_t seed = 0x5EED;
  std::string seed_text;
  unsigned jobs = 0;
  bool assert_gates = false;
  fs::path out;
  std::ostream* log = nullptr;
  // command-specific flags
  std::string field_path, ut_path, prev_path, run_dir;
};

struct Outcome {
  std::string status = "ok";  // ok, partial, failed
  std::vector<std::string> outputs;
  json summary = json::object();
  std::vector<Gate> gates;
  std::string failure;
};

json scheme_defaults(const fbac::SchemeParams& p) {
  return {{"dt", p.dt},
          {"lambda", p.lambda},
          {"mismatch_tol", p.mismatch_tol},
          {"theta", p.theta},
          {"diffusion", p.diffusion},
          {"newton_tol", p.newton_tol},
          {"max_corrector", p.max_corrector}};
}

fbac::SchemeParams scheme_from(const json& j) {
  fbac::SchemeParams p;
  p.dt = j.at("dt").get<double>();
  p.lambda = j.at("lambda").get<double>();
  p.mismatch_tol = j.at("mismatch_tol").get<double>();
  p.theta = j.at("theta").get<double>();
  p.diffusion = j.at("diffusion").get<double>();
  p.newton_tol = j.at("newton_tol").get<double>();
  p.max_corrector = j.at("max_corrector").get<int>();
  return p;
}

fbac::Vec vec_from(const json& j) {
  fbac::Vec v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<double>();
  return v;
}

std::string rel(const Context& c, const fs::path& p) {
  return fs::relative(p, c.out).generic_string();
}

// ---------------------------------------------------------------- radial

Outcome simulate_radial(const Context& c) {
  const json& r = c.config.at("radial");
  fbac::RadialRunConfig rc;
  rc.n = r.at("n").get<int>();
  rc.eps = r.at("eps").get<double>();
  rc.r0 = r.at("r0").get<double>();
  rc.M = r.at("M").get<int>();
  rc.T = r.at("T").get<double>();
  rc.alpha = r.at("alpha").get<double>();
  rc.sample_every = r.at("sample_every").get<int>();
  rc.snapshot_every = r.at("snapshot_every").get<int>();
  rc.scheme = scheme_from(c.config.at("scheme"));
  rc.holder_seed = c.seed;

  const fbac::RadialRun run = fbac::run(rc);
  Outcome o;
  for (const auto& p : fbac::write_radial_outputs(run, c.out.string()))
    o.outputs.push_back(rel(c, p));
  o.summary = {{"steps", run.steps},
               {"final_t", run.final_state.t},
               {"status", fbac::to_string(run.status)},
               {"eta", run.eta},
               {"radius_err_max", run.radius_err_max},
               {"max_mismatch", run.max_mismatch},
               {"max_energy_increase", run.max_energy_increase},
               {"regime_warning", run.regime_warning}};
  if (!run.failure.empty()) {
    o.status = "failed";
    o.failure = run.failure;
  } else if (run.status == fbac::RadialStatus::Extinct) {
    o.status = "partial";
  }
  const json& g = c.config.at("gates");
  o.gates.push_back(at_most("radius_err_max", run.radius_err_max,
                            g.at("radius_tol_over_eps").get<double>() * rc.eps));
  o.gates.push_back(at_most("max_energy_increase", run.max_energy_increase,
                            g.at("energy_tol").get<double>()));
  o.gates.push_back(at_most("max_mismatch", run.max_mismatch,
                            g.at("mismatch_max").get<double>()));
  *c.log << "steps " << run.steps << ", radius_err_max "
         << fbac::format_double(run.radius_err_max) << ", eta "
         << fbac::format_double(run.eta) << '\n';
  if (run.regime_warning)
    *c.log << "warning: eps * eta >= 0.1, outside the asymptotic regime\n";
  return o;
}

// ---------------------------------------------------------------- 2D

fbac::Curve curve_from(const json& g) {
  const std::string kind = g.at("curve").get<std::string>();
  const double cx = g.at("cx").get<double>(), cy = g.at("cy").get<double>();
  if (kind == "circle") return fbac::Curve::circle(g.at("a").get<double>(), cx, cy);
  if (kind == "ellipse")
    return fbac::Curve::ellipse(g.at("a").get<double>(), g.at("b").get<double>(), cx, cy);
  if (kind == "line") return fbac::Curve::line(g.at("offset").get<double>());
  throw fbac::ConfigError("grid2d.curve must be circle, ellipse or line");
}

Outcome simulate_2d(const Context& c) {
  const json& g = c.config.at("grid2d");
  const json& s = c.config.at("scheme");
  fbac::Grid2DRunConfig rc;
  rc.curve = curve_from(g);
  rc.eps = g.at("eps").get<double>();
  rc.h = g.at("h").get<double>();
  rc.half_width = g.at("half_width").get<double>();
  rc.T = g.at("T").get<double>();
  rc.sample_every = g.at("sample_every").get<int>();
  rc.params.redistance_every = g.at("redistance_every").get<int>();
  rc.params.solve_tol = g.at("solve_tol").get<double>();
  rc.params.max_sweeps = g.at("max_sweeps").get<int>();
  rc.params.omega = g.at("omega").get<double>();
  rc.params.scheme.dt = s.at("dt").get<double>();
  rc.params.scheme.lambda = s.at("lambda").get<double>();
  rc.params.scheme.mismatch_tol = s.at("mismatch_tol").get<double>();

  const fbac::Grid2DRun run = fbac::run(rc);
  Outcome o;
  const fs::path samples = c.out / "area.csv";
  {
    std::ofstream os(samples);
    os << "t,area,length,max_mismatch\n";
    for (const auto& q : run.samples)
      os << fbac::format_double(q.t) << ',' << fbac::format_double(q.area) << ','
         << fbac::format_double(q.length) << ',' << fbac::format_double(q.max_mismatch)
         << '\n';
  }
  o.outputs.push_back(rel(c, samples));
  if (run.final_state) {
    const fs::path fu = c.out / "final_u.csv";
    fbac::write_field_csv(fu, run.final_state->u, "u", false);
    o.outputs.push_back(rel(c, fu));
    o.outputs.push_back(rel(c, fbac::field_manifest_path(fu)));
  }
  double max_mm = 0.0;
  for (const auto& q : run.samples) max_mm = std::max(max_mm, q.max_mismatch);
  o.summary = {{"status", fbac::to_string(run.status)},
               {"area_rate", run.area_rate},
               {"samples", run.samples.size()},
               {"max_mismatch", max_mm}};
  if (!run.failure.empty()) {
    o.status = "failed";
    o.failure = run.failure;
  } else if (run.status != fbac::Grid2DStatus::Ok) {
    o.status = "partial";
  }
  if (rc.curve.kind != fbac::Curve::Kind::Line) {
    const double target = -2.0 * std::numbers::pi;
    const double tol = c.config.at("gates").at("area_rate_rel_tol").get<double>();
    o.gates.push_back(at_most("area_rate_rel_error",
                              std::abs(run.area_rate - target) / std::abs(target), tol));
  }
  *c.log << "area rate " << fbac::format_double(run.area_rate) << " ("
         << run.samples.size() << " samples)\n";
  return o;
}

// ---------------------------------------------------------------- diagnose

fbac::BandMask mask_from(const std::string& kind, const fbac::ScalarField& f,
                         double margin) {
  if (kind == "band") return fbac::band_mask(f, margin);
  if (kind == "full") return fbac::full_mask(f.grid());
  throw fbac::ConfigError("mask must be band or full");
}

Outcome diagnose(const Context& c) {
  if (c.field_path.empty()) throw fbac::ConfigError("diagnose needs --field");
  const json& d = c.config.at("diagnose");
  fbac::ScalarField field = fbac::read_field_csv(c.field_path);
  if (!c.ut_path.empty()) {
    const fbac::ScalarField ut = fbac::read_field_csv(c.ut_path);
    if (!ut.grid().same_layout(field.grid()))
      throw fbac::ConfigError("--ut grid does not match --field");
    field = field.with_dt(std::vector<double>(ut.values().begin(), ut.values().end()));
  }
  const auto pot = fbac::PotentialSpec::make(d.at("delta").get<double>(),
                                             d.at("eps").get<double>());
  const fbac::BandMask mask =
      mask_from(d.at("mask").get<std::string>(), field, d.at("margin").get<double>());
  fbac::ResidualOptions ro;
  ro.grad_floor = d.at("grad_floor").get<double>();
  ro.edge_margin = d.at("edge_margin").get<int>();
  const double floor = ro.grad_floor > 0.0 ? ro.grad_floor : fbac::default_grad_floor(pot.eps);

  Outcome o;
  const fbac::Grid& grid = field.grid();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> H(grid.size(), nan), dnu(grid.size(), nan), v(grid.size(), nan),
      phi(grid.size(), nan);
  std::size_t degenerate = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!mask.contains(i)) continue;
    const fbac::NodeIndex idx = grid.unravel(i);
    if (grid.edge_distance(idx) < ro.edge_margin) continue;
    try {
      const fbac::CurvatureSample s = fbac::sample(field, idx, floor, &mask);
      H[i] = s.H;
      dnu[i] = s.dnu_phi;
      phi[i] = s.phi;
      if (s.v) v[i] = *s.v;
    } catch (const fbac::DegenerateGradient&) {
      ++degenerate;
    } catch (const fbac::DomainError&) {
      // stencil does not fit inside the mask
    }
  }
  const fs::path curv = c.out / "curvature.csv";
  fbac::write_nodal_csv(curv, grid, field.time(), {"H", "dnu_phi", "v", "phi"},
                        {H, dnu, v, phi});
  o.outputs.push_back(rel(c, curv));
  o.summary["degenerate_nodes"] = degenerate;

  if (field.has_dt()) {
    const fbac::ResidualField r = fbac::forced_mcf_residual(field, pot, mask, ro);
    const fs::path rp = c.out / "residual.csv";
    fbac::write_field_csv(rp, r.residual, "r", false);
    o.outputs.push_back(rel(c, rp));
    o.summary["forced_mcf_residual_max"] = r.max_abs;
    o.summary["evaluated"] = r.evaluated;
    *c.log << "forced-MCF residual max |r| = " << fbac::format_double(r.max_abs)
           << " over " << r.evaluated << " nodes\n";
    o.gates.push_back(at_most("forced_mcf_residual_max", r.max_abs,
                              c.config.at("gates").at("residual_max").get<double>()));
  }
  if (!c.prev_path.empty()) {
    const fbac::ScalarField prev = fbac::read_field_csv(c.prev_path);
    const fbac::ResidualField r = fbac::phi_evolution_residual(field, prev, pot, mask, ro);
    const fs::path rp = c.out / "phi_residual.csv";
    fbac::write_field_csv(rp, r.residual, "r", false);
    o.outputs.push_back(rel(c, rp));
    o.summary["phi_residual_max"] = r.max_abs;
    *c.log << "phi-evolution residual max |r| = " << fbac::format_double(r.max_abs) << '\n';
  }
  return o;
}

// ---------------------------------------------------------------- level sets

Outcome levelset_check(const Context& c) {
  const json& l = c.config.at("levelset");
  const std::string kind = l.at("field").get<std::string>();
  const int dim = l.at("dim").get<int>();
  const fbac::Vec x0 = vec_from(l.at("x0"));
  if (x0.size() != dim) throw fbac::ConfigError("levelset.x0 must have dim entries");
  fbac::ImmersionOptions opts;
  opts.max_dtau = l.at("max_dtau").get<double>();
  const double tol = l.at("tol").get<double>();
  const double tau1 = l.at("tau1").get<double>();

  std::unique_ptr<fbac::SmoothField> field;
  if (kind == "paraboloid") {
    field = std::make_unique<fbac::AnalyticField>(fbac::AnalyticField::paraboloid(dim));
  } else if (kind == "cone") {
    field = std::make_unique<fbac::AnalyticField>(fbac::AnalyticField::cone(dim));
  } else if (kind == "grid") {
    const std::string path = l.at("field_path").get<std::string>();
    if (path.empty()) throw fbac::ConfigError("levelset.field_path is required for grid fields");
    field = std::make_unique<fbac::GridField>(fbac::read_field_csv(path));
  } else {
    throw fbac::ConfigError("levelset.field must be paraboloid, cone or grid");
  }
  const double tau0 = l.at("tau0").is_null() ? field->value(x0) : l.at("tau0").get<double>();

  const fbac::ImmersionPath path = fbac::integrate_immersion(*field, x0, tau0, tau1, tol, opts);
  const fs::path pp = c.out / "path.csv";
  fbac::write_path_csv(pp.string(), path);
  Outcome o;
  o.outputs.push_back(rel(c, pp));
  const double level = fbac::level_preservation_error(path, *field);
  const fbac::HmcfReport h = fbac::hmcf_residual(path, *field);
  o.summary = {{"path_status", fbac::to_string(path.status)},
               {"samples", path.size()},
               {"level_error", level},
               {"hmcf_residual", h.max_abs}};
  if (path.status == fbac::PathStatus::Degenerate) {
    o.status = "failed";
    o.failure = "immersion reached a degenerate gradient";
  } else if (path.status == fbac::PathStatus::Truncated) {
    o.status = "partial";
  }
  const json& g = c.config.at("gates");
  o.gates.push_back(at_most("hmcf_residual", h.max_abs, g.at("hmcf_max").get<double>()));
  o.gates.push_back(at_most("level_error", level, g.at("level_max").get<double>()));
  *c.log << "hmcf residual " << fbac::format_double(h.max_abs) << ", level error "
         << fbac::format_double(level) << '\n';
  return o;
}

// ---------------------------------------------------------------- variation

Outcome variation_check(const Context& c) {
  const json& v = c.config.at("variation");
  const double delta = v.at("delta").get<double>();
  const double eps = v.at("eps").get<double>();
  const double w = v.at("half_width").get<double>();
  const fbac::Grid grid = fbac::Grid::box(2, -w, w, v.at("h").get<double>());
  const auto pot = fbac::PotentialSpec::make(delta, eps);
  const std::string geom = v.at("field").get<std::string>();
  const double radius = v.at("radius").get<double>();
  const double slope = v.at("slope").get<double>();
  const double offset = v.at("offset").get<double>();
  std::function<double(const fbac::Vec&)> dist;
  if (geom == "circle")
    dist = [=](const fbac::Vec& x) { return x.norm() - radius; };
  else if (geom == "planar")
    dist = [=](const fbac::Vec& x) { return x[0] - offset; };
  else
    throw fbac::ConfigError("variation.field must be circle or planar");
  const auto u = fbac::ScalarField::sample(grid, [&](const fbac::Vec& x) {
    const double s = slope * dist(x) / eps;
    return delta == 0.0 ? std::clamp(s, -1.0, 1.0) : std::tanh(s);
  });

  const std::string dkind = v.at("deformation").get<std::string>();
  const fbac::Vec center = vec_from(v.at("center"));
  const double support = v.at("support").get<double>();
  fbac::DeformationField U;
  if (dkind == "bump")
    U = fbac::DeformationField::bump(center, support, vec_from(v.at("amplitude")));
  else if (dkind == "swirl")
    U = fbac::DeformationField::swirl(center, support, v.at("amplitude").at(0).get<double>());
  else
    throw fbac::ConfigError("variation.deformation must be bump or swirl");

  const fbac::VariationReport rep =
      fbac::compare_inner_variation(u, U, pot, v.at("t_step").get<double>());
  const fbac::BandMask mask = delta == 0.0 ? fbac::band_mask(u) : fbac::full_mask(grid);
  const double div_res = fbac::div_stress_check(u, pot, mask);
  double u_sup = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    u_sup = std::max(u_sup, U(grid.position(i)).norm());

  Outcome o;
  o.summary = rep.to_json();
  o.summary["div_stress_residual"] = div_res;
  o.summary["U_sup"] = u_sup;
  const fs::path rp = c.out / "variation.json";
  {
    std::ofstream os(rp);
    os << o.summary.dump(2) << '\n';
  }
  o.outputs.push_back(rel(c, rp));
  double tol = c.config.at("gates").at("rel_tol").get<double>();
  if (tol <= 0.0) tol = delta == 0.0 ? 1e-2 : 1e-3;
  const double crit = 1e-6 * u_sup;
  if (std::abs(rep.analytic) <= crit && std::abs(rep.fd) <= crit)
    o.gates.push_back(at_most("abs_variation_over_U_sup",
                              std::max(std::abs(rep.analytic), std::abs(rep.fd)), crit));
  else
    o.gates.push_back(at_most("rel_gap", rep.rel_gap, tol));
  *c.log << "analytic " << fbac::format_double(rep.analytic) << ", fd "
         << fbac::format_double(rep.fd) << ", rel gap " << fbac::format_double(rep.rel_gap)
         << '\n';
  return o;
}

// ---------------------------------------------------------------- sweep

std::vector<Gate> sweep_gates(const std::map<std::string, fbac::RateFit>& fits,
                              const json& g) {
  std::vector<Gate> gates;
  auto get = [&](const char* k) {
    auto it = fits.find(k);
    return it == fits.end() ? fbac::RateFit{NAN, NAN, NAN, 0} : it->second;
  };
  const fbac::RateFit sup = get("sup_grad_phi");
  const fbac::RateFit hol = get("holder_dnu_phi");
  gates.push_back(at_least("sup_grad_phi.slope", sup.slope, g.at("sup_slope_min").get<double>()));
  gates.push_back(at_least("sup_grad_phi.r_squared", sup.r_squared, g.at("sup_r2_min").get<double>()));
  gates.push_back(at_least("holder_dnu_phi.slope", hol.slope, g.at("holder_slope_min").get<double>()));
  gates.push_back(at_least("holder_dnu_phi.r_squared", hol.r_squared, g.at("holder_r2_min").get<double>()));
  return gates;
}

Outcome sweep(const Context& c) {
  const json& s = c.config.at("sweep");
  fbac::SweepConfig sc;
  sc.eps_list = s.at("eps_list").get<std::vector<double>>();
  sc.geometry = s.at("geometry").get<std::string>();
  sc.n = s.at("n").get<int>();
  sc.r0 = s.at("r0").get<double>();
  sc.T = s.at("T").get<double>();
  sc.alpha = s.at("alpha").get<double>();
  sc.M = s.at("M").get<int>();
  sc.sample_every = s.at("sample_every").get<int>();
  sc.scheme = scheme_from(c.config.at("scheme"));
  sc.jobs = c.jobs;
  sc.seed = c.seed;

  const fbac::SweepResult res = fbac::run_sweep(sc);
  Outcome o;
  for (const auto& p : fbac::write_sweep_outputs(res, c.out.string())) o.outputs.push_back(rel(c, p));
  std::size_t ok = 0, failed = 0;
  for (const auto& r : res.records) {
    if (r.status == "ok") ++ok;
    if (r.status == "step_rejected" || r.status == "error" || r.status == "extinct") ++failed;
    *c.log << "eps " << fbac::format_double(r.eps) << ": " << r.status
           << (r.detail.empty() ? "" : " (" + r.detail + ")") << ", sup_grad_phi "
           << fbac::format_double(r.sup_grad_phi) << ", holder_dnu_phi "
           << fbac::format_double(r.holder_dnu_phi) << ", eta " << fbac::format_double(r.eta)
           << '\n';
  }
  if (ok == 0)
    o.status = "failed", o.failure = "no sweep member succeeded";
  else if (ok < res.records.size())
    o.status = "partial";
  o.summary = {{"fits", fbac::fits_to_json(res.fits)},
               {"members", res.records.size()},
               {"succeeded", ok},
               {"failed", failed}};
  o.gates = sweep_gates(res.fits, c.config.at("gates"));
  for (const auto& [k, f] : res.fits)
    *c.log << "fit " << k << ": slope " << fbac::format_double(f.slope) << ", r2 "
           << fbac::format_double(f.r_squared) << " (" << f.points_used << " points)\n";
  return o;
}

// ---------------------------------------------------------------- report

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw fbac::ConfigError("cannot read " + p.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

Outcome report(const Context& c) {
  if (c.run_dir.empty()) throw fbac::ConfigError("report needs a run directory");
  const fs::path dir = c.run_dir;
  std::ifstream fin(dir / "fits.json");
  if (!fin) throw fbac::ConfigError("no fits.json in " + dir.string());
  json fits_j;
  try {
    fits_j = json::parse(fin);
  } catch (const json::parse_error& e) {
    throw fbac::ConfigError(std::string("malformed fits.json: ") + e.what());
  }
  const auto rows = read_csv(dir / "sweep.csv");
  if (rows.empty()) throw fbac::ConfigError("empty sweep.csv");

  std::map<std::string, fbac::RateFit> fits;
  for (const auto& [k, f] : fits_j.items()) {
    auto num = [&](const char* key) {
      return f.at(key).is_null() ? NAN : f.at(key).get<double>();
    };
    fits[k] = {num("slope"), num("intercept"), num("r_squared"), f.at("points_used").get<int>()};
  }
  Outcome o;
  o.gates = sweep_gates(fits, c.config.at("gates"));

  std::ostringstream md;
  md << "# Sweep report\n\n";
  md << "| " ;
  for (const auto& h : rows.front()) md << h << " | ";
  md << "\n|";
  for (std::size_t i = 0; i < rows.front().size(); ++i) md << "---|";
  md << '\n';
  for (std::size_t r = 1; r < rows.size(); ++r) {
    md << "| ";
    for (const auto& cell : rows[r]) md << cell << " | ";
    md << '\n';
  }
  md << "\n## Rate fits\n\n| norm | slope | r^2 | points |\n|---|---|---|---|\n";
  for (const auto& [k, f] : fits)
    md << "| " << k << " | " << fbac::format_double(f.slope) << " | "
       << fbac::format_double(f.r_squared) << " | " << f.points_used << " |\n";
  md << "\n## Gates\n\n";
  for (const Gate& g : o.gates)
    md << "- " << g.name << " = " << fbac::format_double(g.value) << " (bound "
       << fbac::format_double(g.bound) << "): " << (g.pass ? "pass" : "FAIL") << '\n';
  const fs::path rp = c.out / "report.md";
  {
    std::ofstream os(rp);
    os << md.str();
  }
  o.outputs.push_back(rel(c, rp));
  o.summary = {{"fits", fits_j}, {"members", rows.size() - 1}};
  *c.log << md.str();
  return o;
}

// ---------------------------------------------------------------- defaults

json gates_sweep() {
  return {{"sup_slope_min", 0.8}, {"sup_r2_min", 0.95}, {"holder_slope_min", 0.4},
          {"holder_r2_min", 0.9}};
}

}  // namespace

json default_config(const std::string& command) {
  if (command == "simulate-radial") {
    fbac::SchemeParams p;
    return {{"radial",
             {{"n", 2}, {"eps", 0.05}, {"r0", 1.0}, {"M", 1024}, {"T", 0.3}, {"alpha", 0.5},
              {"sample_every", 0}, {"snapshot_every", 0}}},
            {"scheme", scheme_defaults(p)},
            {"gates", {{"radius_tol_over_eps", 5.0}, {"energy_tol", 1e-6}, {"mismatch_max", 1e-3}}}};
  }
  if (command == "simulate-2d") {
    const fbac::Grid2DParams p;
    return {{"grid2d",
             {{"curve", "circle"}, {"cx", 0.0}, {"cy", 0.0}, {"a", 1.0}, {"b", 1.0},
              {"offset", 0.0}, {"eps", 0.1}, {"h", 0.0125}, {"half_width", 1.5}, {"T", 0.2},
              {"sample_every", 0}, {"redistance_every", p.redistance_every},
              {"solve_tol", p.solve_tol}, {"max_sweeps", p.max_sweeps}, {"omega", p.omega}}},
            {"scheme",
             {{"dt", p.scheme.dt}, {"lambda", p.scheme.lambda},
              {"mismatch_tol", p.scheme.mismatch_tol}}},
            {"gates", {{"area_rate_rel_tol", 0.1}}}};
  }
  if (command == "diagnose") {
    return {{"diagnose",
             {{"delta", 2.0}, {"eps", 0.1}, {"mask", "full"}, {"margin", 0.0},
              {"grad_floor", 0.0}, {"edge_margin", 1}}},
            {"gates", {{"residual_max", 1e-2}}}};
  }
  if (command == "levelset-check") {
    const fbac::ImmersionOptions o;
    return {{"levelset",
             {{"field", "paraboloid"}, {"dim", 2}, {"x0", {1.0, 0.0}}, {"tau0", nullptr},
              {"tau1", 2.0}, {"tol", 1e-8}, {"max_dtau", o.max_dtau}, {"field_path", ""}}},
            {"gates", {{"hmcf_max", 1e-6}, {"level_max", 1e-7}}}};
  }
  if (command == "variation-check") {
    return {{"variation",
             {{"delta", 2.0}, {"eps", 0.1}, {"h", 0.01}, {"half_width", 1.0},
              {"field", "circle"}, {"radius", 0.5}, {"slope", 1.0}, {"offset", 0.0},
              {"deformation", "bump"}, {"center", {0.3, 0.2}}, {"support", 0.4},
              {"amplitude", {0.7, -0.4}}, {"t_step", 1e-4}}},
            {"gates", {{"rel_tol", 0.0}}}};
  }
  if (command == "sweep") {
    const fbac::SweepConfig s;
    return {{"sweep",
             {{"eps_list", {0.1, 0.05, 0.025, 0.0125}}, {"geometry", s.geometry}, {"n", s.n},
              {"r0", s.r0}, {"T", s.T}, {"alpha", s.alpha}, {"M", s.M},
              {"sample_every", s.sample_every}}},
            {"scheme", scheme_defaults(s.scheme)},
            {"gates", gates_sweep()}};
  }
  if (command == "report") return {{"gates", gates_sweep()}};
  throw fbac::ConfigError("unknown command '" + command + "'");
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"fbaclab: free-boundary Allen-Cahn laboratory", "fbaclab"};
  app.require_subcommand(1, 1);

  Context ctx;
  std::string out_dir = "fbac_out";
  std::string seed_text = "0x5EED";

  const std::map<std::string, std::string> commands = {
      {"simulate-radial", "front-tracked radial run (trajectory, diagnostics, energy)"},
      {"simulate-2d", "two-dimensional band run on a Cartesian grid (area law)"},
      {"diagnose", "curvature and residual dumps of a field file"},
      {"levelset-check", "immersion ODE, level preservation and HMCF residual"},
      {"variation-check", "inner variation: analytic against pullback difference"},
      {"sweep", "eps sweep of radial runs with rate fits"},
      {"report", "markdown summary of a sweep directory"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sc = app.add_subcommand(name, help);
    sc->add_option("--config", ctx.config_path, "TOML or JSON config");
    sc->add_option("--out", out_dir, "output directory")->capture_default_str();
    sc->add_option("--jobs", ctx.jobs, "worker threads (0: logical cores)");
    sc->add_flag("--assert", ctx.assert_gates, "exit 4 when an acceptance gate fails");
    sc->add_option("--seed", seed_text, "sampling seed (hex)")->capture_default_str();
    subs[name] = sc;
  }
  subs["diagnose"]->add_option("--field", ctx.field_path, "field CSV (u, optional ut)");
  subs["diagnose"]->add_option("--ut", ctx.ut_path, "CSV whose value column is ut");
  subs["diagnose"]->add_option("--prev", ctx.prev_path, "earlier snapshot for the phi residual");
  subs["report"]->add_option("run_dir", ctx.run_dir, "sweep run directory")->required();

  std::vector<std::string> argv_s = {"fbaclab"};
  argv_s.insert(argv_s.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_s) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    const auto chosen = app.get_subcommands();
    out << (chosen.empty() ? app.help() : chosen.front()->help());
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kConfigError;
  }
  ctx.command = app.get_subcommands().front()->get_name();
  ctx.log = &out;

  try {
    ctx.seed = fbac::parse_seed(seed_text);
    json user = json::object();
    if (!ctx.config_path.empty()) user = fbac::load_config_file(ctx.config_path);
    ctx.config = fbac::merge_config(default_config(ctx.command), user);
    char seed_hex[32];
    std::snprintf(seed_hex, sizeof seed_hex, "0x%llX", static_cast<unsigned long long>(ctx.seed));
    ctx.seed_text = seed_hex;
    ctx.hash = fbac::config_hash(
        {{"command", ctx.command}, {"config", ctx.config}, {"seed", ctx.seed_text}});
  } catch (const fbac::ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  ctx.out = out_dir;
  if (ctx.command == "sweep") ctx.out /= ctx.hash;
  if (ctx.command == "report" && out_dir == "fbac_out") ctx.out = ctx.run_dir;

  Outcome o;
  int code = kOk;
  try {
    fs::create_directories(ctx.out);
    if (ctx.command == "simulate-radial") o = simulate_radial(ctx);
    else if (ctx.command == "simulate-2d") o = simulate_2d(ctx);
    else if (ctx.command == "diagnose") o = diagnose(ctx);
    else if (ctx.command == "levelset-check") o = levelset_check(ctx);
    else if (ctx.command == "variation-check") o = variation_check(ctx);
    else if (ctx.command == "sweep") o = sweep(ctx);
    else o = report(ctx);
    if (o.status == "failed") code = kNumericalFailure;
  } catch (const fbac::ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const fbac::DomainError& e) {
    err << "invalid parameters: " << e.what() << '\n';
    return kConfigError;
  } catch (const fbac::StepRejected& e) {
    o.status = "failed";
    o.failure = e.what();
    code = kNumericalFailure;
  } catch (const fbac::DegenerateGradient& e) {
    o.status = "failed";
    o.failure = e.what();
    code = kNumericalFailure;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kConfigError;
  }
  if (!o.failure.empty()) err << "numerical failure: " << o.failure << '\n';

  const bool gates_ok = all_pass(o.gates);
  if (ctx.assert_gates && code == kOk && !gates_ok) {
    for (const Gate& g : o.gates)
      if (!g.pass)
        err << "gate failed: " << g.name << " = " << fbac::format_double(g.value)
            << " (bound " << fbac::format_double(g.bound) << ")\n";
    code = kGateFailure;
  }

  std::vector<std::string> outputs = o.outputs;
  outputs.push_back("manifest.json");
  const json manifest = {{"command", ctx.command},
                         {"config_path", ctx.config_path},
                         {"config_hash", ctx.hash},
                         {"config", ctx.config},
                         {"seed", ctx.seed_text},
                         {"outputs", outputs},
                         {"status", o.status},
                         {"failure", o.failure},
                         {"summary", o.summary},
                         {"gates", gates_json(o.gates)},
                         {"gates_pass", gates_ok}};
  std::ofstream mf(ctx.out / "manifest.json");
  mf << manifest.dump(2) << '\n';
  out << ctx.command << ": " << o.status << " -> " << ctx.out.generic_string() << '\n';
  return code;
}

}  // namespace fbaclab
