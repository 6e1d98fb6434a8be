#include "fbac/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include "fbac/errors.hpp"
#include "fbac/field_io.hpp"

namespace fbac {

ReferenceRadius mcf_reference_radius(double r0, int n, double t) {
  if (!(r0 > 0.0) || n < 1) throw DomainError("need r0 > 0 and n >= 1");
  if (!(t >= 0.0)) throw DomainError("t must be non-negative");
  if (n == 1) return {r0, false};
  const double r2 = r0 * r0 - 2.0 * (n - 1) * t;
  if (r2 <= 0.0) return {0.0, true};
  return {std::sqrt(r2), false};
}

double extinction_time(double r0, int n) {
  if (n == 1) return std::numeric_limits<double>::infinity();
  return r0 * r0 / (2.0 * (n - 1));
}

namespace {

SweepRecord run_member(const SweepConfig& cfg, double eps) {
  SweepRecord rec;
  rec.eps = eps;
  rec.alpha = cfg.alpha;
  rec.h = 2.0 * eps / (cfg.M - 1);
  const auto start = std::chrono::steady_clock::now();
  try {
    RadialRunConfig rc;
    rc.n = cfg.n;
    rc.eps = eps;
    rc.r0 = cfg.r0;
    rc.M = cfg.M;
    rc.T = cfg.T;
    rc.scheme = cfg.scheme;
    rc.alpha = cfg.alpha;
    rc.sample_every = cfg.sample_every;
    rc.holder_seed = cfg.seed;
    const RadialRun run = fbac::run(rc);
    for (const ProfileDiagnostics& d : run.samples) {
      rec.sup_grad_phi = std::max(rec.sup_grad_phi, d.sup_grad_phi);
      rec.holder_grad_phi = std::max(rec.holder_grad_phi, d.holder_grad_phi);
      rec.holder_dnu_phi = std::max(rec.holder_dnu_phi, d.holder_dnu_phi);
    }
    rec.eta = run.eta;
    rec.radius_err_max = run.radius_err_max;
    if (!run.failure.empty()) {
      rec.status = "step_rejected";
      rec.detail = run.failure;
    } else if (run.status == RadialStatus::Extinct) {
      rec.status = "extinct";
    } else if (!(rec.eta < 0.5)) {
      rec.status = "eta_excluded";
    }
  } catch (const std::exception& e) {
    rec.status = "error";
    rec.detail = e.what();
  }
  rec.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace

RateFit fit_or_empty(const std::vector<double>& eps,
                     const std::vector<double>& err) {
  if (eps.size() >= 3) {
    try {
      return fit_rate(eps, err);
    } catch (const DomainError&) {
      // fall through: report as unfitted
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {nan, nan, nan, static_cast<int>(eps.size())};
}

SweepResult run_sweep(const SweepConfig& cfg) {
  if (cfg.eps_list.empty()) throw DomainError("eps_list is empty");
  if (cfg.geometry != "sphere")
    throw DomainError("unsupported sweep geometry '" + cfg.geometry + "'");
  for (double e : cfg.eps_list)
    if (!(e > 0.0)) throw DomainError("eps values must be positive");
  if (!(cfg.T < extinction_time(cfg.r0, cfg.n)))
    throw DomainError("T reaches the extinction time of the reference sphere");

  SweepResult out;
  out.records.resize(cfg.eps_list.size());
  unsigned jobs = cfg.jobs ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(cfg.eps_list.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < cfg.eps_list.size(); i += jobs)
        out.records[i] = run_member(cfg, cfg.eps_list[i]);
    });
  }
  for (auto& t : pool) t.join();

  const char* names[] = {"sup_grad_phi", "holder_grad_phi", "holder_dnu_phi",
                         "radius_err_max"};
  for (const char* name : names) {
    std::vector<double> e, v;
    for (const SweepRecord& r : out.records) {
      if (!r.fit_eligible()) continue;
      const std::string k = name;
      const double val = k == "sup_grad_phi"      ? r.sup_grad_phi
                         : k == "holder_grad_phi" ? r.holder_grad_phi
                         : k == "holder_dnu_phi"  ? r.holder_dnu_phi
                                                  : r.radius_err_max;
      e.push_back(r.eps);
      v.push_back(val);
    }
    out.fits[name] = fit_or_empty(e, v);
  }
  return out;
}

nlohmann::json fits_to_json(const std::map<std::string, RateFit>& fits) {
  auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); };
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, f] : fits)
    j[k] = {{"slope", num(f.slope)},
            {"intercept", num(f.intercept)},
            {"r_squared", num(f.r_squared)},
            {"points_used", f.points_used}};
  return j;
}

std::vector<std::string> write_sweep_outputs(const SweepResult& r,
                                             const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::string csv = (std::filesystem::path(dir) / "sweep.csv").string();
  {
    std::ofstream os(csv);
    if (!os) throw DomainError("cannot write " + csv);
    os << "eps,eta,h,sup_grad_phi,holder_grad_phi,holder_dnu_phi,alpha,"
          "radius_err_max,runtime_s,status\n";
    for (const SweepRecord& s : r.records)
      os << format_double(s.eps) << ',' << format_double(s.eta) << ','
         << format_double(s.h) << ',' << format_double(s.sup_grad_phi) << ','
         << format_double(s.holder_grad_phi) << ','
         << format_double(s.holder_dnu_phi) << ',' << format_double(s.alpha)
         << ',' << format_double(s.radius_err_max) << ','
         << format_double(s.runtime_s) << ',' << s.status << '\n';
  }
  const std::string fj = (std::filesystem::path(dir) / "fits.json").string();
  {
    std::ofstream os(fj);
    if (!os) throw DomainError("cannot write " + fj);
    os << fits_to_json(r.fits).dump(2) << '\n';
  }
  return {csv, fj};
}

}  // namespace fbac
