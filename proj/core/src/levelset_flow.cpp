#include "fbac/levelset_flow.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "fbac/curvature.hpp"
#include "fbac/errors.hpp"
#include "fbac/field_io.hpp"

namespace fbac {

std::string to_string(PathStatus s) {
  switch (s) {
    case PathStatus::Complete: return "complete";
    case PathStatus::Truncated: return "truncated";
    case PathStatus::Degenerate: return "degenerate";
  }
  return "unknown";
}

namespace {

struct OutOfDomain {};
struct Degenerate {};

Vec velocity(const SmoothField& f, const Vec& x, double floor) {
  if (!f.contains(x)) throw OutOfDomain{};
  const Vec g = f.gradient(x);
  const double n2 = g.squaredNorm();
  if (!std::isfinite(n2)) throw OutOfDomain{};
  if (!(std::sqrt(n2) > floor)) throw Degenerate{};
  return g / n2;
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct StepResult {
  Vec x;
  double err;
};

StepResult dp_step(const SmoothField& f, const Vec& x, double h, double floor) {
  (void)c2; (void)c3; (void)c4; (void)c5;  // autonomous system
  const Vec k1 = velocity(f, x, floor);
  const Vec k2 = velocity(f, x + h * a21 * k1, floor);
  const Vec k3 = velocity(f, x + h * (a31 * k1 + a32 * k2), floor);
  const Vec k4 = velocity(f, x + h * (a41 * k1 + a42 * k2 + a43 * k3), floor);
  const Vec k5 = velocity(
      f, x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), floor);
  const Vec k6 = velocity(
      f, x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5),
      floor);
  const Vec y = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const Vec k7 = velocity(f, y, floor);
  const Vec e =
      h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  return {y, e.cwiseAbs().maxCoeff()};
}

void record(ImmersionPath& p, const SmoothField& f, double tau, const Vec& x) {
  p.taus.push_back(tau);
  p.points.push_back(x);
  p.sigmas.push_back(1.0 / f.gradient(x).norm());
  p.u_of_F.push_back(f.value(x));
}

}  // namespace

ImmersionPath integrate_immersion(const SmoothField& field, const Vec& x0,
                                  double tau0, double tau1, double tol,
                                  const ImmersionOptions& opts) {
  if (x0.size() != field.dim()) throw DomainError("x0 has wrong dimension");
  if (!(tau1 > tau0)) throw DomainError("integrate_immersion needs tau1 > tau0");
  if (!(tol > 0.0)) throw DomainError("tol must be positive");
  if (!(opts.max_dtau > 0.0)) throw DomainError("max_dtau must be positive");
  if (!field.contains(x0)) throw DomainError("x0 outside the field domain");
  if (std::abs(field.value(x0) - tau0) > tol)
    throw DomainError("x0 does not lie on the tau0 level set");

  ImmersionPath path;
  {
    const double g = field.gradient(x0).norm();
    if (!(g > opts.grad_floor)) {
      path.status = PathStatus::Degenerate;
      return path;
    }
  }
  record(path, field, tau0, x0);

  const auto samples = static_cast<long>(
      std::ceil((tau1 - tau0) / opts.max_dtau - 1e-9));
  const double dtau = (tau1 - tau0) / static_cast<double>(samples);
  const double h_min = 1e-13 * (tau1 - tau0);

  Vec x = x0;
  double tau = tau0;
  double h = dtau;
  int steps = 0;
  for (long k = 1; k <= samples; ++k) {
    const double target = k == samples ? tau1 : tau0 + k * dtau;
    while (tau < target) {
      if (++steps > opts.max_steps) {
        path.status = PathStatus::Truncated;
        return path;
      }
      const double step = std::min(h, target - tau);
      StepResult r;
      try {
        r = dp_step(field, x, step, opts.grad_floor);
      } catch (const OutOfDomain&) {
        h = 0.5 * step;
        if (h < h_min) {
          path.status = PathStatus::Truncated;
          return path;
        }
        continue;
      } catch (const Degenerate&) {
        h = 0.5 * step;
        if (h < h_min) {
          path.status = PathStatus::Degenerate;
          return path;
        }
        continue;
      }
      if (r.err <= tol || step <= h_min) {
        x = r.x;
        tau = (step == target - tau) ? target : tau + step;
      }
      const double fac =
          r.err > 0.0 ? 0.9 * std::pow(tol / r.err, 0.2) : 5.0;
      h = std::clamp(fac, 0.2, 5.0) * step;
      h = std::min(h, dtau);
    }
    record(path, field, tau, x);
  }
  return path;
}

ImmersionPath integrate_immersion(const ScalarField& field, const Vec& x0,
                                  double tau0, double tau1, double tol,
                                  const ImmersionOptions& opts,
                                  const BandMask* mask) {
  const GridField gf(field, mask);
  return integrate_immersion(gf, x0, tau0, tau1, tol, opts);
}

std::vector<ImmersionPath> integrate_immersions(const SmoothField& field,
                                                std::span<const Vec> starts,
                                                double tau1, double tol,
                                                const ImmersionOptions& opts,
                                                unsigned jobs) {
  std::vector<ImmersionPath> out(starts.size());
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, starts.size())));
  std::vector<std::exception_ptr> errors(jobs);
  auto work = [&](unsigned w) {
    try {
      for (std::size_t i = w; i < starts.size(); i += jobs) {
        const double tau0 = field.value(starts[i]);
        out[i] = integrate_immersion(field, starts[i], tau0, tau1, tol, opts);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < jobs; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

Vec adjust_launch_point(const ScalarField& field, const BandMask& mask,
                        const Vec& x0) {
  const Grid& grid = field.grid();
  const int n = grid.dim();
  const double h = grid.spacing();
  // Nodes "well inside": in the mask with every axis neighbour in the mask.
  auto well_inside = [&](std::size_t i) {
    if (!mask.contains(i)) return false;
    const NodeIndex idx = grid.unravel(i);
    for (int a = 0; a < n; ++a)
      for (int s : {-1, 1}) {
        NodeIndex nb = idx;
        nb[static_cast<std::size_t>(a)] += s;
        if (!grid.contains(nb) || !mask.contains(grid.linear(nb))) return false;
      }
    return true;
  };
  // x0 is fine when every node of its cell is well inside.
  NodeIndex base{0, 0, 0};
  bool cell_ok = inside_box(grid, x0);
  for (int a = 0; a < n && cell_ok; ++a) {
    const double s = (x0[a] - grid.origin()[a]) / h;
    base[static_cast<std::size_t>(a)] =
        std::clamp(static_cast<int>(std::floor(s)), 0, grid.count(a) - 2);
  }
  if (cell_ok) {
    for (int corner = 0; corner < (1 << n) && cell_ok; ++corner) {
      NodeIndex c = base;
      for (int a = 0; a < n; ++a)
        c[static_cast<std::size_t>(a)] += (corner >> a) & 1;
      cell_ok = well_inside(grid.linear(c));
    }
  }
  if (cell_ok) return x0;
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = grid.size();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!well_inside(i)) continue;
    const double d = (grid.position(i) - x0).squaredNorm();
    if (d < best) {
      best = d;
      arg = i;
    }
  }
  if (arg == grid.size()) throw DomainError("band has no interior node");
  return grid.position(arg);
}

double level_preservation_error(const ImmersionPath& path,
                                const SmoothField& field) {
  double m = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k)
    m = std::max(m, std::abs(field.value(path.points[k]) - path.taus[k]));
  return m;
}

HmcfReport hmcf_residual(const ImmersionPath& path, const SmoothField& field,
                         double grad_floor) {
  if (path.size() < 3) throw DomainError("hmcf_residual needs >= 3 samples");
  HmcfReport rep;
  for (std::size_t k = 1; k + 1 < path.size(); ++k) {
    const double hm = path.taus[k] - path.taus[k - 1];
    const double hp = path.taus[k + 1] - path.taus[k];
    // Second-order three-point derivative on a possibly uneven stencil.
    const double dsig = -hp / (hm * (hm + hp)) * path.sigmas[k - 1] +
                        (hp - hm) / (hm * hp) * path.sigmas[k] +
                        hm / (hp * (hm + hp)) * path.sigmas[k + 1];
    try {
      const Vec& x = path.points[k];
      const CurvatureSample s = sample_from_derivatives(
          field.gradient(x), field.hessian(x), std::nullopt, grad_floor);
      const double sig = path.sigmas[k];
      const double r = dsig - sig * sig * (s.H - sig * s.lap);
      if (!std::isfinite(r)) {
        ++rep.excluded;
        continue;
      }
      rep.max_abs = std::max(rep.max_abs, std::abs(r));
      ++rep.evaluated;
    } catch (const DegenerateGradient&) {
      ++rep.excluded;
    }
  }
  return rep;
}

EnvelopeReport gradient_envelope(std::span<const double> grad_norms, int dim,
                                 double eps, double eta, double c0) {
  if (!(eps > 0.0) || !(eta >= 0.0))
    throw DomainError("envelope needs eps > 0 and eta >= 0");
  if (!(eps * eta < 0.5)) throw DomainError("envelope needs eps*eta < 1/2");
  if (grad_norms.empty()) throw DomainError("envelope: empty sample set");
  if (c0 <= 0.0) c0 = 10.0 * std::sqrt(static_cast<double>(dim));
  EnvelopeReport r;
  const double log_eps = std::log(eps);
  for (double g : grad_norms) {
    if (!(g > 0.0) || !std::isfinite(g)) continue;
    r.sup_dev_gradu = std::max(r.sup_dev_gradu, std::abs(g - 1.0 / eps));
    r.sup_dev_phi = std::max(r.sup_dev_phi, std::abs(-std::log(g) - log_eps));
    ++r.evaluated;
  }
  if (r.evaluated == 0) throw DomainError("envelope: no usable samples");
  r.bound_gradu = c0 * eta;
  r.bound_phi = c0 * eps * eta;
  r.pass = r.sup_dev_gradu <= r.bound_gradu && r.sup_dev_phi <= r.bound_phi;
  return r;
}

EnvelopeReport gradient_envelope_check(const ScalarField& field, double eps,
                                       double eta, const BandMask& mask,
                                       const EnvelopeOptions& opts) {
  const Grid& grid = field.grid();
  if (mask.inside.size() != grid.size())
    throw DomainError("mask does not match grid");
  if (mask.empty()) throw DomainError("gradient_envelope_check: empty mask");
  const bool ball = opts.radius > 0.0;
  const double rmax = opts.radius - opts.shrink * eps * eta;
  std::vector<double> norms;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!mask.contains(i)) continue;
    if (ball) {
      const Vec c = opts.center.size() == grid.dim() ? opts.center
                                                     : zero_vec(grid.dim());
      if ((grid.position(i) - c).norm() > rmax) continue;
    }
    norms.push_back(derivatives(field, grid.unravel(i), &mask).grad.norm());
  }
  return gradient_envelope(norms, grid.dim(), eps, eta, opts.c0);
}

void write_path_csv(const std::string& path, const ImmersionPath& p) {
  std::ofstream os(path);
  if (!os) throw DomainError("cannot open " + path);
  const int n = p.points.empty() ? 0 : static_cast<int>(p.points[0].size());
  os << "tau";
  for (int a = 0; a < n; ++a) os << ",x" << (a + 1);
  os << ",sigma,u_of_F\n";
  for (std::size_t k = 0; k < p.size(); ++k) {
    os << format_double(p.taus[k]);
    for (int a = 0; a < n; ++a) os << ',' << format_double(p.points[k][a]);
    os << ',' << format_double(p.sigmas[k]) << ','
       << format_double(p.u_of_F[k]) << '\n';
  }
}

}  // namespace fbac
