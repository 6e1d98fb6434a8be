#include "fbac/radial_solver.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "fbac/errors.hpp"
#include "fbac/field_io.hpp"
#include "fbac/holder.hpp"

namespace fbac {

std::string to_string(RadialStatus s) {
  return s == RadialStatus::Ok ? "ok" : "extinct";
}

namespace {

double shell_weight(int n) {
  switch (n) {
    case 1: return 1.0;
    case 2: return 2.0 * std::numbers::pi;
    default: return 4.0 * std::numbers::pi;
  }
}

// int_a^b r^(n-1) dr
double shell_measure(int n, double a, double b) {
  if (n == 1) return b - a;
  if (n == 2) return 0.5 * (b * b - a * a);
  return (b * b * b - a * a * a) / 3.0;
}

double dxi_left(const std::vector<double>& u, double h) {
  return (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
}

double dxi_right(const std::vector<double>& u, double h) {
  const std::size_t m = u.size() - 1;
  return (3.0 * u[m] - 4.0 * u[m - 1] + u[m - 2]) / (2.0 * h);
}

double dxixi_left(const std::vector<double>& u, double h) {
  return (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / (h * h);
}

double dxixi_right(const std::vector<double>& u, double h) {
  const std::size_t m = u.size() - 1;
  return (2.0 * u[m] - 5.0 * u[m - 1] + 4.0 * u[m - 2] - u[m - 3]) / (h * h);
}

// Tridiagonal solve; a: sub, b: diag, c: super. Overwrites d with x.
void thomas(std::vector<double>& a, std::vector<double>& b,
            std::vector<double>& c, std::vector<double>& d) {
  const std::size_t n = d.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  d[n - 1] /= b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

struct OpCoeffs {
  double a, b, c;
};

// Mapped operator D(u_rr + (n-1)/r u_r) + rdot u_r at interior node j.
OpCoeffs op_coeffs(int n, double D, double L, double r, double rdot,
                   double h) {
  const double diff = D / (h * h * L * L);
  double adv = rdot / L;
  if (n > 1) adv += D * (n - 1) / (r * L);
  const double conv = adv / (2.0 * h);
  return {diff - conv, -2.0 * diff, diff + conv};
}

// Implicit profile for candidate new boundary positions.
std::vector<double> solve_profile(const RadialState& s, double sm, double sp,
                                  double dt, const SchemeParams& p) {
  const int M = s.M();
  const double h = s.h_xi();
  const double L_old = s.width();
  const double L_new = sp - sm;
  const double dsm = sm - s.s_minus;
  const double dsp = sp - s.s_plus;
  const double th = p.theta;
  const std::size_t m = static_cast<std::size_t>(M - 2);
  std::vector<double> a(m), b(m), c(m), d(m);
  for (int j = 1; j <= M - 2; ++j) {
    const double xi = j * h;
    const double rdot = (dsm + xi * (dsp - dsm)) / dt;
    const OpCoeffs nw =
        op_coeffs(s.n, p.diffusion, L_new, sm + xi * L_new, rdot, h);
    const std::size_t k = static_cast<std::size_t>(j - 1);
    a[k] = -dt * th * nw.a;
    b[k] = 1.0 - dt * th * nw.b;
    c[k] = -dt * th * nw.c;
    double rhs = s.u[static_cast<std::size_t>(j)];
    if (th < 1.0) {
      const OpCoeffs od = op_coeffs(s.n, p.diffusion, L_old,
                                    s.s_minus + xi * L_old, rdot, h);
      rhs += dt * (1.0 - th) *
             (od.a * s.u[static_cast<std::size_t>(j - 1)] +
              od.b * s.u[static_cast<std::size_t>(j)] +
              od.c * s.u[static_cast<std::size_t>(j + 1)]);
    }
    d[k] = rhs;
  }
  // Dirichlet ends
  d[0] -= a[0] * -1.0;
  d[m - 1] -= c[m - 1] * 1.0;
  a[0] = 0.0;
  c[m - 1] = 0.0;
  thomas(a, b, c, d);
  std::vector<double> u(static_cast<std::size_t>(M));
  u.front() = -1.0;
  u.back() = 1.0;
  std::copy(d.begin(), d.end(), u.begin() + 1);
  return u;
}

std::pair<double, double> mismatch_of(const std::vector<double>& u, double L,
                                      double h, double eps) {
  const double ur_m = dxi_left(u, h) / L;
  const double ur_p = dxi_right(u, h) / L;
  return {eps * std::abs(ur_m) - 1.0, eps * std::abs(ur_p) - 1.0};
}

bool extinct(int n, double sm, double sp, double h) {
  return n > 1 && (sm <= 0.0 || sm < 2.0 * h * (sp - sm));
}

}  // namespace

RadialState init_from_sphere(double r0, int n, double eps, int M) {
  if (n < 1 || n > 3) throw DomainError("dimension must be 1, 2 or 3");
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  if (!(r0 > 2.0 * eps))
    throw DomainError("r0 must exceed 2 eps (interface self-intersects)");
  if (M < 64) throw DomainError("M must be at least 64");
  RadialState s;
  s.n = n;
  s.eps = eps;
  s.s_minus = r0 - eps;
  s.s_plus = r0 + eps;
  s.u.resize(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) s.u[static_cast<std::size_t>(j)] = -1.0 + 2.0 * j / (M - 1.0);
  s.u.front() = -1.0;
  s.u.back() = 1.0;
  return s;
}

std::pair<double, double> boundary_mismatch(const RadialState& s) {
  return mismatch_of(s.u, s.width(), s.h_xi(), s.eps);
}

RadialState step(const RadialState& s, const SchemeParams& p, StepInfo* info) {
  if (!(p.dt > 0.0)) throw DomainError("dt must be positive");
  if (!(p.mismatch_tol > 0.0)) throw DomainError("mismatch_tol must be positive");
  if (!(p.theta >= 0.5 && p.theta <= 1.0))
    throw DomainError("theta must lie in [1/2, 1]");
  if (!(p.lambda >= 0.0 && p.lambda <= 1.0))
    throw DomainError("lambda must lie in [0, 1]");
  const double h = s.h_xi();
  if (p.theta < 1.0 && p.dt > 0.5 * h * h)
    throw DomainError("dt exceeds 0.5 h_xi^2 for theta < 1");
  const double eps = s.eps;
  const double dt = p.dt;
  StepInfo local;
  StepInfo& inf = info ? *info : local;
  inf = StepInfo{};

  // Predictor
  const double L = s.width();
  double sdot[2];
  {
    const double ur[2] = {dxi_left(s.u, h) / L, dxi_right(s.u, h) / L};
    const double urr[2] = {dxixi_left(s.u, h) / (L * L),
                           dxixi_right(s.u, h) / (L * L)};
    const double r[2] = {s.s_minus, s.s_plus};
    const double sgn[2] = {1.0, -1.0};
    for (int k = 0; k < 2; ++k) {
      double ut = urr[k];
      if (s.n > 1) ut += (s.n - 1) / r[k] * ur[k];
      ut *= p.diffusion;
      const double vkin = -ut / ur[k];
      sdot[k] = vkin + sgn[k] * (p.lambda / dt) * eps * (1.0 - eps * std::abs(ur[k]));
    }
  }
  double x[2] = {s.s_minus + dt * sdot[0], s.s_plus + dt * sdot[1]};
  if (extinct(s.n, x[0], x[1], h)) {
    inf.status = RadialStatus::Extinct;
    return s;
  }

  // Corrector: Newton on the two Neumann conditions.
  auto residual = [&](double sm, double sp, std::vector<double>* out) {
    std::vector<double> u = solve_profile(s, sm, sp, dt, p);
    const auto m = mismatch_of(u, sp - sm, h, eps);
    if (out) *out = std::move(u);
    return m;
  };
  std::vector<double> u_new;
  auto m = residual(x[0], x[1], &u_new);
  int it = 0;
  while (it < p.max_corrector &&
         std::max(std::abs(m.first), std::abs(m.second)) > p.newton_tol) {
    ++it;
    const double d = 1e-7 * (x[1] - x[0]);
    const auto m0 = residual(x[0] + d, x[1], nullptr);
    const auto m1 = residual(x[0], x[1] + d, nullptr);
    const double J00 = (m0.first - m.first) / d, J10 = (m0.second - m.second) / d;
    const double J01 = (m1.first - m.first) / d, J11 = (m1.second - m.second) / d;
    const double det = J00 * J11 - J01 * J10;
    if (!(std::abs(det) > 0.0) || !std::isfinite(det)) break;
    double dx0 = (J11 * m.first - J01 * m.second) / det;
    double dx1 = (-J10 * m.first + J00 * m.second) / det;
    // Keep the band width positive.
    const double w = x[1] - x[0];
    double scale = 1.0;
    while ((x[1] - dx1) - (x[0] - dx0) < 0.25 * w && scale > 1e-3) {
      scale *= 0.5;
      dx0 *= 0.5;
      dx1 *= 0.5;
    }
    x[0] -= dx0;
    x[1] -= dx1;
    if (extinct(s.n, x[0], x[1], h)) {
      inf.status = RadialStatus::Extinct;
      inf.iterations = it;
      return s;
    }
    m = residual(x[0], x[1], &u_new);
  }
  inf.iterations = it;
  inf.mismatch_minus = m.first;
  inf.mismatch_plus = m.second;
  inf.sdot_minus = (x[0] - s.s_minus) / dt;
  inf.sdot_plus = (x[1] - s.s_plus) / dt;
  const double worst = std::max(std::abs(m.first), std::abs(m.second));
  if (!(worst <= p.mismatch_tol))
    throw StepRejected("boundary mismatch above tolerance after corrector",
                       worst);

  RadialState out = s;
  out.t = s.t + dt;
  out.s_minus = x[0];
  out.s_plus = x[1];
  out.u = std::move(u_new);
  return out;
}

double radial_energy(const RadialState& s) {
  const double h = s.h_xi();
  const double L = s.width();
  const int M = s.M();
  double grad = 0.0;
  for (int j = 0; j + 1 < M; ++j) {
    const double g = (s.u[static_cast<std::size_t>(j + 1)] -
                      s.u[static_cast<std::size_t>(j)]) / (h * L);
    grad += g * g * shell_measure(s.n, s.radius(j), s.radius(j + 1));
  }
  const double vol = shell_measure(s.n, s.s_minus, s.s_plus);
  return shell_weight(s.n) * (s.eps * grad + vol / s.eps);
}

RadialDerivatives radial_derivatives(const RadialState& s) {
  const int M = s.M();
  const double h = s.h_xi();
  const double L = s.width();
  RadialDerivatives d;
  d.r.resize(static_cast<std::size_t>(M));
  d.ur.resize(static_cast<std::size_t>(M));
  d.urr.resize(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) {
    const auto k = static_cast<std::size_t>(j);
    d.r[k] = s.radius(j);
    double ux, uxx;
    if (j == 0) {
      ux = dxi_left(s.u, h);
      uxx = dxixi_left(s.u, h);
    } else if (j == M - 1) {
      ux = dxi_right(s.u, h);
      uxx = dxixi_right(s.u, h);
    } else {
      ux = (s.u[k + 1] - s.u[k - 1]) / (2.0 * h);
      uxx = (s.u[k + 1] - 2.0 * s.u[k] + s.u[k - 1]) / (h * h);
    }
    d.ur[k] = ux / L;
    d.urr[k] = uxx / (L * L);
  }
  return d;
}

ProfileDiagnostics diagnose_profile(const RadialState& s, double alpha,
                                    double diffusion, std::uint64_t holder_seed) {
  const RadialDerivatives d = radial_derivatives(s);
  const std::size_t M = d.r.size();
  ProfileDiagnostics out;
  out.t = s.t;
  out.s_minus = s.s_minus;
  out.s_plus = s.s_plus;
  std::vector<double> dnu_phi(M);
  const double log_eps = std::log(s.eps);
  for (std::size_t k = 0; k < M; ++k) {
    const double ur = d.ur[k];
    const double r = d.r[k];
    dnu_phi[k] = -d.urr[k] / ur;
    out.sup_grad_phi = std::max(out.sup_grad_phi, std::abs(dnu_phi[k]));
    double ut = d.urr[k];
    if (s.n > 1) ut += (s.n - 1) / r * ur;
    ut *= diffusion;
    out.sup_v = std::max(out.sup_v, std::abs(ut / ur));
    if (s.n > 1) out.sup_A = std::max(out.sup_A, std::sqrt(s.n - 1.0) / std::abs(r));
    const double g = std::abs(ur);
    out.sup_dev_gradu = std::max(out.sup_dev_gradu, std::abs(g - 1.0 / s.eps));
    out.sup_dev_phi = std::max(out.sup_dev_phi, std::abs(-std::log(g) - log_eps));
  }
  out.eta = std::max(out.sup_A, out.sup_v);
  HolderOptions hopts;
  hopts.seed = holder_seed;
  out.holder_grad_phi = holder_seminorm_1d(d.r, dnu_phi, alpha, hopts);
  out.holder_dnu_phi = out.sup_grad_phi + out.holder_grad_phi;
  const auto mm = boundary_mismatch(s);
  out.mismatch_minus = mm.first;
  out.mismatch_plus = mm.second;
  out.energy = radial_energy(s);
  return out;
}

RadialRun run(const RadialRunConfig& cfg) {
  if (!(cfg.T >= 0.0)) throw DomainError("T must be non-negative");
  const double dt = cfg.scheme.dt;
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  RadialRun out;
  RadialState s = init_from_sphere(cfg.r0, cfg.n, cfg.eps, cfg.M);
  const long nsteps = static_cast<long>(std::ceil(cfg.T / dt - 1e-9));
  const long every = cfg.sample_every > 0
                         ? cfg.sample_every
                         : std::max(1L, static_cast<long>(std::floor(cfg.T / (100.0 * dt))));
  const double t_ext = cfg.n > 1 ? cfg.r0 * cfg.r0 / (2.0 * (cfg.n - 1)) : INFINITY;
  auto ref_radius = [&](double t) {
    return cfg.n > 1 ? std::sqrt(cfg.r0 * cfg.r0 - 2.0 * (cfg.n - 1) * t) : cfg.r0;
  };
  auto track = [&](const RadialState& st) {
    if (st.t < t_ext)
      out.radius_err_max = std::max(out.radius_err_max,
                                    std::abs(st.radius_mid() - ref_radius(st.t)));
  };
  auto take_sample = [&](const RadialState& st) {
    out.samples.push_back(diagnose_profile(st, cfg.alpha, cfg.scheme.diffusion, cfg.holder_seed));
    out.eta = std::max(out.eta, out.samples.back().eta);
  };

  take_sample(s);
  track(s);
  out.energy.push_back(radial_energy(s));
  out.times.push_back(s.t);
  if (cfg.snapshot_every > 0 || cfg.record_states) out.snapshots.push_back(s);

  SchemeParams p = cfg.scheme;
  for (long k = 1; k <= nsteps; ++k) {
    p.dt = std::min(dt, cfg.T - s.t);
    if (p.dt <= 1e-14 * dt) break;
    StepInfo info;
    RadialState next;
    try {
      next = step(s, p, &info);
    } catch (const StepRejected& e) {
      out.failure = std::string(e.what()) + " (measured " +
                    format_double(e.measured()) + ")";
      break;
    }
    if (info.status == RadialStatus::Extinct) {
      out.status = RadialStatus::Extinct;
      break;
    }
    s = std::move(next);
    if (k == nsteps) s.t = cfg.T;
    ++out.steps;
    out.max_mismatch = std::max({out.max_mismatch, std::abs(info.mismatch_minus),
                                 std::abs(info.mismatch_plus)});
    const double J = radial_energy(s);
    out.max_energy_increase = std::max(out.max_energy_increase, J - out.energy.back());
    out.energy.push_back(J);
    out.times.push_back(s.t);
    track(s);
    if (k % every == 0 || k == nsteps) take_sample(s);
    if (cfg.record_states ||
        (cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0))
      out.snapshots.push_back(s);
  }
  out.final_state = s;
  out.regime_warning = cfg.eps * out.eta >= 0.1;
  return out;
}

std::vector<std::string> write_radial_outputs(const RadialRun& r,
                                              const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> files;
  const auto open = [&](const std::string& name) {
    const std::string path = (fs::path(dir) / name).string();
    std::ofstream os(path);
    if (!os) throw DomainError("cannot open " + path);
    files.push_back(path);
    return os;
  };
  {
    std::ofstream os = open("trajectory.csv");
    os << "t,s_minus,s_plus,mismatch_minus,mismatch_plus,sup_grad_phi,"
          "holder_grad_phi,radius_mid\n";
    for (const auto& d : r.samples) {
      os << format_double(d.t) << ',' << format_double(d.s_minus) << ','
         << format_double(d.s_plus) << ',' << format_double(d.mismatch_minus) << ','
         << format_double(d.mismatch_plus) << ',' << format_double(d.sup_grad_phi)
         << ',' << format_double(d.holder_grad_phi) << ','
         << format_double(0.5 * (d.s_minus + d.s_plus)) << '\n';
    }
  }
  {
    std::ofstream os = open("diagnostics.csv");
    os << "t,eta,sup_A,sup_v,holder_dnu_phi,sup_dev_gradu,sup_dev_phi,energy\n";
    for (const auto& d : r.samples)
      os << format_double(d.t) << ',' << format_double(d.eta) << ','
         << format_double(d.sup_A) << ',' << format_double(d.sup_v) << ','
         << format_double(d.holder_dnu_phi) << ',' << format_double(d.sup_dev_gradu)
         << ',' << format_double(d.sup_dev_phi) << ',' << format_double(d.energy)
         << '\n';
  }
  {
    std::ofstream os = open("energy.csv");
    os << "t,energy\n";
    for (std::size_t k = 0; k < r.energy.size(); ++k)
      os << format_double(r.times[k]) << ',' << format_double(r.energy[k]) << '\n';
  }
  for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
    const RadialState& s = r.snapshots[k];
    Vec o(1);
    o[0] = s.s_minus;
    const Grid g(1, o, s.h_xi() * s.width(), {s.M()});
    const std::string path =
        (fs::path(dir) / ("profile_" + std::to_string(k) + ".csv")).string();
    write_field_csv(path, ScalarField(g, s.u, s.t), "u", false);
    files.push_back(path);
  }
  return files;
}

ScalarField radial_to_grid(const RadialState& s, const Grid& grid,
                           double diffusion) {
  if (grid.dim() != s.n) throw DomainError("grid dimension differs from n");
  const RadialDerivatives d = radial_derivatives(s);
  const double h = s.h_xi();
  const double L = s.width();
  const int M = s.M();
  std::vector<double> ut_nodes(static_cast<std::size_t>(M));
  for (std::size_t k = 0; k < ut_nodes.size(); ++k) {
    double ut = d.urr[k];
    if (s.n > 1) ut += (s.n - 1) / d.r[k] * d.ur[k];
    ut_nodes[k] = diffusion * ut;
  }
  std::vector<double> u(grid.size()), ut(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec x = grid.position(i);
    const double r = s.n == 1 ? x[0] : x.norm();
    if (r <= s.s_minus) {
      u[i] = -1.0;
      ut[i] = 0.0;
      continue;
    }
    if (r >= s.s_plus) {
      u[i] = 1.0;
      ut[i] = 0.0;
      continue;
    }
    const double q = (r - s.s_minus) / (h * L);
    const int j = std::clamp(static_cast<int>(std::floor(q)), 0, M - 2);
    const double w = q - j;
    const auto k = static_cast<std::size_t>(j);
    // Cubic Hermite on the cell [r_j, r_j+1].
    const double dr = h * L;
    const double w2 = w * w, w3 = w2 * w;
    const double h00 = 2 * w3 - 3 * w2 + 1, h10 = w3 - 2 * w2 + w;
    const double h01 = -2 * w3 + 3 * w2, h11 = w3 - w2;
    u[i] = h00 * s.u[k] + h10 * dr * d.ur[k] + h01 * s.u[k + 1] +
           h11 * dr * d.ur[k + 1];
    ut[i] = (1.0 - w) * ut_nodes[k] + w * ut_nodes[k + 1];
  }
  return ScalarField(grid, std::move(u), s.t, std::move(ut));
}

}  // namespace fbac
