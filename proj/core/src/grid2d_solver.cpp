#include "fbac/grid2d_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "fbac/errors.hpp"
#include "fbac/redistance.hpp"

namespace fbac {

std::string to_string(Grid2DStatus s) {
  return s == Grid2DStatus::Ok ? "ok" : "topology_change";
}

Curve Curve::circle(double r0, double cx, double cy) {
  Curve c;
  c.kind = Kind::Circle;
  c.a = c.b = r0;
  c.cx = cx;
  c.cy = cy;
  return c;
}

Curve Curve::ellipse(double a, double b, double cx, double cy) {
  Curve c;
  c.kind = Kind::Ellipse;
  c.a = a;
  c.b = b;
  c.cx = cx;
  c.cy = cy;
  return c;
}

Curve Curve::line(double offset) {
  Curve c;
  c.kind = Kind::Line;
  c.offset = offset;
  return c;
}

double Curve::min_curvature_radius() const {
  switch (kind) {
    case Kind::Circle: return a;
    case Kind::Ellipse: {
      const double lo = std::min(a, b), hi = std::max(a, b);
      return lo * lo / hi;
    }
    case Kind::Line: return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

double Curve::signed_distance(double x, double y) const {
  if (kind == Kind::Line) return x - offset;
  const double px = x - cx, py = y - cy;
  if (kind == Kind::Circle || a == b) return std::hypot(px, py) - a;
  // Closest point (a cos s, b sin s): coarse scan, then Newton on
  // g(s) = (P - E(s)) . E'(s) = 0.
  auto g = [&](double s) {
    const double c = std::cos(s), sn = std::sin(s);
    return (px - a * c) * (-a * sn) + (py - b * sn) * (b * c);
  };
  auto dg = [&](double s) {
    const double c = std::cos(s), sn = std::sin(s);
    return (a * a - b * b) * (c * c - sn * sn) - px * a * c - py * b * sn;
  };
  double best_s = 0.0, best_d = std::numeric_limits<double>::infinity();
  constexpr int kScan = 64;
  for (int k = 0; k < kScan; ++k) {
    const double s = 2.0 * M_PI * k / kScan;
    const double d = std::hypot(px - a * std::cos(s), py - b * std::sin(s));
    if (d < best_d) {
      best_d = d;
      best_s = s;
    }
  }
  double s = best_s;
  for (int it = 0; it < 50; ++it) {
    const double d2 = dg(s);
    if (d2 == 0.0) break;
    const double ds = g(s) / d2;
    s -= std::clamp(ds, -0.2, 0.2);
    if (std::abs(ds) < 1e-15) break;
  }
  const double dist = std::hypot(px - a * std::cos(s), py - b * std::sin(s));
  const double q = (px * px) / (a * a) + (py * py) / (b * b);
  return q < 1.0 ? -dist : dist;
}

namespace {

ScalarField field_from(const Grid& g, std::vector<double> v, double t) {
  return ScalarField(g, std::move(v), t);
}

// Mirror-aware neighbour value along an axis (Neumann at box edges).
double neighbour(const Grid& g, std::span<const double> v, NodeIndex idx,
                 int axis, int side) {
  NodeIndex nb = idx;
  nb[static_cast<std::size_t>(axis)] += side;
  if (!g.contains(nb)) nb[static_cast<std::size_t>(axis)] -= 2 * side;
  return v[g.linear(nb)];
}

Vec clamp_to_box(const Grid& g, Vec x) {
  const Vec hi = g.upper();
  for (int a = 0; a < g.dim(); ++a) x[a] = std::clamp(x[a], g.origin()[a], hi[a]);
  return x;
}

struct SpeedResult {
  std::vector<double> psi;  // advected
  double max_mismatch = 0.0;
};

// side = +1: inner boundary (u = -1, band along +grad psi);
// side = -1: outer boundary (u = +1, band along -grad psi).
// Five-point Laplacian at band nodes whose axis neighbours are all in the
// band (mirrored at box edges); NaN elsewhere.
std::vector<double> band_laplacian(const Grid& g, std::span<const double> u,
                                   std::span<const double> pm,
                                   std::span<const double> pp) {
  const double h = g.spacing();
  std::vector<double> lap(g.size(), std::numeric_limits<double>::quiet_NaN());
  auto in_band = [&](std::size_t j) { return pm[j] > 0.0 && pp[j] < 0.0; };
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!in_band(i)) continue;
    const NodeIndex idx = g.unravel(i);
    double acc = 0.0;
    bool ok = true;
    for (int a = 0; a < 2 && ok; ++a)
      for (int sd : {-1, 1}) {
        NodeIndex nb = idx;
        nb[static_cast<std::size_t>(a)] += sd;
        if (!g.contains(nb)) nb[static_cast<std::size_t>(a)] -= 2 * sd;
        const std::size_t j = g.linear(nb);
        if (!in_band(j)) {
          ok = false;
          break;
        }
        acc += u[j] - u[i];
      }
    if (ok) lap[i] = acc / (h * h);
  }
  return lap;
}

SpeedResult advect(const Grid& g, std::span<const double> u,
                   std::span<const double> lapu,
                   std::span<const double> psi, int side, double eps,
                   const Grid2DParams& p) {
  const double h = g.spacing();
  const double dt = p.scheme.dt;
  const double D = p.scheme.diffusion;
  const double b = side > 0 ? -1.0 : 1.0;
  SpeedResult out;
  out.psi.assign(psi.begin(), psi.end());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double ps = psi[i];
    if (!(std::abs(ps) < 3.0 * h)) continue;
    const NodeIndex idx = g.unravel(i);
    Vec n(2);
    double lap = 0.0;
    for (int a = 0; a < 2; ++a) {
      const double m = neighbour(g, psi, idx, a, -1);
      const double q = neighbour(g, psi, idx, a, +1);
      n[a] = (q - m) / (2.0 * h);
      lap += (q - 2.0 * ps + m) / (h * h);
    }
    const double gn = n.norm();
    if (!(gn > 1e-12)) continue;
    n /= gn;
    const double kp = lap;
    const double denom = 1.0 - ps * kp;
    const double kappa = std::abs(denom) > 1e-6 ? kp / denom : kp;
    const Vec xg = g.position(i) - ps * n;
    const Vec dir = static_cast<double>(side) * n;
    const double u1 = interpolate(g, u, clamp_to_box(g, xg + 2.0 * h * dir));
    const double u2 = interpolate(g, u, clamp_to_box(g, xg + 4.0 * h * dir));
    const double du = (-3.0 * b + 4.0 * u1 - u2) / (4.0 * h);
    const double d2 = (b - 2.0 * u1 + u2) / (4.0 * h * h);
    const double u_nu = side * du;
    if (!(u_nu > 1e-12)) continue;
    // ut at the boundary: Laplacian extrapolated from 3h and 5h inside;
    // the normal-curvature form is the fallback near thin spots.
    double ut = D * (d2 + kappa * u_nu);
    const double l3 = interpolate(g, lapu, clamp_to_box(g, xg + 3.0 * h * dir));
    const double l5 = interpolate(g, lapu, clamp_to_box(g, xg + 5.0 * h * dir));
    if (std::isfinite(l3) && std::isfinite(l5)) ut = D * 0.5 * (5.0 * l3 - 3.0 * l5);
    const double mism = 1.0 - eps * u_nu;
    const double V = -ut / u_nu + side * (p.scheme.lambda / dt) * eps * mism;
    out.psi[i] = ps - dt * V;
    if (std::abs(ps) < h) out.max_mismatch = std::max(out.max_mismatch, std::abs(mism));
  }
  return out;
}

struct Side {
  long long index = -1;  // unknown node, or -1 for a Dirichlet value
  double value = 0.0;
  double theta = 1.0;
};

}  // namespace

Grid2DState init_from_curve(const Curve& curve, double eps, const Grid& grid) {
  if (grid.dim() != 2) throw DomainError("init_from_curve needs a 2D grid");
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  if (curve.kind != Curve::Kind::Line && !(curve.a > 0.0 && curve.b > 0.0))
    throw DomainError("curve axes must be positive");
  if (!(curve.min_curvature_radius() > 2.0 * eps))
    throw DomainError("curvature radius must exceed 2 eps");
  const double h = grid.spacing();
  if (2.0 * eps / h < 8.0 - 1e-9)
    throw DomainError("band under-resolved: need h <= " +
                      std::to_string(2.0 * eps / 8.0));
  std::vector<double> u(grid.size()), pm(grid.size()), pp(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec x = grid.position(i);
    const double d = curve.signed_distance(x[0], x[1]);
    u[i] = std::clamp(d / eps, -1.0, 1.0);
    pm[i] = d + eps;
    pp[i] = d - eps;
  }
  Grid2DState s{field_from(grid, std::move(u), 0.0),
                field_from(grid, std::move(pm), 0.0),
                field_from(grid, std::move(pp), 0.0), eps, 0.0, 0};
  return s;
}

BandMask band_of(const Grid2DState& s) {
  BandMask m;
  const std::size_t n = s.u.grid().size();
  m.inside.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    m.inside[i] = s.psi_minus[i] > 0.0 && s.psi_plus[i] < 0.0;
  return m;
}

Grid2DState step(const Grid2DState& s, const Grid2DParams& p,
                 Grid2DStepInfo* info) {
  const Grid& g = s.u.grid();
  const double h = g.spacing();
  const double dt = p.scheme.dt;
  const double eps = s.eps;
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (p.scheme.theta < 1.0 && dt > 0.25 * h * h)
    throw DomainError("dt exceeds 0.25 h^2 for theta < 1");
  Grid2DStepInfo local;
  Grid2DStepInfo& inf = info ? *info : local;
  inf = Grid2DStepInfo{};

  const std::vector<double> lapu = band_laplacian(
      g, s.u.values(), s.psi_minus.values(), s.psi_plus.values());
  const SpeedResult inner =
      advect(g, s.u.values(), lapu, s.psi_minus.values(), +1, eps, p);
  const SpeedResult outer =
      advect(g, s.u.values(), lapu, s.psi_plus.values(), -1, eps, p);
  inf.max_mismatch = std::max(inner.max_mismatch, outer.max_mismatch);
  if (inf.max_mismatch > p.scheme.mismatch_tol)
    throw StepRejected("boundary mismatch above tolerance", inf.max_mismatch);
  std::vector<double> pm = inner.psi, pp = outer.psi;

  // Band update.
  const std::size_t N = g.size();
  std::vector<double> u(s.u.values().begin(), s.u.values().end());
  std::vector<char> band(N, 0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < N; ++i) {
    if (pm[i] <= 0.0 && pp[i] >= 0.0) {
      inf.status = Grid2DStatus::Topology;
      return s;
    }
    const bool in = pm[i] > 0.0 && pp[i] < 0.0;
    const bool was = s.psi_minus[i] > 0.0 && s.psi_plus[i] < 0.0;
    band[i] = in;
    if (in) {
      ++count;
      if (!was) u[i] = pm[i] < -pp[i] ? -1.0 + pm[i] / eps : 1.0 + pp[i] / eps;
      u[i] = std::clamp(u[i], -1.0, 1.0);
    } else {
      u[i] = pm[i] <= 0.0 ? -1.0 : 1.0;
    }
  }
  if (count == 0) {
    inf.status = Grid2DStatus::Topology;
    return s;
  }

  // Band nodes within kSnap h of a boundary take the boundary profile
  // directly; clamping their Shortley-Weller distance would shift the wall.
  constexpr double kSnap = 1e-2;
  std::vector<char> fixed(N, 0);
  for (std::size_t i = 0; i < N; ++i) {
    if (!band[i]) continue;
    if (pm[i] < kSnap * h) {
      fixed[i] = 1;
      u[i] = -1.0 + pm[i] / eps;
    } else if (-pp[i] < kSnap * h) {
      fixed[i] = 1;
      u[i] = 1.0 + pp[i] / eps;
    }
  }

  // Stencils with Shortley-Weller boundary distances.
  struct Row {
    std::size_t i;
    std::array<Side, 4> sides;  // axis 0 (-,+), axis 1 (-,+)
  };
  std::vector<Row> rows;
  rows.reserve(count);
  for (std::size_t i = 0; i < N; ++i) {
    if (!band[i] || fixed[i]) continue;
    Row row{i, {}};
    const NodeIndex idx = g.unravel(i);
    for (int a = 0; a < 2; ++a) {
      std::array<bool, 2> mirror{false, false};
      for (int k = 0; k < 2; ++k) {
        const int sd = k == 0 ? -1 : 1;
        NodeIndex nb = idx;
        nb[static_cast<std::size_t>(a)] += sd;
        Side& side = row.sides[static_cast<std::size_t>(2 * a + k)];
        if (!g.contains(nb)) {
          mirror[static_cast<std::size_t>(k)] = true;
          continue;
        }
        const std::size_t j = g.linear(nb);
        if (fixed[j]) {
          side.value = u[j];
          continue;
        }
        if (band[j]) {
          side.index = static_cast<long long>(j);
          continue;
        }
        double th = 1.0, val = 0.0;
        if (pm[j] <= 0.0) {
          th = pm[i] / (pm[i] - pm[j]);
          val = -1.0;
        }
        if (pp[j] >= 0.0) {
          const double t2 = pp[i] / (pp[i] - pp[j]);
          if (t2 < th || pm[j] > 0.0) {
            th = t2;
            val = 1.0;
          }
        }
        side.theta = std::clamp(th, 0.01, 1.0);
        side.value = val;
      }
      for (int k = 0; k < 2; ++k)
        if (mirror[static_cast<std::size_t>(k)])
          row.sides[static_cast<std::size_t>(2 * a + k)] =
              row.sides[static_cast<std::size_t>(2 * a + 1 - k)];
    }
    rows.push_back(row);
  }

  const double D = p.scheme.diffusion;
  const double th = p.scheme.theta;
  auto coeffs = [&](const Row& r, std::array<double, 4>& c) {
    for (int a = 0; a < 2; ++a) {
      const double hl = r.sides[static_cast<std::size_t>(2 * a)].theta * h;
      const double hr = r.sides[static_cast<std::size_t>(2 * a + 1)].theta * h;
      c[static_cast<std::size_t>(2 * a)] = 2.0 / ((hl + hr) * hl);
      c[static_cast<std::size_t>(2 * a + 1)] = 2.0 / ((hl + hr) * hr);
    }
  };
  auto side_value = [&](const Side& sd, const std::vector<double>& v) {
    return sd.index >= 0 ? v[static_cast<std::size_t>(sd.index)] : sd.value;
  };
  std::vector<double> rhs(rows.size()), diag(rows.size());
  std::vector<std::array<double, 4>> cs(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    coeffs(rows[k], cs[k]);
    double sum = 0.0, lap = 0.0;
    for (std::size_t q = 0; q < 4; ++q) {
      sum += cs[k][q];
      lap += cs[k][q] * (side_value(rows[k].sides[q], u) - u[rows[k].i]);
    }
    diag[k] = 1.0 + dt * D * th * sum;
    rhs[k] = u[rows[k].i] + dt * D * (1.0 - th) * lap;
  }
  std::vector<double> unew = u;
  int sweep = 0;
  for (; sweep < p.max_sweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      double acc = rhs[k];
      for (std::size_t q = 0; q < 4; ++q)
        acc += dt * D * th * cs[k][q] * side_value(rows[k].sides[q], unew);
      const double gs = acc / diag[k];
      const std::size_t i = rows[k].i;
      const double next = unew[i] + p.omega * (gs - unew[i]);
      change = std::max(change, std::abs(next - unew[i]));
      unew[i] = next;
    }
    if (change < p.solve_tol) break;
  }
  inf.sweeps = sweep + 1;
  for (const Row& r : rows) unew[r.i] = std::clamp(unew[r.i], -1.0, 1.0);

  const double t = s.t + dt;
  const long steps = s.steps + 1;
  if (p.redistance_every > 0 && steps % p.redistance_every == 0) {
    const double cutoff = 2.0 * eps + 8.0 * h;
    pm = redistance(g, pm, cutoff, 4.0 * h);
    pp = redistance(g, pp, cutoff, 4.0 * h);
  }
  return Grid2DState{ScalarField(g, std::move(unew), t),
                     ScalarField(g, std::move(pm), t),
                     ScalarField(g, std::move(pp), t), eps, t, steps};
}

std::vector<Polyline> extract_level_curve(const Grid2DState& s, double level) {
  if (!(level > -1.0 && level < 1.0)) return {};
  return extract_contours(s.u.grid(), s.u.values(), level);
}

Grid2DRun run(const Grid2DRunConfig& cfg) {
  const double w = cfg.half_width;
  Vec lo(2), hi(2);
  lo << cfg.curve.cx - w, cfg.curve.cy - w;
  hi << cfg.curve.cx + w, cfg.curve.cy + w;
  const Grid grid = Grid::box(lo, hi, cfg.h);
  Grid2DRun out;
  Grid2DState s = init_from_curve(cfg.curve, cfg.eps, grid);
  const double dt = cfg.params.scheme.dt;
  const long nsteps = static_cast<long>(std::ceil(cfg.T / dt - 1e-9));
  const long every = cfg.sample_every > 0
                         ? cfg.sample_every
                         : std::max(1L, static_cast<long>(std::floor(cfg.T / (100.0 * dt))));
  auto sample = [&](const Grid2DState& st, double mism) {
    const auto curves = extract_level_curve(st, 0.0);
    out.samples.push_back({st.t, enclosed_area(curves), total_length(curves), mism});
  };
  sample(s, 0.0);
  Grid2DParams p = cfg.params;
  for (long k = 1; k <= nsteps; ++k) {
    p.scheme.dt = std::min(dt, cfg.T - s.t);
    if (p.scheme.dt <= 1e-14 * dt) break;
    Grid2DStepInfo inf;
    try {
      Grid2DState next = step(s, p, &inf);
      if (inf.status != Grid2DStatus::Ok) {
        out.status = inf.status;
        break;
      }
      s = std::move(next);
    } catch (const StepRejected& e) {
      out.failure = e.what();
      break;
    }
    if (k % every == 0 || k == nsteps) sample(s, inf.max_mismatch);
  }
  out.final_state = s;
  if (out.samples.size() >= 2) {
    double st = 0, sa = 0, stt = 0, sta = 0;
    const double n = static_cast<double>(out.samples.size());
    for (const auto& q : out.samples) {
      st += q.t;
      sa += q.area;
      stt += q.t * q.t;
      sta += q.t * q.area;
    }
    const double var = stt - st * st / n;
    if (var > 0.0) out.area_rate = (sta - st * sa / n) / var;
  }
  return out;
}

}  // namespace fbac
