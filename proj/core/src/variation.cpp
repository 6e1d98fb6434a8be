#include "fbac/variation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fbac/band_quadrature.hpp"
#include "fbac/errors.hpp"

namespace fbac {

namespace {

double beta(double s) {
  if (!(s < 1.0)) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

// d beta / ds
double dbeta(double s) {
  if (!(s < 1.0)) return 0.0;
  const double q = 1.0 - s * s;
  return beta(s) * (-2.0 * s / (q * q));
}

}  // namespace

Mat DeformationField::jacobian(const Vec& x, double h) const {
  if (grad_U) return grad_U(x);
  const int n = static_cast<int>(x.size());
  Mat J(n, n);
  for (int j = 0; j < n; ++j) {
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Vec d = (U(xp) - U(xm)) / (2.0 * h);
    for (int i = 0; i < n; ++i) J(i, j) = d[i];
  }
  return J;
}

DeformationField DeformationField::bump(const Vec& center, double radius,
                                        const Vec& amplitude) {
  if (!(radius > 0.0)) throw DomainError("bump radius must be positive");
  DeformationField f;
  f.U = [=](const Vec& x) {
    return Vec(amplitude * beta((x - center).norm() / radius));
  };
  f.grad_U = [=](const Vec& x) {
    const Vec d = x - center;
    const double r = d.norm();
    const int n = static_cast<int>(x.size());
    if (r == 0.0 || !(r < radius)) return zero_mat(n);
    const Vec gb = dbeta(r / radius) / radius * d / r;
    return Mat(amplitude * gb.transpose());
  };
  return f;
}

DeformationField DeformationField::swirl(const Vec& center, double radius,
                                         double amplitude) {
  if (center.size() != 2) throw DomainError("swirl is two-dimensional");
  DeformationField f;
  f.U = [=](const Vec& x) {
    const Vec d = x - center;
    const double b = amplitude * beta(d.norm() / radius);
    Vec out(2);
    out << -b * d[1], b * d[0];
    return out;
  };
  f.grad_U = [=](const Vec& x) {
    const Vec d = x - center;
    const double r = d.norm();
    const double b = amplitude * beta(r / radius);
    Vec gb = zero_vec(2);
    if (r > 0.0 && r < radius) gb = amplitude * dbeta(r / radius) / radius * d / r;
    Mat J(2, 2);
    J(0, 0) = -d[1] * gb[0];
    J(0, 1) = -d[1] * gb[1] - b;
    J(1, 0) = d[0] * gb[0] + b;
    J(1, 1) = d[0] * gb[1];
    return J;
  };
  return f;
}

DeformationField DeformationField::zero(int dim) {
  DeformationField f;
  f.U = [dim](const Vec&) { return zero_vec(dim); };
  f.grad_U = [dim](const Vec&) { return zero_mat(dim); };
  return f;
}

StressSample stress(const Vec& grad, double u, const PotentialSpec& pot) {
  const int n = static_cast<int>(grad.size());
  StressSample s;
  s.e = pot.eps * grad.squaredNorm() + pot.W(u) / pot.eps;
  s.T = 2.0 * pot.eps * grad * grad.transpose() - s.e * identity(n);
  return s;
}

namespace {

// Quadrature nodes shared by the energy, its pullback and the analytic
// variation: weight, value, gradient and Laplacian per node.
struct QuadNode {
  std::size_t i;
  double w;
  double u;
  Vec grad;
  double lap;
};

std::vector<QuadNode> quadrature(const ScalarField& u, const PotentialSpec& pot,
                                 const BandMask* domain, bool need_lap) {
  const Grid& grid = u.grid();
  std::vector<QuadNode> q;
  if (!pot.free_boundary_case()) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (domain && !domain->contains(i)) continue;
      const Derivatives d = derivatives(u, grid.unravel(i));
      q.push_back({i, grid.dual_volume(grid.unravel(i)), u[i], d.grad, d.lap});
    }
    return q;
  }
  const BandExtension ext = extend_band(u, 2);
  const std::vector<double> meas = band_cell_measure(grid, ext);
  const ScalarField ext_field(grid, ext.u, u.time());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (domain && !domain->contains(i)) continue;
    if (!(meas[i] > 0.0)) continue;
    double lap = 0.0;
    if (need_lap) {
      try {
        lap = derivatives(ext_field, grid.unravel(i)).lap;
      } catch (const DomainError&) {
        lap = 0.0;
      }
    }
    q.push_back({i, meas[i], ext.u[i], ext.grad[i], lap});
  }
  return q;
}

// W for quadrature: for delta = 0 the measure already restricts to the band.
double potential_value(const PotentialSpec& pot, double u) {
  return pot.free_boundary_case() ? 1.0 : pot.W(u);
}

void check_support(const ScalarField& u, const DeformationField& U) {
  const Grid& grid = u.grid();
  double inner = 0.0, edge = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double m = U(grid.position(i)).norm();
    if (grid.edge_distance(grid.unravel(i)) < 2)
      edge = std::max(edge, m);
    else
      inner = std::max(inner, m);
  }
  if (edge > 1e-12 * std::max(1.0, inner))
    throw DomainError("deformation must vanish within 2 cells of the box edge");
}

}  // namespace

double energy(const ScalarField& u, const PotentialSpec& pot,
              const BandMask* domain) {
  double J = 0.0;
  for (const QuadNode& q : quadrature(u, pot, domain, false))
    J += q.w * (pot.eps * q.grad.squaredNorm() + potential_value(pot, q.u) / pot.eps);
  return J;
}

nlohmann::json VariationReport::to_json() const {
  return {{"delta", delta},         {"eps", eps},
          {"analytic", analytic},   {"fd", fd},
          {"rel_gap", rel_gap},     {"boundary_term", boundary_term},
          {"bulk_term", bulk_term}};
}

VariationReport inner_variation_analytic(const ScalarField& u,
                                         const DeformationField& U,
                                         const PotentialSpec& pot) {
  check_support(u, U);
  const Grid& grid = u.grid();
  VariationReport r;
  r.delta = pot.delta;
  r.eps = pot.eps;
  for (const QuadNode& q : quadrature(u, pot, nullptr, true)) {
    const double dW = pot.free_boundary_case() ? 0.0 : pot.dW(q.u);
    const double coef = 2.0 * pot.eps * q.lap - dW / pot.eps;
    r.bulk_term += q.w * coef * q.grad.dot(U(grid.position(q.i)));
  }
  if (pot.free_boundary_case()) {
    if (grid.dim() != 2)
      throw DomainError("free-boundary variation is implemented in 2D");
    const BandExtension ext = extend_band(u, 2);
    const BandBoundary bb = band_boundary(grid, ext);
    if (bb.inner.empty() && bb.outer.empty())
      throw DomainError("no free boundary curve could be extracted");
    std::vector<double> gx(grid.size()), gy(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const bool ok = std::isfinite(ext.u[i]);
      gx[i] = ok ? ext.grad[i][0] : std::numeric_limits<double>::quiet_NaN();
      gy[i] = ok ? ext.grad[i][1] : std::numeric_limits<double>::quiet_NaN();
    }
    // n^T T U with n = -nu on u = -1 and +nu on u = +1.
    auto integrand = [&](const Point2& p, double side) {
      Vec x(2);
      x << p.x, p.y;
      Vec g(2);
      g << interpolate(grid, gx, x), interpolate(grid, gy, x);
      const double gn = g.norm();
      if (!std::isfinite(gn) || gn == 0.0) return 0.0;
      const Vec n = side * g / gn;
      const Vec Ux = U(x);
      const double e = pot.eps * g.squaredNorm() + 1.0 / pot.eps;
      return 2.0 * pot.eps * g.dot(n) * g.dot(Ux) - e * n.dot(Ux);
    };
    auto line = [&](const std::vector<Polyline>& curves, double side) {
      double acc = 0.0;
      for (const Polyline& c : curves) {
        const std::size_t m = c.pts.size();
        const std::size_t segs = c.closed ? m : (m > 0 ? m - 1 : 0);
        for (std::size_t k = 0; k < segs; ++k) {
          const Point2& a = c.pts[k];
          const Point2& b = c.pts[(k + 1) % m];
          acc += 0.5 * std::hypot(b.x - a.x, b.y - a.y) *
                 (integrand(a, side) + integrand(b, side));
        }
      }
      return acc;
    };
    r.boundary_term = line(bb.inner, -1.0) + line(bb.outer, 1.0);
  }
  r.analytic = r.bulk_term - r.boundary_term;
  return r;
}

double inner_variation_fd(const ScalarField& u, const DeformationField& U,
                          const PotentialSpec& pot, double t_step) {
  if (!(t_step > 0.0)) throw DomainError("t_step must be positive");
  check_support(u, U);
  const Grid& grid = u.grid();
  const int n = grid.dim();
  const double hfd = 1e-6 * grid.spacing();
  const std::vector<QuadNode> nodes = quadrature(u, pot, nullptr, false);
  std::vector<Mat> jac(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    jac[k] = U.jacobian(grid.position(nodes[k].i), hfd);
    if (t_step * jac[k].norm() >= 0.5)
      throw DomainError("t_step too large: Id + tU may not be injective");
  }
  auto pulled = [&](double t) {
    double J = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const QuadNode& q = nodes[k];
      const Mat F = identity(n) + t * jac[k];
      const double det = F.determinant();
      const Vec g = F.transpose().partialPivLu().solve(q.grad);
      J += q.w * (pot.eps * g.squaredNorm() + potential_value(pot, q.u) / pot.eps) * det;
    }
    return J;
  };
  return (pulled(t_step) - pulled(-t_step)) / (2.0 * t_step);
}

VariationReport compare_inner_variation(const ScalarField& u,
                                        const DeformationField& U,
                                        const PotentialSpec& pot,
                                        double t_step) {
  VariationReport r = inner_variation_analytic(u, U, pot);
  r.fd = inner_variation_fd(u, U, pot, t_step);
  const double scale = std::max(std::abs(r.analytic), std::abs(r.fd));
  r.rel_gap = scale > 0.0 ? std::abs(r.analytic - r.fd) / scale : 0.0;
  return r;
}

double div_stress_check(const ScalarField& u, const PotentialSpec& pot,
                        const BandMask& mask) {
  const Grid& grid = u.grid();
  const int n = grid.dim();
  const double h = grid.spacing();
  if (mask.inside.size() != grid.size()) throw DomainError("mask does not match grid");
  std::vector<Mat> T(grid.size());
  std::vector<char> have(grid.size(), 0);
  std::vector<Derivatives> der(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!mask.contains(i)) continue;
    try {
      der[i] = derivatives(u, grid.unravel(i), &mask);
    } catch (const DomainError&) {
      continue;
    }
    T[i] = stress(der[i].grad, u[i], pot).T;
    have[i] = 1;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!have[i]) continue;
    const NodeIndex idx = grid.unravel(i);
    // neighbours on the box edge carry one-sided gradients
    if (grid.edge_distance(idx) < 2) continue;
    Vec div = zero_vec(n);
    bool ok = true;
    for (int a = 0; a < n && ok; ++a) {
      NodeIndex p = idx, m = idx;
      p[static_cast<std::size_t>(a)] += 1;
      m[static_cast<std::size_t>(a)] -= 1;
      if (!grid.contains(p) || !grid.contains(m)) {
        ok = false;
        break;
      }
      const std::size_t ip = grid.linear(p), im = grid.linear(m);
      if (!have[ip] || !have[im]) {
        ok = false;
        break;
      }
      // (div T)_b = sum_a d_a T_ab
      for (int b = 0; b < n; ++b) div[b] += (T[ip](a, b) - T[im](a, b)) / (2.0 * h);
    }
    if (!ok) continue;
    const double dW = pot.free_boundary_case() ? 0.0 : pot.dW(u[i]);
    const Vec rhs = (2.0 * pot.eps * der[i].lap - dW / pot.eps) * der[i].grad;
    worst = std::max(worst, (div - rhs).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::vector<double> inner_flow_rate(const ScalarField& u,
                                    const PotentialSpec& pot,
                                    InnerFlowVariant variant) {
  const Grid& grid = u.grid();
  std::vector<double> rate(grid.size(), 0.0);
  BandMask band;
  if (pot.free_boundary_case()) band = band_mask(u);
  const double e2 = pot.eps * pot.eps;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const NodeIndex idx = grid.unravel(i);
    if (grid.edge_distance(idx) < 1) continue;
    if (pot.free_boundary_case() && !band.contains(i)) continue;
    const Derivatives d =
        derivatives(u, idx, pot.free_boundary_case() ? &band : nullptr);
    const double dW = pot.free_boundary_case() ? 0.0 : pot.dW(u[i]);
    double r = 2.0 * d.lap - dW / e2;
    if (variant == InnerFlowVariant::LiteralVelocity)
      r *= -pot.eps * d.grad.squaredNorm();
    rate[i] = r;
  }
  return rate;
}

ScalarField inner_gradient_flow_step(const ScalarField& u,
                                     const PotentialSpec& pot, double dt,
                                     InnerFlowVariant variant) {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  const Grid& grid = u.grid();
  const double h = grid.spacing();
  double stiff = 4.0 * grid.dim() / (h * h);
  double ddw = 0.0;
  double g2 = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!pot.free_boundary_case()) ddw = std::max(ddw, std::abs(pot.ddW(u[i])));
    if (variant == InnerFlowVariant::LiteralVelocity &&
        grid.edge_distance(grid.unravel(i)) >= 1)
      g2 = std::max(g2, derivatives(u, grid.unravel(i)).grad.squaredNorm());
  }
  stiff += ddw / (pot.eps * pot.eps);
  if (variant == InnerFlowVariant::LiteralVelocity) stiff *= pot.eps * g2;
  if (dt * stiff > 1.0)
    throw StepRejected("explicit inner-flow step violates the stability bound",
                       dt * stiff);
  std::vector<double> rate = inner_flow_rate(u, pot, variant);
  std::vector<double> next(u.values().begin(), u.values().end());
  for (std::size_t i = 0; i < next.size(); ++i) next[i] += dt * rate[i];
  return ScalarField(grid, std::move(next), u.time() + dt, std::move(rate));
}

}  // namespace fbac
