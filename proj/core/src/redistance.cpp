#include "fbac/redistance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

#include "fbac/contour.hpp"
#include "fbac/errors.hpp"

namespace fbac {

namespace {

// Upwind update: solve sum_a ((d - m_a)_+)^2 = h^2 over the smallest m.
double eikonal(std::vector<double> m, double h) {
  std::sort(m.begin(), m.end());
  double d = m[0] + h;
  for (std::size_t k = 1; k < m.size(); ++k) {
    if (!(d > m[k])) break;
    double s = 0.0, s2 = 0.0;
    for (std::size_t q = 0; q <= k; ++q) {
      s += m[q];
      s2 += m[q] * m[q];
    }
    const double kk = static_cast<double>(k + 1);
    const double disc = s * s - kk * (s2 - h * h);
    if (disc < 0.0) break;
    d = (s + std::sqrt(disc)) / kk;
  }
  return d;
}

}  // namespace

namespace {

std::vector<double> march(const Grid& grid, std::span<const double> phi,
                          std::vector<double> dist, double cutoff) {
  const int n = grid.dim();
  const double h = grid.spacing();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<char> known(grid.size(), 0);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (std::isfinite(dist[i])) {
      known[i] = 1;
      heap.push({dist[i], i});
    }
  std::vector<double> m(static_cast<std::size_t>(n));
  auto update = [&](std::size_t i) {
    const NodeIndex idx = grid.unravel(i);
    for (int a = 0; a < n; ++a) {
      double best = inf;
      for (int s : {-1, 1}) {
        NodeIndex nb = idx;
        nb[static_cast<std::size_t>(a)] += s;
        if (!grid.contains(nb)) continue;
        const std::size_t j = grid.linear(nb);
        if (known[j] != 0) best = std::min(best, dist[j]);
      }
      m[static_cast<std::size_t>(a)] = best;
    }
    const double d = eikonal(m, h);
    if (d < dist[i]) {
      dist[i] = d;
      heap.push({d, i});
    }
  };
  while (!heap.empty()) {
    const auto [d, i] = heap.top();
    heap.pop();
    if (d > dist[i] || known[i] == 2) continue;
    known[i] = 2;
    if (d > cutoff) break;
    const NodeIndex idx = grid.unravel(i);
    for (int a = 0; a < n; ++a)
      for (int s : {-1, 1}) {
        NodeIndex nb = idx;
        nb[static_cast<std::size_t>(a)] += s;
        if (!grid.contains(nb)) continue;
        const std::size_t j = grid.linear(nb);
        if (known[j] == 0) update(j);
      }
  }
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = std::min(dist[i], cutoff);
    out[i] = phi[i] < 0.0 ? -d : d;
  }
  return out;
}

double segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double wx = p.x - a.x, wy = p.y - a.y;
  const double l2 = vx * vx + vy * vy;
  double t = l2 > 0.0 ? (wx * vx + wy * vy) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(wx - t * vx, wy - t * vy);
}

}  // namespace

std::vector<double> redistance(const Grid& grid, std::span<const double> phi,
                               double cutoff) {
  if (phi.size() != grid.size()) throw DomainError("phi size mismatch");
  const int n = grid.dim();
  const double h = grid.spacing();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(grid.size(), inf);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p = phi[i];
    if (p == 0.0) {
      dist[i] = 0.0;
      continue;
    }
    const NodeIndex idx = grid.unravel(i);
    double inv2 = 0.0;
    for (int a = 0; a < n; ++a) {
      double da = inf;
      for (int s : {-1, 1}) {
        NodeIndex nb = idx;
        nb[static_cast<std::size_t>(a)] += s;
        if (!grid.contains(nb)) continue;
        const double q = phi[grid.linear(nb)];
        if (p * q < 0.0 || q == 0.0) da = std::min(da, h * p / (p - q));
      }
      if (std::isfinite(da)) inv2 += 1.0 / (da * da);
    }
    if (inv2 > 0.0) dist[i] = 1.0 / std::sqrt(inv2);
  }
  return march(grid, phi, std::move(dist), cutoff);
}

std::vector<double> redistance(const Grid& grid, std::span<const double> phi,
                               double cutoff, double exact_radius) {
  if (grid.dim() != 2) return redistance(grid, phi, cutoff);
  if (phi.size() != grid.size()) throw DomainError("phi size mismatch");
  const double h = grid.spacing();
  const int nx = grid.count(0), ny = grid.count(1);
  const double x0 = grid.origin()[0], y0 = grid.origin()[1];
  const auto curves = extract_contours(grid, phi, 0.0);

  // Segments bucketed by the cell holding their midpoint.
  std::vector<std::vector<std::pair<Point2, Point2>>> bucket(
      static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  auto cell_of = [&](double x, double y) {
    const int i = std::clamp(static_cast<int>(std::floor((x - x0) / h)), 0, nx - 1);
    const int j = std::clamp(static_cast<int>(std::floor((y - y0) / h)), 0, ny - 1);
    return std::pair{i, j};
  };
  for (const auto& c : curves) {
    const std::size_t m = c.pts.size();
    const std::size_t segs = c.closed ? m : (m > 0 ? m - 1 : 0);
    for (std::size_t k = 0; k < segs; ++k) {
      const Point2& a = c.pts[k];
      const Point2& b = c.pts[(k + 1) % m];
      const auto [i, j] = cell_of(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
      bucket[static_cast<std::size_t>(i) * static_cast<std::size_t>(ny) +
             static_cast<std::size_t>(j)]
          .push_back({a, b});
    }
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(grid.size(), inf);
  const int reach = static_cast<int>(std::ceil(exact_radius / h)) + 1;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (!(std::abs(phi[idx]) <= exact_radius + 2.0 * h)) continue;
    const Vec x = grid.position(idx);
    const Point2 p{x[0], x[1]};
    const auto [ci, cj] = cell_of(p.x, p.y);
    double best = inf;
    for (int i = std::max(0, ci - reach); i <= std::min(nx - 1, ci + reach); ++i)
      for (int j = std::max(0, cj - reach); j <= std::min(ny - 1, cj + reach); ++j)
        for (const auto& [a, b] :
             bucket[static_cast<std::size_t>(i) * static_cast<std::size_t>(ny) +
                    static_cast<std::size_t>(j)])
          best = std::min(best, segment_distance(p, a, b));
    if (best <= exact_radius) dist[idx] = best;
  }
  return march(grid, phi, std::move(dist), cutoff);
}

}  // namespace fbac
