#include "fbac/contour.hpp"

#include <cmath>
#include <unordered_map>

#include "fbac/errors.hpp"

namespace fbac {

namespace {

struct Segment {
  long long a, b;  // edge keys
  Point2 pa, pb;
};

}  // namespace

std::vector<Polyline> extract_contours(const Grid& grid,
                                       std::span<const double> v,
                                       double level) {
  if (grid.dim() != 2) throw DomainError("contours need a 2D grid");
  if (v.size() != grid.size()) throw DomainError("value array size mismatch");
  const int nx = grid.count(0), ny = grid.count(1);
  const double h = grid.spacing();
  const double x0 = grid.origin()[0], y0 = grid.origin()[1];
  auto val = [&](int i, int j) { return v[grid.linear({i, j, 0})]; };
  // Edge key: 2*linear + (0: along axis 0, 1: along axis 1).
  auto hkey = [&](int i, int j) {
    return 2LL * static_cast<long long>(grid.linear({i, j, 0}));
  };
  auto vkey = [&](int i, int j) { return hkey(i, j) + 1; };
  auto lerp = [&](double fa, double fb) { return (level - fa) / (fb - fa); };

  std::vector<Segment> segs;
  for (int i = 0; i + 1 < nx; ++i) {
    for (int j = 0; j + 1 < ny; ++j) {
      const double f[4] = {val(i, j), val(i + 1, j), val(i + 1, j + 1),
                           val(i, j + 1)};
      bool ok = true;
      for (double q : f) ok = ok && std::isfinite(q);
      if (!ok) continue;
      int mask = 0;
      for (int k = 0; k < 4; ++k)
        if (f[k] >= level) mask |= 1 << k;
      if (mask == 0 || mask == 15) continue;
      // Edges: 0 bottom (c0-c1), 1 right (c1-c2), 2 top (c3-c2), 3 left (c0-c3).
      const double xi = x0 + i * h, yj = y0 + j * h;
      auto point = [&](int e) -> Point2 {
        switch (e) {
          case 0: return {xi + lerp(f[0], f[1]) * h, yj};
          case 1: return {xi + h, yj + lerp(f[1], f[2]) * h};
          case 2: return {xi + lerp(f[3], f[2]) * h, yj + h};
          default: return {xi, yj + lerp(f[0], f[3]) * h};
        }
      };
      auto key = [&](int e) -> long long {
        switch (e) {
          case 0: return hkey(i, j);
          case 1: return vkey(i + 1, j);
          case 2: return hkey(i, j + 1);
          default: return vkey(i, j);
        }
      };
      auto add = [&](int e1, int e2) {
        segs.push_back({key(e1), key(e2), point(e1), point(e2)});
      };
      const bool centre_high = 0.25 * (f[0] + f[1] + f[2] + f[3]) >= level;
      switch (mask) {
        case 1: case 14: add(3, 0); break;
        case 2: case 13: add(0, 1); break;
        case 3: case 12: add(3, 1); break;
        case 4: case 11: add(1, 2); break;
        case 6: case 9: add(0, 2); break;
        case 7: case 8: add(3, 2); break;
        case 5:  // c0, c2 high
          if (centre_high) { add(3, 2); add(0, 1); }
          else { add(3, 0); add(1, 2); }
          break;
        case 10:  // c1, c3 high
          if (centre_high) { add(3, 0); add(1, 2); }
          else { add(3, 2); add(0, 1); }
          break;
        default: break;
      }
    }
  }

  std::unordered_map<long long, std::vector<std::size_t>> at;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    at[segs[s].a].push_back(s);
    at[segs[s].b].push_back(s);
  }
  std::vector<char> used(segs.size(), 0);
  auto next_seg = [&](long long k, std::size_t from) -> long {
    for (std::size_t s : at[k])
      if (s != from && !used[s]) return static_cast<long>(s);
    return -1;
  };

  std::vector<Polyline> out;
  for (std::size_t s0 = 0; s0 < segs.size(); ++s0) {
    if (used[s0]) continue;
    used[s0] = 1;
    // Grow forward from b, then backward from a.
    std::vector<Point2> fwd{segs[s0].pa, segs[s0].pb};
    std::vector<long long> fkeys{segs[s0].a, segs[s0].b};
    long long end = segs[s0].b;
    std::size_t last = s0;
    bool closed = false;
    while (true) {
      const long n = next_seg(end, last);
      if (n < 0) break;
      const auto& sg = segs[static_cast<std::size_t>(n)];
      used[static_cast<std::size_t>(n)] = 1;
      const bool forward = sg.a == end;
      end = forward ? sg.b : sg.a;
      last = static_cast<std::size_t>(n);
      if (end == segs[s0].a) {
        closed = true;
        break;
      }
      fwd.push_back(forward ? sg.pb : sg.pa);
    }
    if (!closed) {
      std::vector<Point2> back;
      long long start = segs[s0].a;
      last = s0;
      while (true) {
        const long n = next_seg(start, last);
        if (n < 0) break;
        const auto& sg = segs[static_cast<std::size_t>(n)];
        used[static_cast<std::size_t>(n)] = 1;
        const bool forward = sg.b == start;
        start = forward ? sg.a : sg.b;
        last = static_cast<std::size_t>(n);
        back.push_back(forward ? sg.pa : sg.pb);
      }
      fwd.insert(fwd.begin(), back.rbegin(), back.rend());
    }
    out.push_back({std::move(fwd), closed});
  }
  return out;
}

double signed_area(const Polyline& p) {
  const std::size_t n = p.pts.size();
  if (n < 3) return 0.0;
  double a = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Point2& u = p.pts[k];
    const Point2& w = p.pts[(k + 1) % n];
    a += u.x * w.y - w.x * u.y;
  }
  return 0.5 * a;
}

double length(const Polyline& p) {
  const std::size_t n = p.pts.size();
  double l = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k)
    l += std::hypot(p.pts[k + 1].x - p.pts[k].x, p.pts[k + 1].y - p.pts[k].y);
  if (p.closed && n > 2)
    l += std::hypot(p.pts[0].x - p.pts[n - 1].x, p.pts[0].y - p.pts[n - 1].y);
  return l;
}

double enclosed_area(const std::vector<Polyline>& curves) {
  double a = 0.0;
  for (const auto& c : curves)
    if (c.closed) a += std::abs(signed_area(c));
  return a;
}

double total_length(const std::vector<Polyline>& curves) {
  double l = 0.0;
  for (const auto& c : curves) l += length(c);
  return l;
}

}  // namespace fbac
