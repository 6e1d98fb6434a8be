#include "fbac/band_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fbac/errors.hpp"

namespace fbac {

double halfspace_box_volume(const Vec& c_in, double gamma, const Vec& a_in) {
  const int n = static_cast<int>(c_in.size());
  double box = 1.0;
  for (int k = 0; k < n; ++k) box *= a_in[k];
  const double scale = c_in.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) return gamma >= 0.0 ? box : 0.0;
  // Reflect negative directions, drop negligible ones.
  Vec c(n), a(n);
  double g = gamma;
  double free = 1.0;
  int m = 0;
  for (int k = 0; k < n; ++k) {
    double ck = c_in[k];
    if (std::abs(ck) <= 1e-12 * scale) {
      free *= a_in[k];
      continue;
    }
    if (ck < 0.0) {
      g -= ck * a_in[k];
      ck = -ck;
    }
    c[m] = ck;
    a[m] = a_in[k];
    ++m;
  }
  double total = 0.0;
  for (int k = 0; k < m; ++k) total += c[k] * a[k];
  if (g <= 0.0) return 0.0;
  if (g >= total) return box;
  double fact = 1.0, prod = 1.0;
  for (int k = 0; k < m; ++k) {
    fact *= (k + 1);
    prod *= c[k];
  }
  double sum = 0.0;
  for (int S = 0; S < (1 << m); ++S) {
    double shift = 0.0;
    int bits = 0;
    for (int k = 0; k < m; ++k)
      if (S & (1 << k)) {
        shift += c[k] * a[k];
        ++bits;
      }
    const double r = g - shift;
    if (r > 0.0) sum += ((bits & 1) ? -1.0 : 1.0) * std::pow(r, m);
  }
  const double v = sum / (fact * prod);
  double sub = 1.0;
  for (int k = 0; k < m; ++k) sub *= a[k];
  return free * std::clamp(v, 0.0, sub);
}

BandExtension extend_band(const ScalarField& field, int layers) {
  const Grid& grid = field.grid();
  const int n = grid.dim();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  BandExtension ext;
  ext.u.assign(grid.size(), nan);
  ext.grad.assign(grid.size(), Vec());
  ext.band = band_mask(field).inside;
  BandMask mask;
  mask.inside = ext.band;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!ext.band[i]) continue;
    ext.u[i] = field[i];
    try {
      ext.grad[i] = derivatives(field, grid.unravel(i), &mask).grad;
    } catch (const DomainError&) {
      ext.grad[i] = zero_vec(n);  // isolated node
    }
  }
  std::vector<char> have = ext.band;
  for (int layer = 0; layer < layers; ++layer) {
    std::vector<std::size_t> fresh;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (have[i]) continue;
      const NodeIndex idx = grid.unravel(i);
      const Vec x = grid.position(idx);
      double acc = 0.0, w = 0.0;
      Vec g = zero_vec(n);
      for (int off = 0; off < (n == 1 ? 3 : n == 2 ? 9 : 27); ++off) {
        NodeIndex nb = idx;
        int rem = off;
        bool self = true;
        for (int a = 0; a < n; ++a) {
          const int d = rem % 3 - 1;
          rem /= 3;
          nb[static_cast<std::size_t>(a)] += d;
          if (d != 0) self = false;
        }
        if (self || !grid.contains(nb)) continue;
        const std::size_t j = grid.linear(nb);
        if (!have[j]) continue;
        acc += ext.u[j] + ext.grad[j].dot(x - grid.position(j));
        g += ext.grad[j];
        w += 1.0;
      }
      if (w > 0.0) {
        ext.u[i] = acc / w;
        ext.grad[i] = g / w;
        fresh.push_back(i);
      }
    }
    for (std::size_t i : fresh) have[i] = 1;
  }
  return ext;
}

std::vector<double> band_cell_measure(const Grid& grid, const BandExtension& ext) {
  const int n = grid.dim();
  const double h = grid.spacing();
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double ui = ext.u[i];
    if (!std::isfinite(ui)) continue;
    const NodeIndex idx = grid.unravel(i);
    const Vec& g = ext.grad[i];
    // Dual cell [lo, hi] relative to x_i.
    Vec lo(n), ext_len(n);
    for (int a = 0; a < n; ++a) {
      const int k = idx[static_cast<std::size_t>(a)];
      const double l = k == 0 ? 0.0 : -0.5 * h;
      const double r = k == grid.count(a) - 1 ? 0.0 : 0.5 * h;
      lo[a] = l;
      ext_len[a] = r - l;
    }
    // u(y) = ui + g.(lo + y), y in [0, ext_len].
    const double base = ui + g.dot(lo);
    const double below_plus = halfspace_box_volume(g, 1.0 - base, ext_len);
    const double below_minus = halfspace_box_volume(g, -1.0 - base, ext_len);
    out[i] = std::max(0.0, below_plus - below_minus);
  }
  return out;
}

BandBoundary band_boundary(const Grid& grid, const BandExtension& ext) {
  if (grid.dim() != 2) throw DomainError("band boundary curves need 2D data");
  return {extract_contours(grid, ext.u, -1.0), extract_contours(grid, ext.u, 1.0)};
}

}  // namespace fbac
