#include "fbac/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fbac/errors.hpp"

namespace fbac {

Grid::Grid(int dim, Vec origin, double spacing, std::vector<int> counts)
    : dim_(dim), origin_(std::move(origin)), spacing_(spacing) {
  if (dim < 1 || dim > 3) throw DomainError("grid dimension must be 1, 2 or 3");
  if (origin_.size() != dim) throw DomainError("grid origin has wrong length");
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw DomainError("grid spacing must be positive");
  if (static_cast<int>(counts.size()) != dim)
    throw DomainError("grid counts must have one entry per axis");
  size_ = 1;
  for (int a = 0; a < dim; ++a) {
    if (counts[static_cast<std::size_t>(a)] < 3)
      throw DomainError("grid needs at least 3 nodes per axis");
    counts_[static_cast<std::size_t>(a)] = counts[static_cast<std::size_t>(a)];
    size_ *= static_cast<std::size_t>(counts[static_cast<std::size_t>(a)]);
  }
}

Grid Grid::box(int dim, double lo, double hi, double h) {
  Vec vlo = Vec::Constant(dim, lo);
  Vec vhi = Vec::Constant(dim, hi);
  return box(vlo, vhi, h);
}

Grid Grid::box(const Vec& lo, const Vec& hi, double h) {
  const int dim = static_cast<int>(lo.size());
  std::vector<int> counts(static_cast<std::size_t>(dim));
  for (int a = 0; a < dim; ++a) {
    if (!(hi[a] > lo[a])) throw DomainError("box upper bound must exceed lower");
    counts[static_cast<std::size_t>(a)] =
        static_cast<int>(std::lround((hi[a] - lo[a]) / h)) + 1;
  }
  return Grid(dim, lo, h, std::move(counts));
}

std::vector<int> Grid::counts() const {
  return {counts_.begin(), counts_.begin() + dim_};
}

bool Grid::contains(const NodeIndex& idx) const noexcept {
  for (int a = 0; a < dim_; ++a) {
    const auto s = static_cast<std::size_t>(a);
    if (idx[s] < 0 || idx[s] >= counts_[s]) return false;
  }
  return true;
}

std::size_t Grid::linear(const NodeIndex& idx) const {
  if (!contains(idx)) throw DomainError("node index out of range");
  std::size_t lin = 0;
  for (int a = 0; a < dim_; ++a) {
    const auto s = static_cast<std::size_t>(a);
    lin = lin * static_cast<std::size_t>(counts_[s]) +
          static_cast<std::size_t>(idx[s]);
  }
  return lin;
}

NodeIndex Grid::unravel(std::size_t lin) const {
  if (lin >= size_) throw DomainError("linear node index out of range");
  NodeIndex idx{0, 0, 0};
  for (int a = dim_ - 1; a >= 0; --a) {
    const auto s = static_cast<std::size_t>(a);
    const auto c = static_cast<std::size_t>(counts_[s]);
    idx[s] = static_cast<int>(lin % c);
    lin /= c;
  }
  return idx;
}

Vec Grid::position(const NodeIndex& idx) const {
  Vec x(dim_);
  for (int a = 0; a < dim_; ++a)
    x[a] = origin_[a] + spacing_ * idx[static_cast<std::size_t>(a)];
  return x;
}

Vec Grid::upper() const {
  Vec x(dim_);
  for (int a = 0; a < dim_; ++a)
    x[a] = origin_[a] + spacing_ * (counts_[static_cast<std::size_t>(a)] - 1);
  return x;
}

int Grid::edge_distance(const NodeIndex& idx) const {
  int d = std::numeric_limits<int>::max();
  for (int a = 0; a < dim_; ++a) {
    const auto s = static_cast<std::size_t>(a);
    d = std::min({d, idx[s], counts_[s] - 1 - idx[s]});
  }
  return d;
}

double Grid::dual_volume(const NodeIndex& idx) const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) {
    const auto s = static_cast<std::size_t>(a);
    const bool edge = idx[s] == 0 || idx[s] == counts_[s] - 1;
    v *= edge ? 0.5 * spacing_ : spacing_;
  }
  return v;
}

bool Grid::same_layout(const Grid& other) const noexcept {
  if (dim_ != other.dim_ || spacing_ != other.spacing_) return false;
  for (int a = 0; a < dim_; ++a) {
    if (origin_[a] != other.origin_[a]) return false;
    if (counts_[static_cast<std::size_t>(a)] !=
        other.counts_[static_cast<std::size_t>(a)])
      return false;
  }
  return true;
}

ScalarField::ScalarField(Grid grid, std::vector<double> values, double time,
                         std::optional<std::vector<double>> dt_values)
    : grid_(std::move(grid)),
      values_(std::move(values)),
      time_(time),
      dt_values_(std::move(dt_values)) {
  if (values_.size() != grid_.size())
    throw DomainError("field value count does not match grid size");
  if (dt_values_ && dt_values_->size() != grid_.size())
    throw DomainError("dt_values count does not match grid size");
}

ScalarField ScalarField::sample(const Grid& grid,
                                const std::function<double(const Vec&)>& u,
                                double time) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = u(grid.position(i));
  return ScalarField(grid, std::move(v), time);
}

ScalarField ScalarField::sample(const Grid& grid,
                                const std::function<double(const Vec&)>& u,
                                const std::function<double(const Vec&)>& ut,
                                double time) {
  std::vector<double> v(grid.size());
  std::vector<double> d(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec x = grid.position(i);
    v[i] = u(x);
    d[i] = ut(x);
  }
  return ScalarField(grid, std::move(v), time, std::move(d));
}

std::span<const double> ScalarField::dt_values() const {
  if (!dt_values_) throw DomainError("field carries no dt_values");
  return *dt_values_;
}

ScalarField ScalarField::with_dt(std::vector<double> dt_values) const {
  return ScalarField(grid_, values_, time_, std::move(dt_values));
}

ScalarField ScalarField::with_time(double t) const {
  return ScalarField(grid_, values_, t, dt_values_);
}

std::size_t BandMask::count() const {
  return static_cast<std::size_t>(
      std::count_if(inside.begin(), inside.end(), [](char c) { return c != 0; }));
}

BandMask band_mask(const ScalarField& field, double margin) {
  if (!(margin >= 0.0 && margin < 0.5))
    throw DomainError("band margin must lie in [0, 0.5)");
  BandMask m;
  m.margin = margin;
  m.inside.resize(field.grid().size());
  const auto v = field.values();
  for (std::size_t i = 0; i < v.size(); ++i)
    m.inside[i] = std::abs(v[i]) < 1.0 - margin ? 1 : 0;
  return m;
}

BandMask full_mask(const Grid& grid) {
  BandMask m;
  m.inside.assign(grid.size(), 1);
  return m;
}

namespace {

struct Stencil {
  const Grid& grid;
  std::span<const double> values;
  const BandMask* mask;

  bool available(const NodeIndex& idx) const {
    if (!grid.contains(idx)) return false;
    const std::size_t i = grid.linear(idx);
    if (mask != nullptr && !mask->contains(i)) return false;
    return std::isfinite(values[i]);
  }
  double at(const NodeIndex& idx) const { return values[grid.linear(idx)]; }

  static NodeIndex shift(NodeIndex idx, int axis, int k) {
    idx[static_cast<std::size_t>(axis)] += k;
    return idx;
  }

  double first(const NodeIndex& p, int axis) const {
    const double h = grid.spacing();
    const NodeIndex pp = shift(p, axis, 1), pm = shift(p, axis, -1);
    const bool ap = available(pp), am = available(pm);
    if (ap && am) return (at(pp) - at(pm)) / (2.0 * h);
    const NodeIndex pp2 = shift(p, axis, 2), pm2 = shift(p, axis, -2);
    if (ap && available(pp2))
      return (-3.0 * at(p) + 4.0 * at(pp) - at(pp2)) / (2.0 * h);
    if (am && available(pm2))
      return (3.0 * at(p) - 4.0 * at(pm) + at(pm2)) / (2.0 * h);
    if (ap) return (at(pp) - at(p)) / h;
    if (am) return (at(p) - at(pm)) / h;
    throw DomainError("no stencil available for first derivative");
  }

  double second(const NodeIndex& p, int axis) const {
    const double h2 = grid.spacing() * grid.spacing();
    const NodeIndex pp = shift(p, axis, 1), pm = shift(p, axis, -1);
    const bool ap = available(pp), am = available(pm);
    if (ap && am) return (at(pp) - 2.0 * at(p) + at(pm)) / h2;
    const NodeIndex pp2 = shift(p, axis, 2), pm2 = shift(p, axis, -2);
    const NodeIndex pp3 = shift(p, axis, 3), pm3 = shift(p, axis, -3);
    if (ap && available(pp2) && available(pp3))
      return (2.0 * at(p) - 5.0 * at(pp) + 4.0 * at(pp2) - at(pp3)) / h2;
    if (am && available(pm2) && available(pm3))
      return (2.0 * at(p) - 5.0 * at(pm) + 4.0 * at(pm2) - at(pm3)) / h2;
    if (ap && available(pp2)) return (at(p) - 2.0 * at(pp) + at(pp2)) / h2;
    if (am && available(pm2)) return (at(p) - 2.0 * at(pm) + at(pm2)) / h2;
    throw DomainError("no stencil available for second derivative");
  }

  // d/dx_outer of (d/dx_inner u), outer stencil chosen from availability.
  double mixed(const NodeIndex& p, int outer, int inner) const {
    const double h = grid.spacing();
    const NodeIndex pp = shift(p, outer, 1), pm = shift(p, outer, -1);
    const bool ap = available(pp), am = available(pm);
    if (ap && am) return (first(pp, inner) - first(pm, inner)) / (2.0 * h);
    const NodeIndex pp2 = shift(p, outer, 2), pm2 = shift(p, outer, -2);
    if (ap && available(pp2))
      return (-3.0 * first(p, inner) + 4.0 * first(pp, inner) -
              first(pp2, inner)) /
             (2.0 * h);
    if (am && available(pm2))
      return (3.0 * first(p, inner) - 4.0 * first(pm, inner) +
              first(pm2, inner)) /
             (2.0 * h);
    if (ap) return (first(pp, inner) - first(p, inner)) / h;
    if (am) return (first(p, inner) - first(pm, inner)) / h;
    throw DomainError("no stencil available for mixed derivative");
  }
};

}  // namespace

Derivatives derivatives(const ScalarField& field, const NodeIndex& idx,
                        const BandMask* mask) {
  return derivatives(field.grid(), field.values(), idx, mask);
}

Derivatives derivatives(const Grid& grid, std::span<const double> values,
                        const NodeIndex& idx, const BandMask* mask) {
  if (!grid.contains(idx)) throw DomainError("node index out of range");
  if (values.size() != grid.size())
    throw DomainError("value array does not match grid");
  const Stencil st{grid, values, mask};
  const int n = grid.dim();
  Derivatives d{zero_vec(n), zero_mat(n), 0.0};
  for (int a = 0; a < n; ++a) {
    d.grad[a] = st.first(idx, a);
    d.hess(a, a) = st.second(idx, a);
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      double ab = 0.0, ba = 0.0;
      bool has_ab = true, has_ba = true;
      try {
        ab = st.mixed(idx, a, b);
      } catch (const DomainError&) {
        has_ab = false;
      }
      try {
        ba = st.mixed(idx, b, a);
      } catch (const DomainError&) {
        has_ba = false;
      }
      if (!has_ab && !has_ba)
        throw DomainError("no stencil available for mixed derivative");
      const double m = has_ab && has_ba ? 0.5 * (ab + ba) : (has_ab ? ab : ba);
      d.hess(a, b) = m;
      d.hess(b, a) = m;
    }
  }
  d.lap = d.hess.trace();
  return d;
}

bool inside_box(const Grid& grid, const Vec& point, double slack) {
  if (point.size() != grid.dim()) return false;
  const Vec hi = grid.upper();
  for (int a = 0; a < grid.dim(); ++a) {
    if (!(point[a] >= grid.origin()[a] - slack) || !(point[a] <= hi[a] + slack))
      return false;
  }
  return true;
}

double interpolate(const ScalarField& field, const Vec& point) {
  return interpolate(field.grid(), field.values(), point);
}

double interpolate(const Grid& grid, std::span<const double> values,
                   const Vec& point) {
  const double h = grid.spacing();
  if (!inside_box(grid, point, 1e-12 * h))
    throw DomainError("interpolation point outside grid box");
  const int n = grid.dim();
  NodeIndex base{0, 0, 0};
  std::array<double, 3> frac{0.0, 0.0, 0.0};
  for (int a = 0; a < n; ++a) {
    const auto s = static_cast<std::size_t>(a);
    const double g = (point[a] - grid.origin()[a]) / h;
    int i = static_cast<int>(std::floor(g));
    i = std::clamp(i, 0, grid.count(a) - 2);
    base[s] = i;
    frac[s] = std::clamp(g - i, 0.0, 1.0);
    // snap node-coincident coordinates so nodal values come back exactly
    if (frac[s] < 1e-12) frac[s] = 0.0;
    if (frac[s] > 1.0 - 1e-12) frac[s] = 1.0;
  }
  double acc = 0.0;
  const int corners = 1 << n;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    NodeIndex idx = base;
    for (int a = 0; a < n; ++a) {
      const auto s = static_cast<std::size_t>(a);
      const bool hi = (c >> a) & 1;
      idx[s] += hi ? 1 : 0;
      w *= hi ? frac[s] : 1.0 - frac[s];
    }
    if (w != 0.0) acc += w * values[grid.linear(idx)];
  }
  return acc;
}

}  // namespace fbac
