#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fbac/linalg.hpp"

namespace fbac {

/// Integer node coordinates; entries beyond `Grid::dim` are ignored (kept 0).
using NodeIndex = std::array<int, 3>;

/// Uniform Cartesian grid in dimension 1..3. Nodes are stored row-major:
/// axis 0 varies slowest.
class Grid {
 public:
  Grid(int dim, Vec origin, double spacing, std::vector<int> counts);

  /// Box [lo, hi]^dim with spacing h; the node count per axis is rounded so
  /// that the last node lands on hi.
  static Grid box(int dim, double lo, double hi, double h);
  /// Anisotropic box [lo_k, hi_k] per axis, common spacing h.
  static Grid box(const Vec& lo, const Vec& hi, double h);

  int dim() const noexcept { return dim_; }
  const Vec& origin() const noexcept { return origin_; }
  double spacing() const noexcept { return spacing_; }
  int count(int axis) const { return counts_[static_cast<std::size_t>(axis)]; }
  std::vector<int> counts() const;
  std::size_t size() const noexcept { return size_; }

  bool contains(const NodeIndex& idx) const noexcept;
  std::size_t linear(const NodeIndex& idx) const;
  NodeIndex unravel(std::size_t linear) const;
  Vec position(const NodeIndex& idx) const;
  Vec position(std::size_t linear) const { return position(unravel(linear)); }
  Vec upper() const;
  /// Distance (in nodes) from idx to the nearest grid edge.
  int edge_distance(const NodeIndex& idx) const;

  /// Volume of the node's dual cell clipped to the grid box (trapezoid
  /// weights: halved once per axis on which the node sits on the edge).
  double dual_volume(const NodeIndex& idx) const;

  bool same_layout(const Grid& other) const noexcept;

 private:
  int dim_;
  Vec origin_;
  double spacing_;
  std::array<int, 3> counts_{1, 1, 1};
  std::size_t size_;
};

/// Nodal samples of u on a Grid, stamped with a time, optionally carrying
/// the time derivative ut at the same nodes. Immutable once built.
class ScalarField {
 public:
  ScalarField(Grid grid, std::vector<double> values, double time = 0.0,
              std::optional<std::vector<double>> dt_values = std::nullopt);

  static ScalarField sample(const Grid& grid,
                            const std::function<double(const Vec&)>& u,
                            double time = 0.0);
  static ScalarField sample(const Grid& grid,
                            const std::function<double(const Vec&)>& u,
                            const std::function<double(const Vec&)>& ut,
                            double time);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double time() const noexcept { return time_; }
  bool has_dt() const noexcept { return dt_values_.has_value(); }
  std::span<const double> dt_values() const;

  double operator[](std::size_t i) const { return values_[i]; }
  double at(const NodeIndex& idx) const { return values_[grid_.linear(idx)]; }

  ScalarField with_dt(std::vector<double> dt_values) const;
  ScalarField with_time(double t) const;

 private:
  Grid grid_;
  std::vector<double> values_;
  double time_;
  std::optional<std::vector<double>> dt_values_;
};

/// Nodes of the interface band {|u| < 1 - margin}.
struct BandMask {
  std::vector<char> inside;
  double margin = 0.0;

  bool contains(std::size_t i) const { return inside[i] != 0; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
};

BandMask band_mask(const ScalarField& field, double margin = 0.0);

/// Mask selecting every node (used where "full domain" is requested).
BandMask full_mask(const Grid& grid);

struct Derivatives {
  Vec grad;
  Mat hess;
  double lap = 0.0;
};

/// Second-order finite differences at a node. Central stencils are used where
/// both neighbours are available; otherwise one-sided second-order stencils.
/// A neighbour is available when it lies on the grid, inside `mask` (if
/// given), and holds a finite value. Mixed partials are symmetrized.
Derivatives derivatives(const ScalarField& field, const NodeIndex& idx,
                        const BandMask* mask = nullptr);
Derivatives derivatives(const Grid& grid, std::span<const double> values,
                        const NodeIndex& idx, const BandMask* mask = nullptr);

/// Multilinear interpolation; throws DomainError outside the grid box.
double interpolate(const ScalarField& field, const Vec& point);
double interpolate(const Grid& grid, std::span<const double> values,
                   const Vec& point);

bool inside_box(const Grid& grid, const Vec& point, double slack = 0.0);

}  // namespace fbac
