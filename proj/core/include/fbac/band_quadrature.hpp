#pragma once

#include <span>
#include <vector>

#include "fbac/contour.hpp"
#include "fbac/field.hpp"

namespace fbac {

/// Volume of {y in prod [0, a_k] : c . y <= gamma}.
double halfspace_box_volume(const Vec& c, double gamma, const Vec& extents);

/// u continued linearly from the band {|u| < 1} into `layers` rings of
/// outside nodes (first-order Taylor from adjacent band nodes), with nodal
/// gradients. Nodes further out hold NaN.
struct BandExtension {
  std::vector<double> u;
  std::vector<Vec> grad;
  std::vector<char> band;  // original band membership
};

BandExtension extend_band(const ScalarField& field, int layers = 2);

/// Per-node measure of {|u| < 1} inside the node's dual cell, from the
/// linear model u_i + grad_i . (x - x_i). Zero where the extension is NaN.
std::vector<double> band_cell_measure(const Grid& grid, const BandExtension& ext);

/// Level curves u = -1 and u = +1 of the extended field (2D only).
struct BandBoundary {
  std::vector<Polyline> inner;  // u = -1
  std::vector<Polyline> outer;  // u = +1
};

BandBoundary band_boundary(const Grid& grid, const BandExtension& ext);

}  // namespace fbac
