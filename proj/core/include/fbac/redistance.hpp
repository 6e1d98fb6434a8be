#pragma once

#include <span>
#include <vector>

#include "fbac/field.hpp"

namespace fbac {

/// First-order fast-marching reconstruction of the signed distance to the
/// zero set of phi. Nodes adjacent to a sign change keep their
/// linearly-interpolated distance; marching stops beyond `cutoff`, where
/// values are set to +-cutoff with the sign of phi.
std::vector<double> redistance(const Grid& grid, std::span<const double> phi,
                               double cutoff);

/// 2D variant: nodes within `exact_radius` of the zero set take their exact
/// distance to the marching-squares polyline of phi = 0 and seed the march.
std::vector<double> redistance(const Grid& grid, std::span<const double> phi,
                               double cutoff, double exact_radius);

}  // namespace fbac
