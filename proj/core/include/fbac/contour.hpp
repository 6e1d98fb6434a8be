#pragma once

#include <span>
#include <vector>

#include "fbac/field.hpp"

namespace fbac {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Polyline {
  std::vector<Point2> pts;
  bool closed = false;
};

/// Marching-squares level set of nodal 2D data with linear interpolation on
/// cell edges. Saddle cells are split by the cell-centre average; cells with
/// a non-finite corner are skipped. Segments are chained into ordered
/// polylines; a polyline is closed when its chain returns to the start.
std::vector<Polyline> extract_contours(const Grid& grid,
                                       std::span<const double> values,
                                       double level);

/// Signed shoelace area (closing segment implied).
double signed_area(const Polyline& p);
double length(const Polyline& p);

/// Sum of |area| over closed components.
double enclosed_area(const std::vector<Polyline>& curves);
double total_length(const std::vector<Polyline>& curves);

}  // namespace fbac
