#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fbac/field.hpp"

namespace fbac {

/// Sidecar manifest path for a field CSV: `a/b/f.csv` -> `a/b/f.json`.
std::filesystem::path field_manifest_path(const std::filesystem::path& csv);

nlohmann::json grid_manifest(const Grid& grid, double time);
Grid grid_from_manifest(const nlohmann::json& manifest);

/// Writes `x1,...,xn,<column>[,ut]`, one node per row in storage order, plus
/// the sidecar manifest (dim, origin, spacing, counts, time).
void write_field_csv(const std::filesystem::path& csv, const ScalarField& field,
                     const std::string& column = "u", bool include_dt = true);

/// Writes an arbitrary nodal array (NaN allowed) in the same layout.
void write_nodal_csv(const std::filesystem::path& csv, const Grid& grid,
                     double time, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& data);

/// Reads a field dump; the value column is the first column after the
/// coordinates, and a trailing `ut` column (if present) becomes dt_values.
ScalarField read_field_csv(const std::filesystem::path& csv);

/// Shortest round-trip decimal form of a double ("nan" for NaN).
std::string format_double(double v);

}  // namespace fbac
