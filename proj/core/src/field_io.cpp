#include "fbac/field_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fbac/errors.hpp"

namespace fbac {

namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

fs::path field_manifest_path(const fs::path& csv) {
  fs::path p = csv;
  p.replace_extension(".json");
  return p;
}

nlohmann::json grid_manifest(const Grid& grid, double time) {
  nlohmann::json j;
  j["dim"] = grid.dim();
  std::vector<double> origin(static_cast<std::size_t>(grid.dim()));
  for (int a = 0; a < grid.dim(); ++a)
    origin[static_cast<std::size_t>(a)] = grid.origin()[a];
  j["origin"] = origin;
  j["spacing"] = grid.spacing();
  j["counts"] = grid.counts();
  j["time"] = time;
  return j;
}

Grid grid_from_manifest(const nlohmann::json& m) {
  try {
    const int dim = m.at("dim").get<int>();
    const auto origin = m.at("origin").get<std::vector<double>>();
    Vec o(dim);
    if (static_cast<int>(origin.size()) != dim)
      throw DomainError("manifest origin length does not match dim");
    for (int a = 0; a < dim; ++a) o[a] = origin[static_cast<std::size_t>(a)];
    return Grid(dim, o, m.at("spacing").get<double>(),
                m.at("counts").get<std::vector<int>>());
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed grid manifest: ") + e.what());
  }
}

namespace {

void write_manifest(const fs::path& csv, const Grid& grid, double time) {
  std::ofstream out(field_manifest_path(csv));
  if (!out) throw DomainError("cannot write manifest for " + csv.string());
  out << grid_manifest(grid, time).dump(2) << '\n';
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw DomainError("bad number in field CSV: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

void write_nodal_csv(const fs::path& csv, const Grid& grid, double time,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& data) {
  if (columns.size() != data.size())
    throw DomainError("column names and data arrays differ in count");
  for (const auto& d : data)
    if (d.size() != grid.size()) throw DomainError("nodal array size mismatch");
  if (csv.has_parent_path()) fs::create_directories(csv.parent_path());
  std::ofstream out(csv);
  if (!out) throw DomainError("cannot write " + csv.string());
  for (int a = 0; a < grid.dim(); ++a) out << 'x' << (a + 1) << ',';
  for (std::size_t c = 0; c < columns.size(); ++c)
    out << columns[c] << (c + 1 < columns.size() ? "," : "\n");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec x = grid.position(i);
    for (int a = 0; a < grid.dim(); ++a) out << format_double(x[a]) << ',';
    for (std::size_t c = 0; c < data.size(); ++c)
      out << format_double(data[c][i]) << (c + 1 < data.size() ? "," : "\n");
  }
  write_manifest(csv, grid, time);
}

void write_field_csv(const fs::path& csv, const ScalarField& field,
                     const std::string& column, bool include_dt) {
  std::vector<std::string> cols{column};
  std::vector<std::vector<double>> data{
      {field.values().begin(), field.values().end()}};
  if (include_dt && field.has_dt()) {
    cols.emplace_back("ut");
    data.emplace_back(field.dt_values().begin(), field.dt_values().end());
  }
  write_nodal_csv(csv, field.grid(), field.time(), cols, data);
}

ScalarField read_field_csv(const fs::path& csv) {
  std::ifstream mf(field_manifest_path(csv));
  if (!mf) throw DomainError("missing sidecar manifest for " + csv.string());
  nlohmann::json manifest;
  try {
    mf >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("unreadable manifest: ") + e.what());
  }
  Grid grid = grid_from_manifest(manifest);
  const double time = manifest.value("time", 0.0);

  std::ifstream in(csv);
  if (!in) throw DomainError("cannot read " + csv.string());
  std::string line;
  if (!std::getline(in, line)) throw DomainError("empty field CSV");
  const auto header = split(line);
  const auto n = static_cast<std::size_t>(grid.dim());
  if (header.size() < n + 1 || header.size() > n + 2)
    throw DomainError("field CSV header has unexpected column count");
  for (std::size_t a = 0; a < n; ++a)
    if (header[a] != "x" + std::to_string(a + 1))
      throw DomainError("field CSV header must start with x1..xn");
  const bool has_ut = header.size() == n + 2;
  if (has_ut && header[n + 1] != "ut")
    throw DomainError("optional trailing column must be 'ut'");

  std::vector<double> values;
  std::vector<double> ut;
  values.reserve(grid.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw DomainError("field CSV row has wrong column count");
    values.push_back(parse_double(cells[n]));
    if (has_ut) ut.push_back(parse_double(cells[n + 1]));
  }
  if (values.size() != grid.size())
    throw DomainError("field CSV row count does not match manifest");
  if (has_ut) return ScalarField(grid, std::move(values), time, std::move(ut));
  return ScalarField(grid, std::move(values), time);
}

}  // namespace fbac
