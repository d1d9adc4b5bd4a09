#include "plapreg/field_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "plapreg/error.hpp"

namespace plapreg {

namespace fs = std::filesystem;

nlohmann::json grid_to_json(const Grid& grid) {
  nlohmann::json j;
  j["dim"] = grid.dim();
  std::vector<double> lower, upper;
  std::vector<std::size_t> nodes;
  for (int a = 0; a < grid.dim(); ++a) {
    lower.push_back(grid.lower(a));
    upper.push_back(grid.upper(a));
    nodes.push_back(grid.nodes(a));
  }
  j["lower"] = lower;
  j["upper"] = upper;
  j["nodes"] = nodes;
  return j;
}

Grid grid_from_json(const nlohmann::json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    auto lower = j.at("lower").get<std::vector<double>>();
    auto upper = j.at("upper").get<std::vector<double>>();
    auto nodes = j.at("nodes").get<std::vector<std::size_t>>();
    if (static_cast<int>(lower.size()) != dim)
      throw InvalidArgument("grid metadata: dim does not match bound count");
    return Grid(std::move(lower), std::move(upper), std::move(nodes));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("grid metadata: ") + e.what());
  }
}

fs::path sidecar_path(const fs::path& csv_path) {
  fs::path p = csv_path;
  p.replace_extension(".grid.json");
  return p;
}

namespace {

void write_sidecar(const fs::path& csv_path, const Grid& grid) {
  std::ofstream out(sidecar_path(csv_path));
  if (!out) throw IoError("cannot write " + sidecar_path(csv_path).string());
  out << grid_to_json(grid).dump(2) << '\n';
}

void write_rows(const fs::path& csv_path, const Grid& grid, int components,
                std::span<const double> values) {
  std::ofstream out(csv_path);
  if (!out) throw IoError("cannot write " + csv_path.string());
  out << "x1";
  if (grid.dim() == 2) out << ",x2";
  if (components == 1) {
    out << ",value";
  } else {
    for (int c = 0; c < components; ++c) out << ",value" << (c + 1);
  }
  out << '\n';
  char buf[64];
  const auto nc = static_cast<std::size_t>(components);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto x = grid.point(k);
    std::string line;
    for (int a = 0; a < grid.dim(); ++a) {
      std::snprintf(buf, sizeof buf, "%.17g", x[a]);
      if (a) line += ',';
      line += buf;
    }
    for (std::size_t c = 0; c < nc; ++c) {
      std::snprintf(buf, sizeof buf, ",%.17g", values[k * nc + c]);
      line += buf;
    }
    out << line << '\n';
  }
  if (!out) throw IoError("write failed: " + csv_path.string());
  write_sidecar(csv_path, grid);
}

}  // namespace

void write_field(const fs::path& csv_path, const ScalarField& field) {
  write_rows(csv_path, field.grid(), 1, field.values());
}

void write_field(const fs::path& csv_path, const VectorField& field) {
  write_rows(csv_path, field.grid(), field.components(), field.values());
}

AnyField read_field(const fs::path& csv_path) {
  std::ifstream meta(sidecar_path(csv_path));
  if (!meta) throw IoError("missing grid sidecar " + sidecar_path(csv_path).string());
  nlohmann::json j;
  try {
    meta >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed grid sidecar: " + std::string(e.what()));
  }
  const Grid grid = grid_from_json(j);

  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot read " + csv_path.string());
  std::string header;
  std::getline(in, header);
  const auto columns = static_cast<int>(std::count(header.begin(), header.end(), ',')) + 1;
  const int components = columns - grid.dim();
  if (components != 1 && components != grid.dim())
    throw IoError("field CSV: header has " + std::to_string(columns) + " columns for a " +
                  std::to_string(grid.dim()) + "D grid");

  std::vector<double> values;
  values.reserve(grid.size() * static_cast<std::size_t>(components));
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int col = 0;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      try {
        v = std::stod(cell);
      } catch (const std::exception&) {
        throw IoError("field CSV: bad number '" + cell + "' on row " + std::to_string(row + 1));
      }
      if (col >= grid.dim()) values.push_back(v);
      ++col;
    }
    if (col != columns) throw IoError("field CSV: wrong column count on row " + std::to_string(row + 1));
    ++row;
  }
  if (row != grid.size())
    throw IoError("field CSV: expected " + std::to_string(grid.size()) + " rows, got " + std::to_string(row));
  if (components == 1) return ScalarField(grid, std::move(values));
  return VectorField(grid, std::move(values));
}

}  // namespace plapreg
