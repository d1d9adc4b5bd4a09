#pragma once

#include <filesystem>
#include <variant>

#include <nlohmann/json.hpp>

#include "plapreg/field.hpp"

namespace plapreg {

using AnyField = std::variant<ScalarField, VectorField>;

nlohmann::json grid_to_json(const Grid& grid);
Grid grid_from_json(const nlohmann::json& j);

/// Sidecar path holding the grid metadata of a field CSV: "u.csv" -> "u.grid.json".
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

/// Writes `x1[,x2],value` (scalar) or `x1[,x2],value1[,value2]` (vector) in
/// flat node order, plus the sidecar {dim, lower, upper, nodes}. Values are
/// written with 17 significant digits so a read-back is bit-exact.
void write_field(const std::filesystem::path& csv_path, const ScalarField& field);
void write_field(const std::filesystem::path& csv_path, const VectorField& field);

/// Reads a field written by write_field(). The number of value columns picks
/// the alternative: one column gives a ScalarField, dim columns a VectorField.
AnyField read_field(const std::filesystem::path& csv_path);

}  // namespace plapreg
