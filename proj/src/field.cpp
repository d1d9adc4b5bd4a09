#include "plapreg/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "plapreg/error.hpp"

namespace plapreg {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i]))
      throw NonFiniteValue(std::string(what) + ": non-finite value at entry " + std::to_string(i));
}

}  // namespace

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw InvalidArgument("ScalarField: expected " + std::to_string(grid_.size()) +
                          " values, got " + std::to_string(values_.size()));
  require_finite(values_, "ScalarField");
}

ScalarField ScalarField::from_function(
    const Grid& grid, const std::function<double(const std::array<double, 2>&)>& fn) {
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(grid.point(k));
  return ScalarField(grid, std::move(v));
}

ScalarField ScalarField::constant(const Grid& grid, double value) {
  return ScalarField(grid, std::vector<double>(grid.size(), value));
}

VectorField::VectorField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  const std::size_t expected = grid_.size() * static_cast<std::size_t>(grid_.dim());
  if (values_.size() != expected)
    throw InvalidArgument("VectorField: expected " + std::to_string(expected) + " entries, got " +
                          std::to_string(values_.size()));
  require_finite(values_, "VectorField");
}

ScalarField VectorField::component(int c) const {
  if (c < 0 || c >= grid_.dim()) throw InvalidArgument("VectorField::component: index out of range");
  std::vector<double> v(grid_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = at(k, c);
  return ScalarField(grid_, std::move(v));
}

InteriorMask::InteriorMask(Grid grid, double delta, std::vector<char> flags)
    : grid_(std::move(grid)), delta_(delta), flags_(std::move(flags)) {
  if (flags_.size() != grid_.size()) throw InvalidArgument("InteriorMask: flag count mismatch");
  count_ = static_cast<std::size_t>(std::count_if(flags_.begin(), flags_.end(), [](char c) { return c != 0; }));
}

}  // namespace plapreg
