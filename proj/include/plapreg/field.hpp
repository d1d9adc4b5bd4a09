#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "plapreg/grid.hpp"

namespace plapreg {

/// One real value per grid node. Immutable after construction.
class ScalarField {
 public:
  ScalarField(Grid grid, std::vector<double> values);

  /// Samples fn at every node.
  static ScalarField from_function(const Grid& grid,
                                   const std::function<double(const std::array<double, 2>&)>& fn);
  static ScalarField constant(const Grid& grid, double value);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  int components() const { return 1; }
  double operator[](std::size_t node) const { return values_[node]; }
  std::span<const double> values() const { return values_; }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// One grid.dim()-vector per node, stored node-major (components contiguous).
class VectorField {
 public:
  VectorField(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return grid_.size(); }
  int components() const { return grid_.dim(); }
  double at(std::size_t node, int component) const {
    return values_[node * static_cast<std::size_t>(grid_.dim()) + static_cast<std::size_t>(component)];
  }
  std::span<const double> at(std::size_t node) const {
    const auto d = static_cast<std::size_t>(grid_.dim());
    return std::span<const double>(values_).subspan(node * d, d);
  }
  std::span<const double> values() const { return values_; }

  ScalarField component(int c) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Nodes whose closed max-norm box of radius delta lies inside the domain.
class InteriorMask {
 public:
  InteriorMask(Grid grid, double delta, std::vector<char> flags);

  const Grid& grid() const { return grid_; }
  double delta() const { return delta_; }
  bool operator[](std::size_t node) const { return flags_[node] != 0; }
  std::size_t count() const { return count_; }
  bool empty() const { return count_ == 0; }
  /// Node count times cell volume.
  double measure() const { return static_cast<double>(count_) * grid_.cell_volume(); }

 private:
  Grid grid_;
  double delta_;
  std::vector<char> flags_;
  std::size_t count_ = 0;
};

}  // namespace plapreg
