#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace plapreg {

/// Uniform lattice over an axis-aligned box in one or two dimensions.
///
/// Nodes are numbered row-major with the first axis varying fastest, so in
/// 2D the node (i, j) has flat index i + j * nodes(0).
class Grid {
 public:
  static constexpr int kMaxDim = 2;

  Grid(std::vector<double> lower, std::vector<double> upper,
       std::vector<std::size_t> nodes);

  static Grid line(double lower, double upper, std::size_t nodes);
  static Grid square(double lower, double upper, std::size_t nodes_per_axis);

  int dim() const { return dim_; }
  double lower(int axis) const { return lower_[axis]; }
  double upper(int axis) const { return upper_[axis]; }
  double spacing(int axis) const { return h_[axis]; }
  std::size_t nodes(int axis) const { return n_[axis]; }
  std::size_t size() const { return size_; }

  /// Smallest spacing over all axes.
  double min_spacing() const;
  /// Product of spacings: the volume attached to one node in a uniform sum.
  double cell_volume() const;
  /// Volume of the box.
  double measure() const;

  std::size_t index(std::size_t i, std::size_t j = 0) const { return i + j * n_[0]; }
  std::array<std::size_t, 2> multi_index(std::size_t flat) const {
    return {flat % n_[0], dim_ == 2 ? flat / n_[0] : 0};
  }
  double coord(int axis, std::size_t i) const { return lower_[axis] + static_cast<double>(i) * h_[axis]; }
  /// Coordinates of a flat node index; unused axes are zero.
  std::array<double, 2> point(std::size_t flat) const;

  bool on_boundary(std::size_t flat) const;

  /// Trapezoid quadrature weight of a node.
  double trapezoid_weight(std::size_t flat) const;

  friend bool operator==(const Grid& a, const Grid& b);
  friend bool operator!=(const Grid& a, const Grid& b) { return !(a == b); }

 private:
  int dim_;
  std::array<double, 2> lower_{};
  std::array<double, 2> upper_{};
  std::array<std::size_t, 2> n_{1, 1};
  std::array<double, 2> h_{1.0, 1.0};
  std::size_t size_;
};

}  // namespace plapreg
