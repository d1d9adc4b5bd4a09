#include "plapreg/grid.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "plapreg/error.hpp"

namespace plapreg {

Grid::Grid(std::vector<double> lower, std::vector<double> upper,
           std::vector<std::size_t> nodes) {
  if (lower.size() != upper.size() || lower.size() != nodes.size())
    throw InvalidArgument("Grid: lower, upper and nodes must have the same length");
  if (lower.empty() || lower.size() > kMaxDim)
    throw InvalidArgument("Grid: dimension must be 1 or 2, got " + std::to_string(lower.size()));
  dim_ = static_cast<int>(lower.size());
  size_ = 1;
  for (int a = 0; a < dim_; ++a) {
    if (!std::isfinite(lower[a]) || !std::isfinite(upper[a]) || !(upper[a] > lower[a]))
      throw InvalidArgument("Grid: need finite bounds with upper > lower on axis " + std::to_string(a));
    if (nodes[a] < 3)
      throw InvalidArgument("Grid: need at least 3 nodes per axis");
    if (size_ > std::numeric_limits<std::size_t>::max() / nodes[a])
      throw InvalidArgument("Grid: node count overflows");
    lower_[a] = lower[a];
    upper_[a] = upper[a];
    n_[a] = nodes[a];
    h_[a] = (upper[a] - lower[a]) / static_cast<double>(nodes[a] - 1);
    size_ *= nodes[a];
  }
}

Grid Grid::line(double lower, double upper, std::size_t nodes) {
  return Grid({lower}, {upper}, {nodes});
}

Grid Grid::square(double lower, double upper, std::size_t nodes_per_axis) {
  return Grid({lower, lower}, {upper, upper}, {nodes_per_axis, nodes_per_axis});
}

double Grid::min_spacing() const {
  return dim_ == 1 ? h_[0] : std::min(h_[0], h_[1]);
}

double Grid::cell_volume() const {
  return dim_ == 1 ? h_[0] : h_[0] * h_[1];
}

double Grid::measure() const {
  double m = 1.0;
  for (int a = 0; a < dim_; ++a) m *= upper_[a] - lower_[a];
  return m;
}

std::array<double, 2> Grid::point(std::size_t flat) const {
  const auto ij = multi_index(flat);
  std::array<double, 2> x{0.0, 0.0};
  for (int a = 0; a < dim_; ++a) x[a] = coord(a, ij[a]);
  return x;
}

bool Grid::on_boundary(std::size_t flat) const {
  const auto ij = multi_index(flat);
  for (int a = 0; a < dim_; ++a)
    if (ij[a] == 0 || ij[a] + 1 == n_[a]) return true;
  return false;
}

double Grid::trapezoid_weight(std::size_t flat) const {
  const auto ij = multi_index(flat);
  double w = 1.0;
  for (int a = 0; a < dim_; ++a) {
    const bool end = ij[a] == 0 || ij[a] + 1 == n_[a];
    w *= end ? 0.5 * h_[a] : h_[a];
  }
  return w;
}

bool operator==(const Grid& a, const Grid& b) {
  if (a.dim_ != b.dim_) return false;
  for (int k = 0; k < a.dim_; ++k)
    if (a.lower_[k] != b.lower_[k] || a.upper_[k] != b.upper_[k] || a.n_[k] != b.n_[k])
      return false;
  return true;
}

}  // namespace plapreg
