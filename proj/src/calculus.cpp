#include "plapreg/calculus.hpp"

#include <cmath>
#include <vector>

#include "plapreg/error.hpp"

namespace plapreg {

namespace {

// Derivative along `axis` of the strided sequence values[offset + k * stride],
// k = 0..n-1, written into out with the same layout.
template <class In, class Out>
void differentiate_line(In in, Out out, std::size_t n, double h) {
  const double inv2h = 0.5 / h;
  out(0) = (-3.0 * in(0) + 4.0 * in(1) - in(2)) * inv2h;
  for (std::size_t k = 1; k + 1 < n; ++k) out(k) = (in(k + 1) - in(k - 1)) * inv2h;
  out(n - 1) = (3.0 * in(n - 1) - 4.0 * in(n - 2) + in(n - 3)) * inv2h;
}

// Applies the 1D operator along `axis` to a scalar array (one value per node).
std::vector<double> axis_derivative(const Grid& grid, std::span<const double> values,
                                    std::size_t stride_in_values, std::size_t component, int axis) {
  std::vector<double> result(grid.size());
  const std::size_t nx = grid.nodes(0);
  const std::size_t ny = grid.dim() == 2 ? grid.nodes(1) : 1;
  const double h = grid.spacing(axis);
  auto value = [&](std::size_t node) { return values[node * stride_in_values + component]; };
  if (axis == 0) {
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t base = j * nx;
      differentiate_line([&](std::size_t k) { return value(base + k); },
                         [&](std::size_t k) -> double& { return result[base + k]; }, nx, h);
    }
  } else {
    for (std::size_t i = 0; i < nx; ++i) {
      differentiate_line([&](std::size_t k) { return value(i + k * nx); },
                         [&](std::size_t k) -> double& { return result[i + k * nx]; }, ny, h);
    }
  }
  return result;
}

}  // namespace

VectorField gradient(const ScalarField& u) {
  const Grid& grid = u.grid();
  const auto d = static_cast<std::size_t>(grid.dim());
  std::vector<double> out(grid.size() * d);
  for (int a = 0; a < grid.dim(); ++a) {
    const auto da = axis_derivative(grid, u.values(), 1, 0, a);
    for (std::size_t k = 0; k < grid.size(); ++k) out[k * d + static_cast<std::size_t>(a)] = da[k];
  }
  return VectorField(grid, std::move(out));
}

ScalarField divergence(const VectorField& field) {
  const Grid& grid = field.grid();
  const auto d = static_cast<std::size_t>(grid.dim());
  std::vector<double> out(grid.size(), 0.0);
  for (int a = 0; a < grid.dim(); ++a) {
    const auto da = axis_derivative(grid, field.values(), d, static_cast<std::size_t>(a), a);
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] += da[k];
  }
  return ScalarField(grid, std::move(out));
}

InteriorMask interior_mask(const Grid& grid, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw InvalidArgument("interior_mask: delta must be positive and finite");
  std::vector<char> flags(grid.size(), 0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto ij = grid.multi_index(k);
    bool inside = true;
    for (int a = 0; a < grid.dim() && inside; ++a) {
      // Node coordinates are exact multiples of h; the slack absorbs rounding
      // when delta itself is a lattice distance.
      const double slack = 1e-9 * grid.spacing(a);
      const double x = grid.coord(a, ij[a]);
      inside = (x - grid.lower(a) >= delta - slack) && (grid.upper(a) - x >= delta - slack);
    }
    flags[k] = inside ? 1 : 0;
  }
  return InteriorMask(grid, delta, std::move(flags));
}

InteriorMask full_mask(const Grid& grid) {
  return InteriorMask(grid, 0.0, std::vector<char>(grid.size(), 1));
}

double inner(const ScalarField& a, const ScalarField& b) {
  if (a.grid() != b.grid()) throw InvalidArgument("inner: grid mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a.grid().trapezoid_weight(k) * a[k] * b[k];
  return sum;
}

double inner(const VectorField& a, const VectorField& b) {
  if (a.grid() != b.grid()) throw InvalidArgument("inner: grid mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double dot = 0.0;
    for (int c = 0; c < a.components(); ++c) dot += a.at(k, c) * b.at(k, c);
    sum += a.grid().trapezoid_weight(k) * dot;
  }
  return sum;
}

double integration_by_parts_defect(const VectorField& field, const ScalarField& phi) {
  const Grid& grid = field.grid();
  if (grid != phi.grid()) throw InvalidArgument("integration_by_parts_defect: grid mismatch");
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (grid.on_boundary(k) && phi[k] != 0.0)
      throw InvalidArgument("integration_by_parts_defect: phi must vanish on the boundary");

  const std::size_t nx = grid.nodes(0);
  const std::size_t ny = grid.dim() == 2 ? grid.nodes(1) : 1;
  auto line_defect = [](double f0, double p1, double p2, double fn, double pn1, double pn2) {
    return 0.25 * (f0 * (2.0 * p1 - p2) - fn * (2.0 * pn1 - pn2));
  };
  auto transverse_weight = [&](int axis, std::size_t k) {
    if (grid.dim() == 1) return 1.0;
    const int other = 1 - axis;
    const bool end = k == 0 || k + 1 == grid.nodes(other);
    return end ? 0.5 * grid.spacing(other) : grid.spacing(other);
  };

  double total = 0.0;
  for (std::size_t j = 0; j < ny; ++j) {
    auto F = [&](std::size_t i) { return field.at(grid.index(i, j), 0); };
    auto P = [&](std::size_t i) { return phi[grid.index(i, j)]; };
    total += transverse_weight(0, j) *
             line_defect(F(0), P(1), P(2), F(nx - 1), P(nx - 2), P(nx - 3));
  }
  if (grid.dim() == 2) {
    for (std::size_t i = 0; i < nx; ++i) {
      auto F = [&](std::size_t j) { return field.at(grid.index(i, j), 1); };
      auto P = [&](std::size_t j) { return phi[grid.index(i, j)]; };
      total += transverse_weight(1, i) *
               line_defect(F(0), P(1), P(2), F(ny - 1), P(ny - 2), P(ny - 3));
    }
  }
  return total;
}

}  // namespace plapreg
