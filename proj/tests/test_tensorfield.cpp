#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "plapreg/calculus.hpp"
#include "plapreg/error.hpp"
#include "plapreg/field_io.hpp"

using namespace plapreg;
namespace fs = std::filesystem;

namespace {

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("grid validation and geometry") {
  CHECK_THROWS_AS(Grid::line(0.0, 1.0, 2), InvalidArgument);
  CHECK_THROWS_AS(Grid::line(1.0, 0.0, 5), InvalidArgument);
  const Grid g = Grid::square(-1.0, 1.0, 5);
  CHECK(g.size() == 25);
  CHECK(g.spacing(0) == doctest::Approx(0.5));
  CHECK(g.measure() == doctest::Approx(4.0));
  CHECK(g.on_boundary(g.index(0, 2)));
  CHECK_FALSE(g.on_boundary(g.index(2, 2)));
  double total = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) total += g.trapezoid_weight(k);
  CHECK(total == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("gradient of constant and affine fields") {
  const Grid g = Grid::square(-1.0, 2.0, 9);
  const auto zero = gradient(ScalarField::constant(g, 3.5));
  CHECK(max_abs(zero.values()) == 0.0);

  const auto x1 = ScalarField::from_function(g, [](const auto& x) { return x[0]; });
  const auto d = gradient(x1);
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(d.at(k, 0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(d.at(k, 1)) < 1e-13);
  }
}

TEST_CASE("gradient of sin is second order") {
  // Max error against cos on [0, 2]; halving h must cut it by ~4.
  auto err = [](std::size_t n) {
    const Grid g = Grid::line(0.0, 2.0, n);
    const auto d = gradient(ScalarField::from_function(g, [](const auto& x) { return std::sin(x[0]); }));
    double e = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) e = std::max(e, std::abs(d.at(k, 0) - std::cos(g.point(k)[0])));
    return e;
  };
  const double e1 = err(201);  // h = 0.01
  const double e2 = err(401);
  CHECK(e1 < 0.5 * 0.01 * 0.01);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("divergence of constant and affine fields") {
  const Grid g = Grid::square(0.0, 1.0, 7);
  std::vector<double> c(2 * g.size(), 0.0);
  std::vector<double> a(2 * g.size(), 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    c[2 * k] = 2.0;
    c[2 * k + 1] = -1.0;
    a[2 * k] = g.point(k)[0];
  }
  CHECK(max_abs(divergence(VectorField(g, c)).values()) == 0.0);
  const auto div = divergence(VectorField(g, a));
  for (double v : div.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("divergence of the sharp flux is one") {
  // u = |x|^{3/2} / (3/2) has flux |u'| u' = x, whose divergence is 1. The
  // flux is smooth, so the stencil reproduces it exactly.
  const Grid g = Grid::line(-1.0, 1.0, 2049);
  std::vector<double> flux(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double x = g.point(k)[0];
    const double du = std::copysign(std::sqrt(std::abs(x)), x);
    flux[k] = std::abs(du) * du;
  }
  const auto div = divergence(VectorField(g, flux));
  for (double v : div.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("integration by parts defect is the documented boundary term") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (const Grid& g : {Grid::line(0.0, 1.0, 33), Grid::square(-1.0, 1.0, 17)}) {
    std::vector<double> fv(g.size() * static_cast<std::size_t>(g.dim()));
    for (auto& v : fv) v = U(rng);
    std::vector<double> pv(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) pv[k] = g.on_boundary(k) ? 0.0 : U(rng);
    const VectorField F(g, fv);
    const ScalarField phi(g, pv);
    const double direct = inner(F, gradient(phi)) + inner(divergence(F), phi);
    const double predicted = integration_by_parts_defect(F, phi);
    CHECK(direct == doctest::Approx(predicted).epsilon(1e-12).scale(1.0));
    // Vanishing phi near the boundary removes the defect altogether.
    std::vector<double> inner_phi(pv);
    for (std::size_t k = 0; k < g.size(); ++k) {
      for (int a = 0; a < g.dim(); ++a) {
        const auto i = g.multi_index(k)[static_cast<std::size_t>(a)];
        if (i < 3 || i + 3 >= g.nodes(a)) inner_phi[k] = 0.0;
      }
    }
    const ScalarField phi2(g, inner_phi);
    CHECK(std::abs(inner(F, gradient(phi2)) + inner(divergence(F), phi2)) < 1e-13);
  }
}

TEST_CASE("interior masks") {
  const Grid g = Grid::line(-1.0, 1.0, 41);
  const auto tiny = interior_mask(g, 1e-6);
  CHECK(tiny.count() == 39);
  const auto half = interior_mask(g, 0.5);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(half[k] == (std::abs(g.point(k)[0]) <= 0.5 + 1e-12));
  CHECK(interior_mask(g, 2.0).empty());
  CHECK_THROWS_AS(interior_mask(g, 0.0), InvalidArgument);

  const Grid sq = Grid::square(0.0, 1.0, 21);
  const double deltas[] = {0.01, 0.1, 0.2, 0.35, 0.5};
  for (std::size_t d = 0; d + 1 < std::size(deltas); ++d) {
    const auto wide = interior_mask(sq, deltas[d]);
    const auto narrow = interior_mask(sq, deltas[d + 1]);
    for (std::size_t k = 0; k < sq.size(); ++k)
      if (narrow[k]) CHECK(wide[k]);
  }
}

TEST_CASE("fields reject non-finite values and bad sizes") {
  const Grid g = Grid::line(0.0, 1.0, 4);
  CHECK_THROWS_AS(ScalarField(g, {0.0, NAN, 1.0, 2.0}), NonFiniteValue);
  CHECK_THROWS_AS(ScalarField(g, {0.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(VectorField(g, {0.0, INFINITY, 1.0, 2.0}), NonFiniteValue);
}

TEST_CASE("field CSV round trip") {
  const fs::path dir = fs::temp_directory_path() / "plapreg_test_io";
  fs::create_directories(dir);
  const Grid g = Grid::square(-1.0, 1.0, 6);
  const auto u = ScalarField::from_function(g, [](const auto& x) { return std::exp(x[0]) * std::sin(3.0 * x[1]) / 7.0; });
  write_field(dir / "u.csv", u);
  CHECK(fs::exists(sidecar_path(dir / "u.csv")));
  CHECK(sidecar_path(dir / "u.csv").filename() == "u.grid.json");
  const auto back = std::get<ScalarField>(read_field(dir / "u.csv"));
  CHECK(back.grid() == g);
  CHECK(max_abs_diff(back.values(), u.values()) == 0.0);

  const auto du = gradient(u);
  write_field(dir / "du.csv", du);
  const auto dback = std::get<VectorField>(read_field(dir / "du.csv"));
  CHECK(max_abs_diff(dback.values(), du.values()) == 0.0);

  CHECK_THROWS_AS(read_field(dir / "missing.csv"), IoError);
  fs::remove_all(dir);
}
