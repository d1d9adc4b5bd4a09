#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "plapreg/field.hpp"

namespace plapreg {

/// A lattice translate v = steps * h.
struct Shift {
  std::array<long, 2> steps{0, 0};
  std::array<double, 2> vec{0.0, 0.0};
  double length = 0.0;
};

Shift make_shift(const Grid& grid, long steps_x, long steps_y = 0);

/// Axis-aligned shifts of length h * 2^k up to delta, plus in 2D the two
/// diagonals (1, 1) and (1, -1) with the same step counts. Sorted by length.
std::vector<Shift> dyadic_shifts(const Grid& grid, double delta, bool diagonals = true);

/// Pass as q for the sup-norm variant.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// (sum over x in Omega_|v| of h^n |u(x+v) - u(x)|^q)^{1/q}, with Omega_|v|
/// the interior mask of radius |v| and |.| the Euclidean norm for vector
/// fields. q = kInfinity gives the maximum. Throws when the mask is empty.
double shift_difference_norm(const ScalarField& u, const Shift& v, double q);
double shift_difference_norm(const VectorField& u, const Shift& v, double q);

/// max over shifts of shift_difference_norm / |v|^theta.
double nikolskii_seminorm(const ScalarField& u, double q, double theta, const std::vector<Shift>& shifts);
double nikolskii_seminorm(const VectorField& u, double q, double theta, const std::vector<Shift>& shifts);

/// Shift lengths entering the log-log fit.
struct FitWindow {
  double min_length = 0.0;
  double max_length = kInfinity;
};

/// The default window [4h, delta/2].
FitWindow default_window(const Grid& grid, double delta);

struct SeminormReport {
  double q = 2.0;
  double delta = 0.0;
  FitWindow window;
  std::vector<Shift> shifts;
  std::vector<double> per_shift_norm;
  double fitted_theta = 0.0;
  double fitted_A = 0.0;
  double fit_r2 = 0.0;
  std::size_t fit_points = 0;
  /// Empty, "clipped" (raw slope outside [0, 1]) or "constant-like".
  std::string flag;
  double raw_slope = 0.0;
};

/// Least-squares slope of log(norm) against log|v| over shifts inside the
/// window, clipped to [0, 1]. Shifts with zero norm are left out of the fit;
/// when every norm is zero the report is flagged "constant-like" with
/// theta = 1. Throws if fewer than three distinct lengths remain.
SeminormReport fit_smoothness_exponent(const ScalarField& u, double q, const std::vector<Shift>& shifts,
                                       const FitWindow& window);
SeminormReport fit_smoothness_exponent(const VectorField& u, double q, const std::vector<Shift>& shifts,
                                       const FitWindow& window);

/// sqrt(sum over masked nodes of h^n |DV|_F^2) with DV the nodal Jacobian
/// from gradient() applied per component.
double sobolev_w12_seminorm(const VectorField& V, const InteriorMask& mask);
/// sqrt(|V|_{L2(mask)}^2 + seminorm^2).
double sobolev_w12_norm(const VectorField& V, const InteriorMask& mask);

/// Constant of the composition estimate on the lattice, calibrated on smooth
/// fields (see tests/test_smoothness.cpp) and frozen.
inline constexpr double kCompositionConstant = 1.1;

struct CompositionCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double w12_seminorm = 0.0;
  double constant = kCompositionConstant;
  double holder_constant = 2.0;
};

/// lhs = nikolskii_seminorm(beta_theta(V), 2/theta, theta, shifts) over the
/// interior, rhs = C * M * [V]_{W^{1,2}(mask)}^theta. M is the Hoelder
/// constant of beta_theta (2).
CompositionCheck composition_bound_check(const VectorField& V, double theta, double holder_constant,
                                         const InteriorMask& mask, const std::vector<Shift>& shifts,
                                         double constant = kCompositionConstant);

/// Pointwise map w -> |w|^{theta-1} w applied at every node.
VectorField apply_beta(const VectorField& V, double theta);
/// Pointwise map w -> l_eps(w)^{s-1} w applied at every node.
VectorField apply_alpha(const VectorField& W, double eps, double s);

nlohmann::json to_json(const SeminormReport& report);
/// Per-shift table: length, vx, vy, norm.
std::string per_shift_csv(const SeminormReport& report);

}  // namespace plapreg
