#pragma once

// Pointwise maps of the regularized p-Laplace Lagrangian
//
//   l_eps(w) = (eps^2 + |w|^2)^{1/2},   L_eps(w) = l_eps(w)^p / p,
//
// the gradient transforms alpha^s_eps(w) = l_eps(w)^{s-1} w and
// beta_theta(w) = |w|^{theta-1} w, and the algebraic ingredients of the
// interior a priori estimate. Every function takes eps and p explicitly so
// parameters can be swept cheaply.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "plapreg/error.hpp"

namespace plapreg {

/// Which regularity statement a parameter bundle is validated against.
enum class TheoremMode {
  kNone,        ///< only basic ranges: p >= 2, eps >= 0, q >= 1
  kDegenerate,  ///< p >= 3 and (p-1)/2 < s <= p/2
  kSubcubic,    ///< 2 <= p < 3 and 1 <= s <= p/2
};

TheoremMode parse_theorem_mode(const std::string& name);
std::string to_string(TheoremMode mode);

/// Exponent bundle (p, eps, s, theta, q).
struct PLapParams {
  double p = 3.0;
  double eps = 1e-4;
  double s = 1.5;
  double theta = 2.0 / 3.0;
  /// Integrability exponent of the Nikol'skii seminorm.
  double q_nik = 2.0;
  /// Whether theta is meant to be range-checked against [2/p, 2/(p-1)).
  bool theta_used = false;

  /// Exponent of the weight in the a priori estimate: p - 2s + 2.
  double q_proof() const { return p - 2.0 * s + 2.0; }
  /// Conjugate exponent p / (p - 1).
  double p_conjugate() const { return p / (p - 1.0); }
};

/// Throws InvalidArgument when the bundle violates the ranges of `mode`.
void validate(const PLapParams& params, TheoremMode mode);

/// True when (p, s) lies in the admissible range of the theorem for that p:
/// (p-1)/2 < s <= p/2 for p >= 3, and 1 <= s <= p/2 for 2 <= p < 3.
bool in_theorem_range(double p, double s);

template <class Derived>
double l_eps(const Eigen::MatrixBase<Derived>& w, double eps) {
  return std::hypot(eps, w.norm());
}

template <class Derived>
double L_eps(const Eigen::MatrixBase<Derived>& w, double eps, double p) {
  return std::pow(l_eps(w, eps), p) / p;
}

/// l_eps(w)^{p-2} w.
template <class Derived>
auto grad_L_eps(const Eigen::MatrixBase<Derived>& w, double eps, double p) {
  using Vec = Eigen::Matrix<double, Derived::RowsAtCompileTime, 1>;
  const double l = l_eps(w, eps);
  if (l == 0.0) return Vec(Vec::Zero(w.rows()));
  return Vec(std::pow(l, p - 2.0) * w);
}

/// l^{p-2} I + (p-2) l^{p-4} w w^T. Undefined (SingularPoint) at eps = 0,
/// w = 0 for p < 4, where l^{p-4} has a negative power.
template <class Derived>
auto hess_L_eps(const Eigen::MatrixBase<Derived>& w, double eps, double p) {
  constexpr int R = Derived::RowsAtCompileTime;
  using Mat = Eigen::Matrix<double, R, R>;
  const double l = l_eps(w, eps);
  const auto n = w.rows();
  if (l == 0.0) {
    if (p < 4.0) throw SingularPoint("hess_L_eps: eps = 0 and w = 0 with p < 4");
    return Mat(Mat::Zero(n, n));
  }
  const double lp2 = std::pow(l, p - 2.0);
  Mat h = lp2 * Mat::Identity(n, n);
  h.noalias() += ((p - 2.0) * lp2 / (l * l)) * (w * w.transpose());
  return h;
}

/// l_eps(w)^{s-1} w, extended by 0 at l = 0.
template <class Derived>
auto alpha_s(const Eigen::MatrixBase<Derived>& w, double eps, double s) {
  using Vec = Eigen::Matrix<double, Derived::RowsAtCompileTime, 1>;
  if (!(s > 0.0)) throw InvalidArgument("alpha_s: s must be positive");
  const double l = l_eps(w, eps);
  if (l == 0.0) return Vec(Vec::Zero(w.rows()));
  return Vec(std::pow(l, s - 1.0) * w);
}

/// |w|^{theta-1} w, extended by 0 at w = 0. Inverse of alpha_s(., 0, 1/theta),
/// and theta-Hoelder with constant 2.
template <class Derived>
auto beta_theta(const Eigen::MatrixBase<Derived>& w, double theta) {
  using Vec = Eigen::Matrix<double, Derived::RowsAtCompileTime, 1>;
  if (!(theta > 0.0 && theta <= 1.0)) throw InvalidArgument("beta_theta: need 0 < theta <= 1");
  const double r = w.norm();
  if (r == 0.0) return Vec(Vec::Zero(w.rows()));
  return Vec(std::pow(r, theta - 1.0) * w);
}

/// <|w|^{s-1}w - |v|^{s-1}v, w - v> - (|w|^{s-1} + |v|^{s-1}) |w - v|^2 / 2,
/// which is nonnegative for s >= 1.
template <class DW, class DV>
double monotonicity_gap(const Eigen::MatrixBase<DW>& w, const Eigen::MatrixBase<DV>& v, double s) {
  if (!(s >= 1.0)) throw InvalidArgument("monotonicity_gap: need s >= 1");
  const double rw = w.norm();
  const double rv = v.norm();
  // 0^0 = 1 for s = 1, matching the identity map.
  const double pw = rw == 0.0 ? (s == 1.0 ? 1.0 : 0.0) : std::pow(rw, s - 1.0);
  const double pv = rv == 0.0 ? (s == 1.0 ? 1.0 : 0.0) : std::pow(rv, s - 1.0);
  const auto diff = (w - v).eval();
  const double lhs = (pw * w - pv * v).dot(diff);
  const double rhs = 0.5 * (pw + pv) * diff.squaredNorm();
  return lhs - rhs;
}

/// min(1, (p-1)(3-q)) for 2 <= q < 3.
double coercivity_constant(double p, double q);

struct LowerBoundPair {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// With l = l_eps(w) and u = w / l:
///   lhs = l^{p-q} (|H|^2 + (p-q)|H u|^2 - (p-2)(q-2) <H u, u>^2)
///   rhs = coercivity_constant(p, q) l^{p-q} |H|^2
/// where |H| is the Frobenius norm. lhs >= rhs whenever q <= p.
template <class DH, class DW>
LowerBoundPair integrand_lower_bound_check(const Eigen::MatrixBase<DH>& H,
                                           const Eigen::MatrixBase<DW>& w, double eps, double p,
                                           double q) {
  if (!(eps > 0.0)) throw InvalidArgument("integrand_lower_bound_check: eps must be positive");
  if (H.rows() != H.cols() || H.rows() != w.rows())
    throw InvalidArgument("integrand_lower_bound_check: shape mismatch");
  if ((H - H.transpose()).norm() > 1e-12 * (1.0 + H.norm()))
    throw InvalidArgument("integrand_lower_bound_check: H must be symmetric");
  const double c = coercivity_constant(p, q);
  const double l = l_eps(w, eps);
  const auto unit = (w / l).eval();
  const auto hu = (H * unit).eval();
  const double h2 = H.squaredNorm();
  const double quad = hu.dot(unit);
  const double weight = std::pow(l, p - q);
  LowerBoundPair out;
  out.lhs = weight * (h2 + (p - q) * hu.squaredNorm() - (p - 2.0) * (q - 2.0) * quad * quad);
  out.rhs = c * weight * h2;
  return out;
}

}  // namespace plapreg
