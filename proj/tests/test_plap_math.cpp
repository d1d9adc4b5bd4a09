#include <cmath>
#include <random>

#include "doctest.h"
#include "plapreg/error.hpp"
#include "plapreg/plap_math.hpp"

using namespace plapreg;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

namespace {

Vec2 random_vec(std::mt19937_64& rng, double scale = 3.0) {
  std::uniform_real_distribution<double> U(-scale, scale);
  return {U(rng), U(rng)};
}

}  // namespace

TEST_CASE("l_eps examples") {
  CHECK(l_eps(Vec2(0.0, 0.0), 1.0) == 1.0);
  CHECK(l_eps(Vec2(3.0, 4.0), 0.0) == 5.0);
  // sqrt(25.09) from a 30-digit evaluation.
  CHECK(l_eps(Vec2(3.0, 4.0), 0.3) == doctest::Approx(5.00899191454727744602).epsilon(1e-15));
}

TEST_CASE("l_eps bounds and monotonicity in eps") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> E(0.0, 2.0);
  for (int k = 0; k < 1000; ++k) {
    const Vec2 w = random_vec(rng);
    const double eps = E(rng);
    const double l = l_eps(w, eps);
    CHECK(l >= std::max(eps, w.norm()));
    CHECK(l <= eps + w.norm() + 1e-15);
  }
  const Vec2 w(0.3, -1.2);
  double prev = l_eps(w, 1.0);
  for (double eps = 1.0; eps > 1e-9; eps *= 0.5) {
    const double l = l_eps(w, eps);
    CHECK(l <= prev);
    prev = l;
  }
  CHECK(prev == doctest::Approx(w.norm()).epsilon(1e-15));
}

TEST_CASE("Lagrangian derivatives") {
  CHECK(L_eps(Vec2(0.0, 0.0), 1.0, 3.0) == doctest::Approx(1.0 / 3.0));
  const Mat2 h0 = hess_L_eps(Vec2(0.0, 0.0), 0.5, 3.5);
  CHECK((h0 - std::pow(0.5, 1.5) * Mat2::Identity()).norm() < 1e-15);
  CHECK_THROWS_AS(hess_L_eps(Vec2(0.0, 0.0), 0.0, 3.0), SingularPoint);
  CHECK(hess_L_eps(Vec2(0.0, 0.0), 0.0, 4.0).norm() == 0.0);

  // grad_L_eps against central differences of L_eps.
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> P(2.0, 6.0), E(1e-3, 1.0);
  for (int k = 0; k < 100; ++k) {
    const Vec2 w = random_vec(rng);
    const double p = P(rng), eps = E(rng);
    const double h = 1e-5 * (1.0 + w.norm());
    const Vec2 g = grad_L_eps(w, eps, p);
    for (int i = 0; i < 2; ++i) {
      Vec2 e = Vec2::Zero();
      e[i] = h;
      const double fd = (L_eps(w + e, eps, p) - L_eps(w - e, eps, p)) / (2.0 * h);
      CHECK(std::abs(fd - g[i]) <= 1e-6 * (1.0 + g.norm()));
    }
  }
}

TEST_CASE("Hessian matches finite differences of the gradient") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> P(2.0, 6.0), E(1e-3, 1.0);
  for (int k = 0; k < 100; ++k) {
    const Vec2 w = random_vec(rng);
    const double p = P(rng), eps = E(rng);
    const double h = 1e-5 * (1.0 + w.norm());
    const Mat2 H = hess_L_eps(w, eps, p);
    Mat2 fd;
    for (int i = 0; i < 2; ++i) {
      Vec2 e = Vec2::Zero();
      e[i] = h;
      fd.col(i) = (grad_L_eps(w + e, eps, p) - grad_L_eps(w - e, eps, p)) / (2.0 * h);
    }
    CHECK((fd - H).norm() <= 1e-6 * H.norm());
  }
}

TEST_CASE("ellipticity sandwich") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> P(2.0, 6.0), E(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const Vec2 w = random_vec(rng), v = random_vec(rng);
    const double p = P(rng), eps = E(rng) + 1e-6;
    const double lp2 = std::pow(l_eps(w, eps), p - 2.0);
    const double rq = v.dot(hess_L_eps(w, eps, p) * v) / v.squaredNorm();
    CHECK(rq >= lp2 * (1.0 - 1e-12));
    CHECK(rq <= (p - 1.0) * lp2 * (1.0 + 1e-12));
  }
}

TEST_CASE("alpha and beta") {
  CHECK((alpha_s(Vec2(0.0, 2.0), 0.0, 2.0) - Vec2(0.0, 4.0)).norm() == 0.0);
  CHECK((alpha_s(Vec2(0.7, -2.0), 0.0, 1.0) - Vec2(0.7, -2.0)).norm() < 1e-15);
  CHECK((beta_theta(Vec2(0.7, -2.0), 1.0) - Vec2(0.7, -2.0)).norm() < 1e-15);
  CHECK(alpha_s(Vec2(0.0, 0.0), 0.0, 0.5).norm() == 0.0);
  CHECK(beta_theta(Vec2(0.0, 0.0), 0.3).norm() == 0.0);
  CHECK_THROWS_AS(beta_theta(Vec2(1.0, 0.0), 1.5), InvalidArgument);
  CHECK_THROWS_AS(alpha_s(Vec2(1.0, 0.0), 0.0, 0.0), InvalidArgument);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> T(0.05, 1.0);
  for (int k = 0; k < 5000; ++k) {
    const Vec2 w = random_vec(rng), v = random_vec(rng);
    const double theta = T(rng);
    const double s = 1.0 / theta;
    // Round trip beta_theta(alpha_0^{1/theta}(w)) = w.
    const Vec2 back = beta_theta(alpha_s(w, 0.0, s), theta);
    CHECK((back - w).norm() <= 1e-12 * (1.0 + w.norm()));
    // Hoelder bound with constant 2.
    CHECK((beta_theta(w, theta) - beta_theta(v, theta)).norm() <= 2.0 * std::pow((w - v).norm(), theta) * (1.0 + 1e-12));
    // Inverse lower bound.
    const double gap = (alpha_s(w, 0.0, s) - alpha_s(v, 0.0, s)).norm();
    CHECK(gap >= std::pow(2.0, -s) * std::pow((w - v).norm(), s) * (1.0 - 1e-12));
  }
}

TEST_CASE("monotonicity gap") {
  const Vec2 w(1.5, -0.5);
  CHECK(monotonicity_gap(w, w, 2.3) == 0.0);
  const double s = 1.7;
  CHECK(monotonicity_gap(w, Vec2(0.0, 0.0), s) == doctest::Approx(0.5 * std::pow(w.norm(), s + 1.0)).epsilon(1e-13));
  CHECK_THROWS_AS(monotonicity_gap(w, w, 0.5), InvalidArgument);

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> S(1.0, 4.0);
  for (int k = 0; k < 5000; ++k) {
    const Vec2 a = random_vec(rng), b = random_vec(rng);
    const double sv = S(rng);
    const double scale = (std::pow(a.norm(), sv - 1.0) + std::pow(b.norm(), sv - 1.0)) * (a - b).squaredNorm();
    CHECK(monotonicity_gap(a, b, sv) >= -1e-12 * (1.0 + scale));
  }
}

TEST_CASE("coercivity constant and the lower bound algebra") {
  CHECK(coercivity_constant(3.0, 2.0) == 1.0);
  CHECK(coercivity_constant(4.0, 2.9) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK_THROWS_AS(coercivity_constant(4.0, 3.0), InvalidArgument);
  CHECK_THROWS_AS(coercivity_constant(4.0, 1.5), InvalidArgument);

  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      const double p = 2.0 + 4.0 * i / 99.0;
      const double q = 2.0 + 0.99 * j / 99.0;
      const double lhs = 1.0 + (p - q) - (p - 2.0) * (q - 2.0);
      const double rhs = (p - 1.0) * (3.0 - q);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(rhs)));
    }
  }

  const auto zero = integrand_lower_bound_check(Mat2::Zero(), Vec2(1.0, 2.0), 0.1, 4.0, 2.5);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);
  const Mat2 H{{1.0, 0.3}, {0.3, -2.0}};
  const auto at0 = integrand_lower_bound_check(H, Vec2(0.0, 0.0), 0.5, 4.0, 2.5);
  CHECK(at0.lhs == doctest::Approx(std::pow(0.5, 1.5) * H.squaredNorm()));
  CHECK(at0.lhs >= at0.rhs);
  CHECK_THROWS_AS(integrand_lower_bound_check(Mat2{{0.0, 1.0}, {0.0, 0.0}}, Vec2(1.0, 0.0), 0.1, 4.0, 2.5),
                  InvalidArgument);
}

TEST_CASE("integrand lower bound on random data") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> P(2.0, 6.0), U(-2.0, 2.0), E(1e-3, 1.0), Q01(0.0, 0.999);
  for (int k = 0; k < 20000; ++k) {
    const double p = P(rng);
    const double q = 2.0 + Q01(rng) * std::min(1.0, p - 2.0);
    Mat2 H;
    H(0, 0) = U(rng);
    H(1, 1) = U(rng);
    H(0, 1) = H(1, 0) = U(rng);
    const auto r = integrand_lower_bound_check(H, random_vec(rng), E(rng), p, q);
    CHECK(r.lhs - r.rhs >= -1e-10 * (1.0 + std::abs(r.lhs)));
  }
}

TEST_CASE("parameter validation") {
  PLapParams ok;
  CHECK_NOTHROW(validate(ok, TheoremMode::kDegenerate));
  PLapParams sub = ok;
  sub.p = 2.5;
  sub.s = 1.2;
  CHECK_THROWS_AS(validate(sub, TheoremMode::kDegenerate), InvalidArgument);
  CHECK_NOTHROW(validate(sub, TheoremMode::kSubcubic));
  PLapParams bad = ok;
  bad.p = 1.5;
  CHECK_THROWS_AS(validate(bad, TheoremMode::kNone), InvalidArgument);
  bad = ok;
  bad.eps = -1.0;
  CHECK_THROWS_AS(validate(bad, TheoremMode::kNone), InvalidArgument);
  CHECK(parse_theorem_mode("thm2") == TheoremMode::kDegenerate);
  CHECK_THROWS_AS(parse_theorem_mode("thm9"), InvalidArgument);
  CHECK(in_theorem_range(3.0, 1.5));
  CHECK_FALSE(in_theorem_range(3.0, 1.0));
  CHECK(ok.q_proof() == doctest::Approx(2.0));
}
