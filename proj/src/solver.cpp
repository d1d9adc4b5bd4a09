#include "plapreg/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "plapreg/error.hpp"

namespace plapreg {

namespace {

// Neumaier-compensated sum; keeps energy differences resolvable near the
// minimizer where Newton decrements approach machine precision.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
    else comp_ += (x - t) + sum_;
    sum_ = t;
    magnitude_ += std::abs(x);
  }
  double value() const { return sum_ + comp_; }
  double magnitude() const { return magnitude_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
  double magnitude_ = 0.0;
};

// A piece of the domain on which the discrete gradient is constant: a cell
// in 1D, a corner triangle in 2D. grad_a = sum_k coef[a][k] * u[nodes[k]].
struct Element {
  std::array<std::size_t, 3> nodes{};
  int count = 0;
  std::array<std::array<double, 3>, 2> coef{};
  double weight = 0.0;
};

// Each 2D cell contributes its four corner triangles with weight hx*hy/4.
// That is the average of the two diagonal P1 splittings, so the scheme has
// no preferred diagonal and reduces to the 1D cell scheme for fields that
// depend on x1 only.
std::vector<Element> build_elements(const Grid& grid) {
  std::vector<Element> elements;
  if (grid.dim() == 1) {
    const double h = grid.spacing(0);
    elements.reserve(grid.nodes(0) - 1);
    for (std::size_t i = 0; i + 1 < grid.nodes(0); ++i) {
      Element e;
      e.nodes = {i, i + 1, 0};
      e.count = 2;
      e.coef[0] = {-1.0 / h, 1.0 / h, 0.0};
      e.weight = h;
      elements.push_back(e);
    }
    return elements;
  }
  const double hx = grid.spacing(0);
  const double hy = grid.spacing(1);
  elements.reserve(4 * (grid.nodes(0) - 1) * (grid.nodes(1) - 1));
  for (std::size_t j = 0; j + 1 < grid.nodes(1); ++j) {
    for (std::size_t i = 0; i + 1 < grid.nodes(0); ++i) {
      for (std::size_t b = 0; b < 2; ++b) {
        for (std::size_t a = 0; a < 2; ++a) {
          Element e;
          const std::size_t corner = grid.index(i + a, j + b);
          const std::size_t xn = grid.index(i + 1 - a, j + b);
          const std::size_t yn = grid.index(i + a, j + 1 - b);
          const double sx = a == 0 ? 1.0 : -1.0;
          const double sy = b == 0 ? 1.0 : -1.0;
          e.nodes = {corner, xn, yn};
          e.count = 3;
          e.coef[0] = {-sx / hx, sx / hx, 0.0};
          e.coef[1] = {-sy / hy, 0.0, sy / hy};
          e.weight = 0.25 * hx * hy;
          elements.push_back(e);
        }
      }
    }
  }
  return elements;
}

using Vec2 = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2, 1>;

class DiscreteEnergy {
 public:
  explicit DiscreteEnergy(const ProblemSpec& spec)
      : spec_(spec), grid_(spec.grid), elements_(build_elements(spec.grid)) {
    unknown_of_node_.assign(grid_.size(), -1);
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      if (!grid_.on_boundary(k)) {
        unknown_of_node_[k] = static_cast<long>(interior_.size());
        interior_.push_back(k);
      }
    }
  }

  std::size_t unknowns() const { return interior_.size(); }
  const std::vector<std::size_t>& interior() const { return interior_; }
  long unknown(std::size_t node) const { return unknown_of_node_[node]; }
  const std::vector<Element>& elements() const { return elements_; }

  Vec2 element_gradient(const Element& e, std::span<const double> u) const {
    Vec2 g(grid_.dim());
    for (int a = 0; a < grid_.dim(); ++a) {
      double s = 0.0;
      for (int k = 0; k < e.count; ++k) s += e.coef[a][k] * u[e.nodes[k]];
      g[a] = s;
    }
    return g;
  }

  // Returns the energy and the magnitude sum of its terms (a roundoff scale).
  std::pair<double, double> value(std::span<const double> u) const {
    const double eps = spec_.params.eps;
    const double p = spec_.params.p;
    CompensatedSum sum;
    for (const auto& e : elements_) sum.add(e.weight * L_eps(element_gradient(e, u), eps, p));
    const auto f = spec_.f.values();
    for (std::size_t k = 0; k < grid_.size(); ++k) sum.add(grid_.trapezoid_weight(k) * u[k] * f[k]);
    return {sum.value(), sum.magnitude()};
  }

  // Derivative of value() with respect to every node value.
  std::vector<double> full_gradient(std::span<const double> u) const {
    const double eps = spec_.params.eps;
    const double p = spec_.params.p;
    std::vector<double> grad(grid_.size(), 0.0);
    const auto f = spec_.f.values();
    for (std::size_t k = 0; k < grid_.size(); ++k) grad[k] = grid_.trapezoid_weight(k) * f[k];
    for (const auto& e : elements_) {
      const Vec2 flux = grad_L_eps(element_gradient(e, u), eps, p);
      for (int k = 0; k < e.count; ++k) {
        double s = 0.0;
        for (int a = 0; a < grid_.dim(); ++a) s += e.coef[a][k] * flux[a];
        grad[e.nodes[k]] += e.weight * s;
      }
    }
    return grad;
  }

  Eigen::VectorXd reduced_gradient(std::span<const double> u) const {
    const auto full = full_gradient(u);
    Eigen::VectorXd r(static_cast<Eigen::Index>(interior_.size()));
    for (std::size_t m = 0; m < interior_.size(); ++m) r[static_cast<Eigen::Index>(m)] = full[interior_[m]];
    return r;
  }

  // Hessian restricted to interior unknowns. `dirichlet` replaces L_eps by
  // |w|^2 / 2, giving the discrete Laplacian used for the initial guess.
  Eigen::SparseMatrix<double> reduced_hessian(std::span<const double> u, bool dirichlet) const {
    const double eps = spec_.params.eps;
    const double p = spec_.params.p;
    const int d = grid_.dim();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(elements_.size() * 9);
    Eigen::MatrixXd H(d, d);
    for (const auto& e : elements_) {
      if (dirichlet) H.setIdentity();
      else H = hess_L_eps(element_gradient(e, u), eps, p);
      for (int r = 0; r < e.count; ++r) {
        const long ur = unknown_of_node_[e.nodes[r]];
        if (ur < 0) continue;
        for (int c = 0; c < e.count; ++c) {
          const long uc = unknown_of_node_[e.nodes[c]];
          if (uc < 0) continue;
          double s = 0.0;
          for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) s += e.coef[a][r] * H(a, b) * e.coef[b][c];
          triplets.emplace_back(ur, uc, e.weight * s);
        }
      }
    }
    const auto n = static_cast<Eigen::Index>(interior_.size());
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
  }

  double residual_rms(std::span<const double> u) const {
    const auto full = full_gradient(u);
    if (interior_.empty()) return 0.0;
    double sum = 0.0;
    const double w = grid_.cell_volume();
    for (std::size_t k : interior_) {
      const double r = full[k] / w;
      sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(interior_.size()));
  }

 private:
  const ProblemSpec& spec_;
  const Grid& grid_;
  std::vector<Element> elements_;
  std::vector<long> unknown_of_node_;
  std::vector<std::size_t> interior_;
};

void check_boundary(const ProblemSpec& spec, const ScalarField& u) {
  if (u.grid() != spec.grid) throw InvalidArgument("field grid does not match the problem grid");
  for (std::size_t k = 0; k < spec.grid.size(); ++k) {
    if (!spec.grid.on_boundary(k)) continue;
    const double g = spec.g[k];
    if (std::abs(u[k] - g) > 1e-12 * (1.0 + std::abs(g))) {
      std::ostringstream msg;
      msg << "boundary mismatch at node " << k << ": u = " << u[k] << ", g = " << g;
      throw InvalidArgument(msg.str());
    }
  }
}

double rms(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

ProblemSpec make_problem(Grid grid, PLapParams params, ScalarField f, ScalarField g) {
  if (f.grid() != grid || g.grid() != grid)
    throw InvalidArgument("make_problem: f and g must live on the problem grid");
  validate(params, TheoremMode::kNone);
  return ProblemSpec{std::move(grid), params, std::move(f), std::move(g)};
}

double energy(const ProblemSpec& spec, const ScalarField& u) {
  check_boundary(spec, u);
  return DiscreteEnergy(spec).value(u.values()).first;
}

double el_residual(const ProblemSpec& spec, const ScalarField& u) {
  if (u.grid() != spec.grid) throw InvalidArgument("el_residual: grid mismatch");
  return DiscreteEnergy(spec).residual_rms(u.values());
}

ScalarField el_residual_field(const ProblemSpec& spec, const ScalarField& u) {
  if (u.grid() != spec.grid) throw InvalidArgument("el_residual_field: grid mismatch");
  const auto full = DiscreteEnergy(spec).full_gradient(u.values());
  std::vector<double> r(spec.grid.size(), 0.0);
  const double w = spec.grid.cell_volume();
  for (std::size_t k = 0; k < r.size(); ++k)
    if (!spec.grid.on_boundary(k)) r[k] = full[k] / w;
  return ScalarField(spec.grid, std::move(r));
}

double energy_upper_bound(const ProblemSpec& spec, const ScalarField& u0) {
  if (spec.params.eps > 1.0) throw InvalidArgument("energy_upper_bound: requires eps <= 1");
  check_boundary(spec, u0);
  const DiscreteEnergy discrete(spec);
  const double p = spec.params.p;
  CompensatedSum sum;
  for (const auto& e : discrete.elements())
    sum.add(e.weight * std::pow(1.0 + discrete.element_gradient(e, u0.values()).squaredNorm(), 0.5 * p) / p);
  for (std::size_t k = 0; k < spec.grid.size(); ++k)
    sum.add(spec.grid.trapezoid_weight(k) * u0[k] * spec.f[k]);
  return sum.value();
}

double residual_tolerance(const ProblemSpec& spec, const SolverOptions& options) {
  return options.res_rel * rms(spec.f.values()) + options.res_abs;
}

ScalarField boundary_extension(const ProblemSpec& spec) {
  const DiscreteEnergy discrete(spec);
  std::vector<double> u(spec.grid.size(), 0.0);
  for (std::size_t k = 0; k < u.size(); ++k)
    if (spec.grid.on_boundary(k)) u[k] = spec.g[k];
  if (discrete.unknowns() == 0) return ScalarField(spec.grid, std::move(u));

  // Gradient of the Dirichlet energy sum_e w_e |grad_e u|^2 / 2 at the
  // zero-interior field; solving A x = -r gives the harmonic interior.
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(discrete.unknowns()));
  for (const auto& e : discrete.elements()) {
    const Vec2 g = discrete.element_gradient(e, u);
    for (int k = 0; k < e.count; ++k) {
      const long m = discrete.unknown(e.nodes[k]);
      if (m < 0) continue;
      double s = 0.0;
      for (int a = 0; a < spec.grid.dim(); ++a) s += e.coef[a][k] * g[a];
      rhs[m] -= e.weight * s;
    }
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(discrete.reduced_hessian(u, true));
  if (ldlt.info() != Eigen::Success) throw Error("boundary_extension: Laplacian factorization failed");
  const Eigen::VectorXd x = ldlt.solve(rhs);
  for (std::size_t m = 0; m < discrete.interior().size(); ++m)
    u[discrete.interior()[m]] = x[static_cast<Eigen::Index>(m)];
  return ScalarField(spec.grid, std::move(u));
}

double w1p_norm(const ScalarField& u, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("w1p_norm: need p >= 1");
  const Grid& grid = u.grid();
  const auto elements = build_elements(grid);
  double sum = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) sum += grid.trapezoid_weight(k) * std::pow(std::abs(u[k]), p);
  for (const auto& e : elements) {
    double g2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      double s = 0.0;
      for (int k = 0; k < e.count; ++k) s += e.coef[a][k] * u[e.nodes[k]];
      g2 += s * s;
    }
    sum += e.weight * std::pow(g2, 0.5 * p);
  }
  return std::pow(sum, 1.0 / p);
}

SolveResult solve(const ProblemSpec& spec, const SolverOptions& options) {
  if (!(spec.params.eps > 0.0)) throw InvalidArgument("solve: eps must be positive");
  const DiscreteEnergy discrete(spec);
  const double tol_res = residual_tolerance(spec, options);

  std::vector<double> u;
  if (!options.initial_guess.empty()) {
    if (options.initial_guess.size() != spec.grid.size())
      throw InvalidArgument("solve: initial guess has the wrong size");
    u = options.initial_guess;
    for (std::size_t k = 0; k < u.size(); ++k)
      if (spec.grid.on_boundary(k)) u[k] = spec.g[k];
  } else {
    const auto ext = boundary_extension(spec);
    u.assign(ext.values().begin(), ext.values().end());
  }

  SolveResult result{ScalarField(spec.grid, u), 0.0, 0.0, 0.0, 0, false, 0.0, 0.0, 0, {}, {}};
  result.tol_res = tol_res;

  const auto n = static_cast<Eigen::Index>(discrete.unknowns());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool pattern_ready = false;
  std::vector<double> trial(u.size());

  auto apply_step = [&](const Eigen::VectorXd& dir, double t) {
    trial = u;
    for (Eigen::Index m = 0; m < n; ++m) trial[discrete.interior()[static_cast<std::size_t>(m)]] += t * dir[m];
  };

  auto [value, scale] = discrete.value(u);
  constexpr double kArmijo = 1e-4;
  constexpr int kMaxHalvings = 60;

  int it = 0;
  for (;; ++it) {
    const Eigen::VectorXd grad = discrete.reduced_gradient(u);
    const double gnorm = grad.norm();
    const double res = discrete.residual_rms(u);
    const double tol_grad = options.grad_rel * (1.0 + std::abs(value));
    result.trace.push_back({it, value, gnorm});
    result.grad_norm = gnorm;
    result.el_residual = res;
    result.tol_grad = tol_grad;
    if (n == 0 || (gnorm <= tol_grad && res <= tol_res)) {
      result.converged = true;
      result.message = "converged";
      break;
    }
    if (it >= options.max_iterations) {
      std::ostringstream msg;
      msg << "iteration cap " << options.max_iterations << " reached (grad " << gnorm << ", residual "
          << res << ")";
      result.message = msg.str();
      break;
    }

    const auto hess = discrete.reduced_hessian(u, false);
    if (!pattern_ready) {
      ldlt.analyzePattern(hess);
      pattern_ready = true;
    }
    ldlt.factorize(hess);
    Eigen::VectorXd dir;
    double slope = 0.0;
    if (ldlt.info() == Eigen::Success) {
      dir = -ldlt.solve(grad);
      slope = grad.dot(dir);
    }
    // Energy differences below this are not resolvable in double precision.
    const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * scale;

    bool accepted = false;
    if (slope < 0.0) {
      double t = 1.0;
      for (int k = 0; k < kMaxHalvings; ++k, t *= 0.5) {
        apply_step(dir, t);
        const auto [trial_value, trial_scale] = discrete.value(trial);
        if (trial_value <= value + kArmijo * t * slope ||
            (t == 1.0 && -slope <= roundoff && trial_value <= value + roundoff)) {
          value = trial_value;
          scale = trial_scale;
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      ++result.gradient_fallbacks;
      const Eigen::VectorXd sd = -grad;
      const double sd_slope = -grad.squaredNorm();
      // Newton-like scale for the first trial: the inverse of the largest
      // Hessian diagonal entry.
      double t = 1.0 / std::max(hess.diagonal().maxCoeff(), std::numeric_limits<double>::min());
      for (int k = 0; k < kMaxHalvings; ++k, t *= 0.5) {
        apply_step(sd, t);
        const auto [trial_value, trial_scale] = discrete.value(trial);
        if (trial_value <= value + kArmijo * t * sd_slope) {
          value = trial_value;
          scale = trial_scale;
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "line search stalled at iteration " << it << " (grad " << gnorm << ", residual " << res << ")";
      result.message = msg.str();
      break;
    }
    u.swap(trial);
  }

  result.iterations = it;
  result.energy = value;
  result.u = ScalarField(spec.grid, u);
  return result;
}

}  // namespace plapreg
