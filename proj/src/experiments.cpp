#include "plapreg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "plapreg/calculus.hpp"
#include "plapreg/error.hpp"
#include "plapreg/parallel.hpp"

namespace plapreg {

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

nlohmann::json number_or_inf(double x) {
  if (std::isinf(x)) return "inf";
  return x;
}

unsigned threads_or_default(unsigned t) { return t == 0 ? worker_count() : t; }

double ratio_max_min(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

}  // namespace

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kPass: return "PASS";
    case Verdict::kFail: return "FAIL";
    case Verdict::kInconclusive: return "INCONCLUSIVE";
    case Verdict::kOutsideTheorem: return "OUTSIDE-THEOREM";
    case Verdict::kEndpoint: return "ENDPOINT";
  }
  return "INCONCLUSIVE";
}

bool all_claims_pass(const std::vector<Verdict>& verdicts) {
  return std::none_of(verdicts.begin(), verdicts.end(), [](Verdict v) { return v == Verdict::kFail; });
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::kHolder: return "holder";
    case Regime::kNikolskii: return "nikolskii";
    case Regime::kThreshold: return "threshold";
    case Regime::kSobolev: return "sobolev";
  }
  return "nikolskii";
}

SharpnessOracle::SharpnessOracle(double p, int dim) : p_(p), dim_(dim) {
  if (!(p >= 3.0) || !std::isfinite(p)) throw InvalidArgument("SharpnessOracle: requires p >= 3");
  if (dim != 1 && dim != 2) throw InvalidArgument("SharpnessOracle: dim must be 1 or 2");
  for (double x : {-0.9, -0.3, -1e-3, 0.0, 2e-4, 0.5, 1.0}) {
    if (std::abs(flux(x) - x) > 1e-12 * (1.0 + std::abs(x)))
      throw Error("SharpnessOracle: flux identity |u'|^{p-2} u' = x failed");
  }
}

double SharpnessOracle::u(double x1) const {
  const double pc = conjugate();
  return std::pow(std::abs(x1), pc) / pc;
}

double SharpnessOracle::du(double x1) const { return sign(x1) * std::pow(std::abs(x1), 1.0 / (p_ - 1.0)); }

double SharpnessOracle::flux(double x1) const {
  const double d = du(x1);
  return std::pow(std::abs(d), p_ - 2.0) * d;
}

OracleFields SharpnessOracle::fields(const Grid& grid) const {
  const auto d = static_cast<std::size_t>(grid.dim());
  std::vector<double> u(grid.size()), grad(grid.size() * d, 0.0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double x1 = grid.point(k)[0];
    u[k] = this->u(x1);
    grad[k * d] = du(x1);
  }
  return OracleFields{ScalarField(grid, std::move(u)), VectorField(grid, std::move(grad)),
                      ScalarField::constant(grid, 1.0)};
}

Grid oracle_grid(int dim, std::size_t nodes) {
  if (dim == 1) return Grid::line(-1.0, 1.0, nodes);
  if (dim == 2) return Grid::square(-1.0, 1.0, nodes);
  throw InvalidArgument("oracle_grid: dim must be 1 or 2");
}

ProblemSpec oracle_problem(const SharpnessOracle& oracle, const Grid& grid, double eps, double s) {
  PLapParams params;
  params.p = oracle.p();
  params.eps = eps;
  params.s = s > 0.0 ? s : 0.5 * oracle.p();
  auto fields = oracle.fields(grid);
  return make_problem(grid, params, std::move(fields.f), std::move(fields.u));
}

TablePrediction sharp_exponent(double p, double q) {
  if (!(p >= 3.0)) throw InvalidArgument("sharp_exponent: requires p >= 3");
  if (!(q >= 1.0)) throw InvalidArgument("sharp_exponent: requires q >= 1");
  if (std::isinf(q)) return {Regime::kHolder, 1.0 / (p - 1.0)};
  const double qstar = (p - 1.0) / (p - 2.0);
  if (std::abs(q - qstar) <= 1e-12 * qstar) return {Regime::kThreshold, 1.0};
  if (q > qstar) return {Regime::kNikolskii, 1.0 / (p - 1.0) + 1.0 / q};
  return {Regime::kSobolev, 1.0};
}

Theorem1Report run_theorem1_check(Theorem1Config config) {
  const double p = config.p;
  const SharpnessOracle oracle(p, config.dim);
  if (config.table_q.empty()) {
    const double qstar = (p - 1.0) / (p - 2.0);
    config.table_q = {0.5 * (1.0 + qstar), p - 1.0, p - 0.5, 2.0 * (p - 1.0), kInfinity};
  }
  if (config.thetas.empty()) {
    const double lo = 2.0 / p;
    const double hi = std::min(2.0 / (p - 1.0), 1.0);
    config.thetas = {lo, 0.5 * (lo + hi), hi - 0.02};
  }
  const Grid grid = oracle_grid(config.dim, config.nodes);
  const VectorField grad = oracle.fields(grid).grad;
  const auto shifts = dyadic_shifts(grid, config.delta);
  const auto window = default_window(grid, config.delta);

  std::vector<ExponentCell> cells;
  for (double q : config.table_q) {
    ExponentCell c;
    c.kind = "table";
    c.p = p;
    c.q = q;
    const auto pred = sharp_exponent(p, q);
    c.regime = pred.regime;
    c.predicted = pred.theta;
    cells.push_back(c);
  }
  for (double theta : config.thetas) {
    ExponentCell c;
    c.kind = "theorem1";
    c.p = p;
    c.theta_target = theta;
    c.q = 2.0 / theta;
    const auto pred = sharp_exponent(p, c.q);
    c.regime = pred.regime;
    c.predicted = pred.theta;
    cells.push_back(c);
  }

  const std::function<ExponentCell(std::size_t)> fit_cell = [&](std::size_t i) {
    ExponentCell c = cells[i];
    const auto report = fit_smoothness_exponent(grad, c.q, shifts, window);
    c.theta_hat = report.fitted_theta;
    c.raw_slope = report.raw_slope;
    c.r2 = report.fit_r2;
    const bool endpoint_p3 = p == 3.0 && c.kind == "table" && std::abs(c.q - (p - 1.0)) < 1e-12;
    if (c.regime == Regime::kThreshold || endpoint_p3) {
      c.verdict = Verdict::kEndpoint;
      c.note = "endpoint q = (p-1)/(p-2); slope reported, not adjudicated";
    } else if (c.r2 < config.min_r2) {
      c.verdict = Verdict::kInconclusive;
      c.note = "fit r^2 below threshold";
    } else if (c.kind == "theorem1") {
      c.verdict = c.theta_hat >= 2.0 / p - config.lower_slack ? Verdict::kPass : Verdict::kFail;
    } else if (c.regime == Regime::kSobolev) {
      c.verdict = c.theta_hat >= config.sobolev_floor ? Verdict::kPass : Verdict::kFail;
    } else {
      c.verdict = std::abs(c.theta_hat - c.predicted) <= config.tolerance ? Verdict::kPass : Verdict::kFail;
    }
    return c;
  };
  Theorem1Report report;
  report.cells = parallel_map<ExponentCell>(cells.size(), fit_cell, threads_or_default(config.threads));
  report.config = std::move(config);
  std::vector<Verdict> verdicts;
  for (const auto& c : report.cells) verdicts.push_back(c.verdict);
  report.verdict = all_claims_pass(verdicts) ? Verdict::kPass : Verdict::kFail;
  return report;
}

SweepResult run_eps_sweep(const SweepConfig& config) {
  if (config.eps_values.empty()) throw InvalidArgument("run_eps_sweep: empty eps list");
  for (double e : config.eps_values)
    if (!(e > 0.0 && e <= 1.0)) throw InvalidArgument("run_eps_sweep: eps values must lie in (0, 1]");
  if (!(config.s > 0.0)) throw InvalidArgument("run_eps_sweep: need s > 0");
  const SharpnessOracle oracle(config.p, config.dim);
  const Grid grid = oracle_grid(config.dim, config.nodes);
  const InteriorMask mask = interior_mask(grid, config.delta);
  if (mask.empty()) throw InvalidArgument("run_eps_sweep: interior mask is empty for this delta");

  const std::function<SweepCell(std::size_t)> run_cell = [&](std::size_t i) {
    const double eps = config.eps_values[i];
    const ProblemSpec spec = oracle_problem(oracle, grid, eps, config.s);
    const SolveResult solved = solve(spec);
    if (!solved.converged) {
      std::ostringstream msg;
      msg << "eps sweep cell p=" << config.p << " s=" << config.s << " eps=" << eps
          << " did not converge: " << solved.message;
      throw SolverFailure(msg.str());
    }
    SweepCell cell;
    cell.eps = eps;
    cell.converged = true;
    cell.iterations = solved.iterations;
    cell.el_residual = solved.el_residual;
    cell.energy = solved.energy;
    cell.energy_bound = energy_upper_bound(spec, boundary_extension(spec));
    cell.w1p_norm = w1p_norm(solved.u, config.p);
    const VectorField V = apply_alpha(gradient(solved.u), eps, config.s);
    cell.alpha_w12_norm = sobolev_w12_norm(V, mask);
    cell.alpha_w12_seminorm = sobolev_w12_seminorm(V, mask);
    return cell;
  };

  SweepResult result;
  result.config = config;
  result.eps_values = config.eps_values;
  result.per_eps =
      parallel_map<SweepCell>(config.eps_values.size(), run_cell, threads_or_default(config.threads));
  result.in_theorem_range = in_theorem_range(config.p, config.s);

  // Judge uniformity on the smallest eps values.
  std::vector<std::size_t> order(result.per_eps.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return result.per_eps[a].eps < result.per_eps[b].eps; });
  const std::size_t window = std::min(config.uniformity_window, order.size());
  std::vector<double> alpha, w1p;
  for (std::size_t k = 0; k < window; ++k) alpha.push_back(result.per_eps[order[k]].alpha_w12_norm);
  for (const auto& c : result.per_eps) w1p.push_back(c.w1p_norm);
  result.alpha_ratio = ratio_max_min(alpha);
  result.w1p_ratio = ratio_max_min(w1p);
  result.alpha_uniform = result.alpha_ratio < config.max_ratio;
  result.w1p_uniform = result.w1p_ratio < config.max_ratio;
  result.energy_below_bound = std::all_of(result.per_eps.begin(), result.per_eps.end(), [](const SweepCell& c) {
    return c.energy <= c.energy_bound + 1e-12 * (1.0 + std::abs(c.energy_bound));
  });

  if (!result.in_theorem_range) {
    result.verdict = Verdict::kOutsideTheorem;
    std::ostringstream msg;
    msg << "s outside the admissible range for p = " << config.p << "; observed ratio " << result.alpha_ratio;
    result.note = msg.str();
  } else {
    result.verdict = result.alpha_uniform && result.w1p_uniform && result.energy_below_bound ? Verdict::kPass
                                                                                             : Verdict::kFail;
  }
  return result;
}

ScalingReport run_scaling_check(const ScalingConfig& config) {
  for (double l : config.lambdas)
    if (!(l > 0.0)) throw InvalidArgument("run_scaling_check: lambda must be positive");
  const SharpnessOracle oracle(config.p, config.dim);
  const Grid grid = oracle_grid(config.dim, config.nodes);
  const InteriorMask mask = interior_mask(grid, config.delta);
  const ProblemSpec base = oracle_problem(oracle, grid, config.eps, config.s);
  const SolveResult base_result = solve(base);
  if (!base_result.converged) throw SolverFailure("scaling check: base solve failed: " + base_result.message);
  const double base_norm = sobolev_w12_norm(apply_alpha(gradient(base_result.u), 0.0, config.s), mask);

  const std::function<ScalingCell(std::size_t)> run_cell = [&](std::size_t i) {
    const double lambda = config.lambdas[i];
    const double p = config.p;
    auto scale = [&](const ScalarField& field, double factor) {
      std::vector<double> v(field.values().begin(), field.values().end());
      for (double& x : v) x *= factor;
      return ScalarField(grid, std::move(v));
    };
    PLapParams params = base.params;
    params.eps = lambda * config.eps;
    const ProblemSpec scaled =
        make_problem(grid, params, scale(base.f, std::pow(lambda, p - 1.0)), scale(base.g, lambda));
    const SolveResult r = solve(scaled);
    if (!r.converged) {
      std::ostringstream msg;
      msg << "scaling cell lambda=" << lambda << " did not converge: " << r.message;
      throw SolverFailure(msg.str());
    }
    ScalingCell cell;
    cell.lambda = lambda;
    cell.tolerance = 10.0 * r.tol_res;
    for (std::size_t k = 0; k < grid.size(); ++k)
      cell.max_deviation = std::max(cell.max_deviation, std::abs(r.u[k] - lambda * base_result.u[k]));
    const double scaled_norm =
        sobolev_w12_norm(apply_alpha(gradient(scale(base_result.u, lambda)), 0.0, config.s), mask);
    cell.norm_ratio = scaled_norm / base_norm;
    cell.expected_ratio = std::pow(lambda, config.s);
    cell.homogeneity_error = std::abs(cell.norm_ratio - cell.expected_ratio) / cell.expected_ratio;
    const bool ok = cell.max_deviation <= cell.tolerance && cell.homogeneity_error <= config.homogeneity_tolerance;
    cell.verdict = ok ? Verdict::kPass : Verdict::kFail;
    return cell;
  };
  ScalingReport report;
  report.config = config;
  report.cells = parallel_map<ScalingCell>(config.lambdas.size(), run_cell, threads_or_default(config.threads));
  std::vector<Verdict> verdicts;
  for (const auto& c : report.cells) verdicts.push_back(c.verdict);
  report.verdict = all_claims_pass(verdicts) ? Verdict::kPass : Verdict::kFail;
  return report;
}

CompositionReport run_composition_check(CompositionConfig config) {
  const double p = config.p;
  const SharpnessOracle oracle(p, config.dim);
  if (config.thetas.empty()) config.thetas = {2.0 / p, 0.5 * (2.0 / p + 2.0 / (p - 1.0))};
  const Grid grid = oracle_grid(config.dim, config.nodes);
  const VectorField grad = oracle.fields(grid).grad;
  const auto shifts = dyadic_shifts(grid, config.delta);
  const InteriorMask whole = full_mask(grid);

  CompositionReport report;
  for (double theta : config.thetas) {
    CompositionCell cell;
    cell.theta = theta;
    cell.s = 1.0 / theta;
    const VectorField V = apply_alpha(grad, 0.0, cell.s);
    const VectorField back = apply_beta(V, theta);
    for (std::size_t k = 0; k < grad.values().size(); ++k)
      cell.roundtrip_error = std::max(cell.roundtrip_error, std::abs(back.values()[k] - grad.values()[k]));
    cell.check = composition_bound_check(V, theta, 2.0, whole, shifts, config.constant);
    cell.verdict = cell.check.lhs <= cell.check.rhs ? Verdict::kPass : Verdict::kFail;
    report.cells.push_back(cell);
  }
  report.config = std::move(config);
  std::vector<Verdict> verdicts;
  for (const auto& c : report.cells) verdicts.push_back(c.verdict);
  report.verdict = all_claims_pass(verdicts) ? Verdict::kPass : Verdict::kFail;
  return report;
}

SharpnessReport run_sharpness_control(SharpnessConfig config) {
  const double p = config.p;
  const SharpnessOracle oracle(p, config.dim);
  if (config.qs.empty()) config.qs = {2.0 * (p - 1.0)};
  const Grid grid = oracle_grid(config.dim, config.nodes);
  const VectorField grad = oracle.fields(grid).grad;
  const auto shifts = dyadic_shifts(grid, config.delta);
  const auto window = default_window(grid, config.delta);
  SharpnessReport report;
  for (double q : config.qs) {
    if (!(q > p - 1.0)) throw InvalidArgument("run_sharpness_control: q must exceed p - 1");
    SharpnessCell cell;
    cell.q = q;
    const auto fit = fit_smoothness_exponent(grad, q, shifts, window);
    cell.theta_hat = fit.fitted_theta;
    cell.r2 = fit.fit_r2;
    cell.upper = 1.0 / (p - 1.0) + (std::isinf(q) ? 0.0 : 1.0 / q) + config.slack;
    cell.verdict = cell.theta_hat <= cell.upper ? Verdict::kPass : Verdict::kFail;
    report.cells.push_back(cell);
  }
  report.config = std::move(config);
  std::vector<Verdict> verdicts;
  for (const auto& c : report.cells) verdicts.push_back(c.verdict);
  report.verdict = all_claims_pass(verdicts) ? Verdict::kPass : Verdict::kFail;
  return report;
}

ResidualStudy oracle_residual_study(double p, double eps, const std::vector<std::size_t>& nodes) {
  const SharpnessOracle oracle(p, 1);
  ResidualStudy study;
  for (std::size_t n : nodes) {
    const Grid grid = oracle_grid(1, n);
    const ProblemSpec spec = oracle_problem(oracle, grid, eps);
    study.nodes.push_back(n);
    study.spacing.push_back(grid.spacing(0));
    study.residual.push_back(el_residual(spec, spec.g));
  }
  for (std::size_t k = 1; k < study.residual.size(); ++k)
    study.rates.push_back(std::log2(study.residual[k - 1] / study.residual[k]) /
                          std::log2(study.spacing[k - 1] / study.spacing[k]));
  return study;
}

nlohmann::json to_json(const Theorem1Report& report) {
  nlohmann::json j;
  const auto& c = report.config;
  j["suite"] = "theorem1";
  j["config"] = {{"p", c.p}, {"dim", c.dim}, {"nodes", c.nodes}, {"delta", c.delta},
                 {"tolerance", c.tolerance}, {"sobolev_floor", c.sobolev_floor},
                 {"lower_slack", c.lower_slack}, {"min_r2", c.min_r2}};
  auto& cells = j["cells"] = nlohmann::json::array();
  for (const auto& e : report.cells) {
    cells.push_back({{"kind", e.kind}, {"p", e.p}, {"q", number_or_inf(e.q)}, {"theta_target", e.theta_target},
                     {"regime", to_string(e.regime)}, {"predicted", e.predicted}, {"theta_hat", e.theta_hat},
                     {"raw_slope", e.raw_slope}, {"r2", e.r2}, {"verdict", to_string(e.verdict)},
                     {"note", e.note}});
  }
  j["verdict"] = to_string(report.verdict);
  return j;
}

nlohmann::json to_json(const SweepResult& result) {
  nlohmann::json j;
  const auto& c = result.config;
  j["suite"] = "eps-uniform";
  j["config"] = {{"p", c.p}, {"s", c.s}, {"eps_values", c.eps_values}, {"dim", c.dim}, {"nodes", c.nodes},
                 {"delta", c.delta}, {"uniformity_window", c.uniformity_window}, {"max_ratio", c.max_ratio}};
  auto& rows = j["per_eps"] = nlohmann::json::array();
  for (const auto& e : result.per_eps) {
    rows.push_back({{"eps", e.eps}, {"converged", e.converged}, {"iterations", e.iterations},
                    {"el_residual", e.el_residual}, {"energy", e.energy}, {"energy_bound", e.energy_bound},
                    {"w1p_norm", e.w1p_norm}, {"alpha_w12_norm", e.alpha_w12_norm},
                    {"alpha_w12_seminorm", e.alpha_w12_seminorm}});
  }
  j["in_theorem_range"] = result.in_theorem_range;
  j["alpha_ratio"] = result.alpha_ratio;
  j["w1p_ratio"] = result.w1p_ratio;
  j["alpha_uniform"] = result.alpha_uniform;
  j["w1p_uniform"] = result.w1p_uniform;
  j["energy_below_bound"] = result.energy_below_bound;
  j["verdict"] = to_string(result.verdict);
  j["note"] = result.note;
  return j;
}

nlohmann::json to_json(const ScalingReport& report) {
  nlohmann::json j;
  const auto& c = report.config;
  j["suite"] = "scaling";
  j["config"] = {{"p", c.p}, {"s", c.s}, {"eps", c.eps}, {"lambdas", c.lambdas}, {"dim", c.dim},
                 {"nodes", c.nodes}, {"delta", c.delta}, {"homogeneity_tolerance", c.homogeneity_tolerance}};
  auto& cells = j["cells"] = nlohmann::json::array();
  for (const auto& e : report.cells) {
    cells.push_back({{"lambda", e.lambda}, {"max_deviation", e.max_deviation}, {"tolerance", e.tolerance},
                     {"norm_ratio", e.norm_ratio}, {"expected_ratio", e.expected_ratio},
                     {"homogeneity_error", e.homogeneity_error}, {"verdict", to_string(e.verdict)}});
  }
  j["verdict"] = to_string(report.verdict);
  return j;
}

nlohmann::json to_json(const CompositionReport& report) {
  nlohmann::json j;
  const auto& c = report.config;
  j["suite"] = "composition";
  j["config"] = {{"p", c.p}, {"thetas", c.thetas}, {"dim", c.dim}, {"nodes", c.nodes}, {"delta", c.delta},
                 {"constant", c.constant}};
  auto& cells = j["cells"] = nlohmann::json::array();
  for (const auto& e : report.cells) {
    cells.push_back({{"theta", e.theta}, {"s", e.s}, {"lhs", e.check.lhs}, {"rhs", e.check.rhs},
                     {"w12_seminorm", e.check.w12_seminorm}, {"holder_constant", e.check.holder_constant},
                     {"roundtrip_error", e.roundtrip_error}, {"verdict", to_string(e.verdict)}});
  }
  j["verdict"] = to_string(report.verdict);
  return j;
}

nlohmann::json to_json(const SharpnessReport& report) {
  nlohmann::json j;
  const auto& c = report.config;
  j["suite"] = "sharpness";
  nlohmann::json qs = nlohmann::json::array();
  for (double q : c.qs) qs.push_back(number_or_inf(q));
  j["config"] = {{"p", c.p}, {"qs", qs}, {"dim", c.dim}, {"nodes", c.nodes}, {"delta", c.delta},
                 {"slack", c.slack}};
  auto& cells = j["cells"] = nlohmann::json::array();
  for (const auto& e : report.cells) {
    cells.push_back({{"q", number_or_inf(e.q)}, {"theta_hat", e.theta_hat}, {"upper", e.upper}, {"r2", e.r2},
                     {"verdict", to_string(e.verdict)}});
  }
  j["verdict"] = to_string(report.verdict);
  return j;
}

std::string exponent_table_csv(const Theorem1Report& report) {
  std::ostringstream out;
  out << "kind,p,q,theta_target,regime,predicted,theta_hat,r2,verdict\n";
  char buf[256];
  for (const auto& c : report.cells) {
    const std::string q = std::isinf(c.q) ? std::string("inf") : [&] {
      char b[32];
      std::snprintf(b, sizeof b, "%.10g", c.q);
      return std::string(b);
    }();
    std::snprintf(buf, sizeof buf, "%s,%.10g,%s,%.10g,%s,%.10g,%.10g,%.10g,%s\n", c.kind.c_str(), c.p, q.c_str(),
                  c.theta_target, to_string(c.regime).c_str(), c.predicted, c.theta_hat, c.r2,
                  to_string(c.verdict).c_str());
    out << buf;
  }
  return out.str();
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "eps,iterations,el_residual,energy,energy_bound,w1p_norm,alpha_w12_norm,alpha_w12_seminorm\n";
  char buf[256];
  for (const auto& c : result.per_eps) {
    std::snprintf(buf, sizeof buf, "%.10g,%d,%.10g,%.17g,%.17g,%.17g,%.17g,%.17g\n", c.eps, c.iterations,
                  c.el_residual, c.energy, c.energy_bound, c.w1p_norm, c.alpha_w12_norm, c.alpha_w12_seminorm);
    out << buf;
  }
  return out.str();
}

}  // namespace plapreg
