#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "plapreg/field.hpp"
#include "plapreg/smoothness.hpp"
#include "plapreg/solver.hpp"

namespace plapreg {

enum class Verdict { kPass, kFail, kInconclusive, kOutsideTheorem, kEndpoint };
std::string to_string(Verdict verdict);

/// True when no verdict is a failure. Inconclusive, endpoint and
/// outside-theorem verdicts carry no claim.
bool all_claims_pass(const std::vector<Verdict>& verdicts);

struct OracleFields {
  ScalarField u;
  VectorField grad;
  ScalarField f;
};

/// u(x) = |x1|^{p'} / p' with p' = p/(p-1). Its flux |u'|^{p-2} u' equals x1,
/// so div(|grad u|^{p-2} grad u) = 1 everywhere.
class SharpnessOracle {
 public:
  /// Requires p >= 3 and dim in {1, 2}; checks the flux identity on sample
  /// points and throws if it fails.
  SharpnessOracle(double p, int dim);

  double p() const { return p_; }
  int dim() const { return dim_; }
  double conjugate() const { return p_ / (p_ - 1.0); }

  double u(double x1) const;
  /// u'(x1) = sign(x1) |x1|^{1/(p-1)}.
  double du(double x1) const;
  /// |u'|^{p-2} u'.
  double flux(double x1) const;

  /// Exact nodal values; grad is the analytic gradient, not a stencil output.
  OracleFields fields(const Grid& grid) const;

 private:
  double p_;
  int dim_;
};

/// Box (-1, 1)^dim with the given node count per axis.
Grid oracle_grid(int dim, std::size_t nodes);

/// f = 1 and g = oracle u (only its boundary values matter).
ProblemSpec oracle_problem(const SharpnessOracle& oracle, const Grid& grid, double eps, double s = 0.0);

enum class Regime { kHolder, kNikolskii, kThreshold, kSobolev };
std::string to_string(Regime regime);

struct TablePrediction {
  Regime regime = Regime::kNikolskii;
  double theta = 0.0;
};

/// Largest theta with grad u in N^{theta,q} for the oracle: 1/(p-1) for
/// q = infinity, 1/(p-1) + 1/q above q* = (p-1)/(p-2), and 1 (W^{1,q}) below.
/// At q = q* both branches meet at theta = 1.
TablePrediction sharp_exponent(double p, double q);

struct ExponentCell {
  std::string kind;  ///< "table" or "theorem1"
  double p = 0.0;
  double q = 0.0;
  double theta_target = 0.0;  ///< theorem1 cells: theta with q = 2/theta
  Regime regime = Regime::kNikolskii;
  double predicted = 0.0;
  double theta_hat = 0.0;
  double raw_slope = 0.0;
  double r2 = 0.0;
  Verdict verdict = Verdict::kInconclusive;
  std::string note;
};

struct Theorem1Config {
  double p = 4.0;
  int dim = 1;
  std::size_t nodes = 4097;
  double delta = 0.5;
  /// Table q values; defaults to {Sobolev midpoint, p-1, p-1/2, 2(p-1), inf}.
  std::vector<double> table_q;
  /// Theorem thetas; defaults to {2/p, midpoint, 2/(p-1) - 0.02} (capped below 1).
  std::vector<double> thetas;
  double tolerance = 0.05;
  double sobolev_floor = 0.95;
  double lower_slack = 0.02;
  double min_r2 = 0.98;
  unsigned threads = 0;
};

struct Theorem1Report {
  Theorem1Config config;
  std::vector<ExponentCell> cells;
  Verdict verdict = Verdict::kInconclusive;
};

/// Fits theta_hat for the oracle gradient on the dyadic shift family.
/// Table cells pass within +-tolerance of the prediction (Sobolev cells need
/// theta_hat >= sobolev_floor); theorem cells q = 2/theta pass when
/// theta_hat >= 2/p - lower_slack. Fits with r^2 < min_r2 are inconclusive
/// and q = q* is reported as an endpoint.
Theorem1Report run_theorem1_check(Theorem1Config config);

struct SweepConfig {
  double p = 3.0;
  double s = 1.5;
  std::vector<double> eps_values{1e-1, 1e-2, 1e-3, 1e-4};
  int dim = 1;
  std::size_t nodes = 4097;
  /// Radius of the interior region on which W^{1,2} norms are taken.
  double delta = 0.25;
  /// Uniformity is judged over this many smallest eps values.
  std::size_t uniformity_window = 3;
  double max_ratio = 2.0;
  unsigned threads = 0;
};

struct SweepCell {
  double eps = 0.0;
  bool converged = false;
  int iterations = 0;
  double el_residual = 0.0;
  double energy = 0.0;
  double energy_bound = 0.0;
  double w1p_norm = 0.0;
  double alpha_w12_norm = 0.0;
  double alpha_w12_seminorm = 0.0;
};

struct SweepResult {
  SweepConfig config;
  std::vector<double> eps_values;
  std::vector<SweepCell> per_eps;
  bool in_theorem_range = false;
  /// max/min of alpha_w12_norm over the uniformity window.
  double alpha_ratio = 0.0;
  /// max/min of w1p_norm over all eps.
  double w1p_ratio = 0.0;
  bool alpha_uniform = false;
  bool w1p_uniform = false;
  bool energy_below_bound = false;
  Verdict verdict = Verdict::kInconclusive;
  std::string note;
};

/// Solves the oracle problem at each eps and tracks the interior W^{1,2}
/// norm of alpha^s_eps(grad u_eps). Throws SolverFailure if any solve does
/// not converge.
SweepResult run_eps_sweep(const SweepConfig& config);

struct ScalingConfig {
  double p = 3.0;
  double s = 1.5;
  double eps = 1e-3;
  std::vector<double> lambdas{0.5, 2.0};
  int dim = 1;
  std::size_t nodes = 1025;
  double delta = 0.25;
  double homogeneity_tolerance = 1e-8;
  unsigned threads = 0;
};

struct ScalingCell {
  double lambda = 1.0;
  double max_deviation = 0.0;  ///< max |u_lambda - lambda u|
  double tolerance = 0.0;      ///< 10 tol_res of the scaled problem
  double norm_ratio = 0.0;     ///< ||alpha_0^s(grad(lambda u))|| / ||alpha_0^s(grad u)||
  double expected_ratio = 0.0; ///< lambda^s
  double homogeneity_error = 0.0;
  Verdict verdict = Verdict::kInconclusive;
};

struct ScalingReport {
  ScalingConfig config;
  std::vector<ScalingCell> cells;
  Verdict verdict = Verdict::kInconclusive;
};

/// Solving with (lambda g, lambda^{p-1} f, lambda eps) must return lambda u.
ScalingReport run_scaling_check(const ScalingConfig& config);

struct CompositionConfig {
  double p = 4.0;
  /// Defaults to {2/p, (2/p + 2/(p-1)) / 2}.
  std::vector<double> thetas;
  int dim = 1;
  std::size_t nodes = 4097;
  double delta = 0.5;
  double constant = kCompositionConstant;
};

struct CompositionCell {
  double theta = 0.0;
  double s = 0.0;
  CompositionCheck check;
  /// max |beta_theta(alpha_0^{1/theta}(grad u)) - grad u| over nodes.
  double roundtrip_error = 0.0;
  Verdict verdict = Verdict::kInconclusive;
};

struct CompositionReport {
  CompositionConfig config;
  std::vector<CompositionCell> cells;
  Verdict verdict = Verdict::kInconclusive;
};

/// With V = alpha_0^{1/theta}(grad u) for the oracle, checks
/// [beta_theta(V)]_{N^{theta,2/theta}} <= C M [V]_{W^{1,2}}^theta.
CompositionReport run_composition_check(CompositionConfig config);

struct SharpnessConfig {
  double p = 4.0;
  /// Defaults to {2(p-1)}.
  std::vector<double> qs;
  int dim = 1;
  std::size_t nodes = 4097;
  double delta = 0.5;
  double slack = 0.05;
};

struct SharpnessCell {
  double q = 0.0;
  double theta_hat = 0.0;
  double upper = 0.0;  ///< 1/(p-1) + 1/q + slack
  double r2 = 0.0;
  Verdict verdict = Verdict::kInconclusive;
};

struct SharpnessReport {
  SharpnessConfig config;
  std::vector<SharpnessCell> cells;
  Verdict verdict = Verdict::kInconclusive;
};

/// Negative control: for q > p - 1 the fitted exponent of the oracle
/// gradient must not exceed the table value by more than the slack.
SharpnessReport run_sharpness_control(SharpnessConfig config);

struct ResidualStudy {
  std::vector<std::size_t> nodes;
  std::vector<double> spacing;
  std::vector<double> residual;
  /// log2 of successive residual ratios.
  std::vector<double> rates;
};

/// el_residual of the interpolated oracle on successively refined grids.
ResidualStudy oracle_residual_study(double p, double eps, const std::vector<std::size_t>& nodes);

nlohmann::json to_json(const Theorem1Report& report);
nlohmann::json to_json(const SweepResult& result);
nlohmann::json to_json(const ScalingReport& report);
nlohmann::json to_json(const CompositionReport& report);
nlohmann::json to_json(const SharpnessReport& report);

/// Rows p, q, regime, predicted, theta_hat, r2, verdict mirroring the
/// exponent table of the oracle.
std::string exponent_table_csv(const Theorem1Report& report);
std::string sweep_csv(const SweepResult& result);

}  // namespace plapreg
