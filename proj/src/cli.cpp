#include "plapreg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <cstdio>
#include <sstream>

#include "CLI11.hpp"
#include "plapreg/calculus.hpp"
#include "plapreg/error.hpp"
#include "plapreg/experiments.hpp"
#include "plapreg/field_io.hpp"
#include "plapreg/smoothness.hpp"
#include "plapreg/solver.hpp"

namespace plapreg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

enum class FlagKind { kNumber, kInteger, kString, kList };

struct FlagSpec {
  const char* flag;
  const char* key;
  const char* help;
  FlagKind kind;
};

constexpr FlagSpec kFlags[] = {
    {"--p", "p", "p-Laplace exponent (>= 2)", FlagKind::kNumber},
    {"--eps", "eps", "regularization parameter", FlagKind::kNumber},
    {"--s", "s", "exponent of the gradient transform alpha^s", FlagKind::kNumber},
    {"--theta", "theta", "smoothness exponent", FlagKind::kNumber},
    {"--q", "q", "integrability exponent (>= 1, or inf)", FlagKind::kNumber},
    {"--nodes", "nodes", "nodes per axis", FlagKind::kInteger},
    {"--dim", "dim", "dimension (1 or 2)", FlagKind::kInteger},
    {"--delta", "delta", "interior distance / largest shift length", FlagKind::kNumber},
    {"--oracle", "oracle", "built-in field: sharp or constant", FlagKind::kString},
    {"--suite", "suite", "theorem1, eps-uniform, scaling, composition, sharpness or all", FlagKind::kString},
    {"--lambda", "lambda", "scaling factors, comma separated", FlagKind::kList},
    {"--eps-list", "eps_list", "eps values for sweeps, comma separated", FlagKind::kList},
    {"--out", "out", "output directory", FlagKind::kString},
    {"--mode", "mode", "parameter validation: none, thm2 or thm3", FlagKind::kString},
    {"--input", "input", "field CSV, or a solve output directory", FlagKind::kString},
    {"--problem", "problem", "problem JSON file", FlagKind::kString},
    {"--max-iter", "max_iter", "solver iteration cap", FlagKind::kInteger},
};

double parse_number(const std::string& key, const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "infinity") return kInfinity;
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw UsageError("--" + key + ": not a number: '" + text + "'");
  }
  if (pos != text.size()) throw UsageError("--" + key + ": not a number: '" + text + "'");
  return v;
}

json parse_flag(const FlagSpec& spec, const std::string& text) {
  switch (spec.kind) {
    case FlagKind::kNumber: {
      const double v = parse_number(spec.key, text);
      if (std::isinf(v)) return "inf";
      return v;
    }
    case FlagKind::kInteger: {
      const double v = parse_number(spec.key, text);
      if (v != std::floor(v) || std::isinf(v)) throw UsageError(std::string(spec.flag) + ": expected an integer");
      return static_cast<long long>(v);
    }
    case FlagKind::kList: {
      json list = json::array();
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) list.push_back(parse_number(spec.key, item));
      return list;
    }
    case FlagKind::kString: return text;
  }
  return text;
}

double json_number(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (v.is_string()) return parse_number(key, v.get<std::string>());
  if (!v.is_number()) throw UsageError("config: '" + key + "' must be a number");
  return v.get<double>();
}

std::vector<double> json_list(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw UsageError("config: '" + key + "' must be a number or an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw UsageError("config: '" + key + "' entries must be numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

RunConfig resolve(const std::string& command, const json& merged) {
  RunConfig c;
  c.command = command;
  auto num = [&](const char* key, std::optional<double>& slot) {
    if (merged.contains(key)) slot = json_number(merged, key);
  };
  num("p", c.p);
  num("eps", c.eps);
  num("s", c.s);
  num("theta", c.theta);
  num("q", c.q);
  num("delta", c.delta);
  if (merged.contains("nodes")) {
    const double n = json_number(merged, "nodes");
    if (!(n >= 3.0)) throw UsageError("--nodes must be at least 3");
    c.nodes = static_cast<std::size_t>(n);
  }
  if (merged.contains("dim")) c.dim = static_cast<int>(json_number(merged, "dim"));
  if (merged.contains("max_iter")) c.max_iter = static_cast<int>(json_number(merged, "max_iter"));
  auto str = [&](const char* key, std::string& slot) {
    if (!merged.contains(key)) return;
    if (!merged.at(key).is_string()) throw UsageError(std::string("config: '") + key + "' must be a string");
    slot = merged.at(key).get<std::string>();
  };
  str("oracle", c.oracle);
  str("suite", c.suite);
  str("out", c.out);
  str("mode", c.mode);
  str("input", c.input);
  str("problem", c.problem);
  if (merged.contains("lambda")) c.lambdas = json_list(merged, "lambda");
  if (merged.contains("eps_list")) c.eps_list = json_list(merged, "eps_list");

  if (c.dim != 1 && c.dim != 2) throw UsageError("--dim must be 1 or 2");
  if (c.eps && !(*c.eps >= 0.0)) throw UsageError("--eps must be nonnegative");
  if (c.q && !(*c.q >= 1.0)) throw UsageError("--q must be >= 1 (L^q needs q >= 1)");
  if (c.delta && !(*c.delta > 0.0)) throw UsageError("--delta must be positive");
  if (c.max_iter < 0) throw UsageError("--max-iter must be nonnegative");
  parse_theorem_mode(c.mode);
  return c;
}

json optional_number(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (std::isinf(*v)) return "inf";
  return *v;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

fs::path prepare_output(const RunConfig& c) {
  const fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create output directory " + dir.string() + ": " + ec.message());
  const fs::path probe = dir / ".plapreg_write_probe";
  {
    std::ofstream test(probe);
    if (!test) throw UsageError("output directory is not writable: " + dir.string());
  }
  fs::remove(probe, ec);
  return dir;
}

PLapParams params_from(const RunConfig& c, double p) {
  PLapParams params;
  params.p = p;
  params.eps = c.eps.value_or(1e-4);
  params.s = c.s.value_or(0.5 * p);
  if (c.theta) {
    params.theta = *c.theta;
    params.theta_used = true;
  }
  if (c.q) params.q_nik = *c.q;
  return params;
}

ScalarField field_or_constant(const json& j, const fs::path& base, const Grid& grid, const char* key) {
  if (!j.contains(key)) return ScalarField::constant(grid, 0.0);
  const json& v = j.at(key);
  if (v.is_number()) return ScalarField::constant(grid, v.get<double>());
  if (!v.is_string()) throw UsageError(std::string("problem: '") + key + "' must be a number or a CSV path");
  const fs::path path = base / v.get<std::string>();
  auto any = read_field(path);
  if (!std::holds_alternative<ScalarField>(any))
    throw UsageError(std::string("problem: '") + key + "' must be a scalar field");
  auto field = std::get<ScalarField>(std::move(any));
  if (field.grid() != grid) throw UsageError(std::string("problem: '") + key + "' grid differs from problem grid");
  return field;
}

struct BuiltProblem {
  ProblemSpec spec;
  std::optional<SharpnessOracle> oracle;
};

BuiltProblem build_problem(const RunConfig& c) {
  if (!c.problem.empty()) {
    std::ifstream in(c.problem);
    if (!in) throw UsageError("cannot read problem file " + c.problem);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw UsageError("malformed problem file: " + std::string(e.what()));
    }
    const Grid grid = grid_from_json(j.at("grid"));
    const json params_json = j.value("params", json::object());
    std::optional<double> p = c.p;
    if (!p && params_json.contains("p")) p = params_json.at("p").get<double>();
    if (!p) throw UsageError("missing --p (not given on the command line nor in the problem file)");
    PLapParams params = params_from(c, *p);
    if (!c.eps && params_json.contains("eps")) params.eps = params_json.at("eps").get<double>();
    if (!c.s && params_json.contains("s")) params.s = params_json.at("s").get<double>();
    const fs::path base = fs::path(c.problem).parent_path();
    validate(params, parse_theorem_mode(c.mode));
    return {make_problem(grid, params, field_or_constant(j, base, grid, "f"),
                         field_or_constant(j, base, grid, "g")),
            std::nullopt};
  }
  if (c.oracle == "sharp") {
    if (!c.p) throw UsageError("missing --p");
    const PLapParams params = params_from(c, *c.p);
    validate(params, parse_theorem_mode(c.mode));
    SharpnessOracle oracle(*c.p, c.dim);
    const Grid grid = oracle_grid(c.dim, c.nodes);
    return {oracle_problem(oracle, grid, params.eps, params.s), oracle};
  }
  if (c.oracle.empty()) throw UsageError("solve needs --oracle sharp or --problem <file>");
  throw UsageError("unknown oracle '" + c.oracle + "' (solve supports: sharp)");
}

int cmd_solve(const RunConfig& c, std::ostream& out) {
  if (!c.p && c.problem.empty()) throw UsageError("missing --p");
  BuiltProblem built = build_problem(c);
  const ProblemSpec& spec = built.spec;
  if (!(spec.params.eps > 0.0)) throw UsageError("solve requires --eps > 0");
  const fs::path dir = prepare_output(c);

  SolverOptions options;
  options.max_iterations = c.max_iter;
  const SolveResult r = solve(spec, options);

  json report;
  report["config"] = to_json(c);
  report["problem"] = {{"grid", grid_to_json(spec.grid)},
                       {"p", spec.params.p},
                       {"eps", spec.params.eps},
                       {"s", spec.params.s}};
  report["energy"] = r.energy;
  report["el_residual"] = r.el_residual;
  report["grad_norm"] = r.grad_norm;
  report["iterations"] = r.iterations;
  report["converged"] = r.converged;
  report["tol_res"] = r.tol_res;
  report["tol_grad"] = r.tol_grad;
  report["gradient_fallbacks"] = r.gradient_fallbacks;
  report["message"] = r.message;
  if (built.oracle) {
    double err = 0.0;
    for (std::size_t k = 0; k < spec.grid.size(); ++k)
      err = std::max(err, std::abs(r.u[k] - built.oracle->u(spec.grid.point(k)[0])));
    report["oracle_max_error"] = err;
  }
  write_field(dir / "u.csv", r.u);
  write_field(dir / "residual.csv", el_residual_field(spec, r.u));
  std::ostringstream trace;
  trace << "iter,energy,grad_norm\n";
  char buf[96];
  for (const auto& t : r.trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", t.iteration, t.energy, t.grad_norm);
    trace << buf;
  }
  write_text(dir / "trace.csv", trace.str());
  write_json(dir / "solve_result.json", report);

  out << (r.converged ? "converged" : "NOT converged") << " after " << r.iterations
      << " iterations: energy " << r.energy << ", el_residual " << r.el_residual << '\n';
  return r.converged ? kExitOk : kExitComputeFailure;
}

int cmd_estimate(const RunConfig& c, std::ostream& out) {
  if (!c.q) throw UsageError("missing --q");
  const double q = *c.q;
  const double delta = c.delta.value_or(0.5);

  std::optional<AnyField> field;
  if (!c.input.empty()) {
    const fs::path in(c.input);
    if (fs::is_directory(in)) {
      auto u = read_field(in / "u.csv");
      if (!std::holds_alternative<ScalarField>(u)) throw UsageError("solve output u.csv is not a scalar field");
      field = gradient(std::get<ScalarField>(u));
    } else {
      if (!fs::exists(in)) throw UsageError("input not found: " + in.string());
      field = read_field(in);
    }
  } else if (c.oracle == "sharp") {
    if (!c.p) throw UsageError("missing --p for the sharp oracle");
    const SharpnessOracle oracle(*c.p, c.dim);
    field = oracle.fields(oracle_grid(c.dim, c.nodes)).grad;
  } else if (c.oracle == "constant") {
    field = ScalarField::constant(oracle_grid(c.dim, c.nodes), 1.0);
  } else if (c.oracle.empty()) {
    throw UsageError("estimate needs --input <field.csv|solve dir> or --oracle sharp|constant");
  } else {
    throw UsageError("unknown oracle '" + c.oracle + "' (estimate supports: sharp, constant)");
  }

  const fs::path dir = prepare_output(c);
  const Grid& grid = std::visit([](const auto& f) -> const Grid& { return f.grid(); }, *field);
  const auto shifts = dyadic_shifts(grid, delta);
  const auto window = default_window(grid, delta);
  const SeminormReport report =
      std::visit([&](const auto& f) { return fit_smoothness_exponent(f, q, shifts, window); }, *field);

  json j;
  j["config"] = to_json(c);
  j["report"] = to_json(report);
  if (c.theta) {
    j["nikolskii_seminorm"] =
        std::visit([&](const auto& f) { return nikolskii_seminorm(f, q, *c.theta, shifts); }, *field);
  }
  write_json(dir / "seminorm_report.json", j);
  write_text(dir / "shifts.csv", per_shift_csv(report));
  out << "theta_hat " << report.fitted_theta << " (r2 " << report.fit_r2 << ")";
  if (!report.flag.empty()) out << " [" << report.flag << "]";
  out << '\n';
  return kExitOk;
}

SweepConfig sweep_config(const RunConfig& c, double default_p) {
  SweepConfig sc;
  sc.p = c.p.value_or(default_p);
  sc.s = c.s.value_or(0.5 * sc.p);
  sc.eps_values = c.eps_list;
  sc.dim = c.dim;
  sc.nodes = c.nodes;
  sc.delta = c.delta.value_or(0.25);
  return sc;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
  if (!c.p) throw UsageError("missing --p");
  validate(params_from(c, *c.p), parse_theorem_mode(c.mode));
  const fs::path dir = prepare_output(c);
  const SweepResult r = run_eps_sweep(sweep_config(c, *c.p));
  json j = to_json(r);
  j["config_resolved"] = to_json(c);
  write_json(dir / "sweep_report.json", j);
  write_text(dir / "sweep.csv", sweep_csv(r));
  out << "eps-uniform p=" << r.config.p << " s=" << r.config.s << ": " << to_string(r.verdict) << " (ratio "
      << r.alpha_ratio << ")\n";
  return r.verdict == Verdict::kFail ? kExitComputeFailure : kExitOk;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  static const std::vector<std::string> kSuites{"theorem1", "eps-uniform", "scaling", "composition", "sharpness"};
  std::vector<std::string> suites;
  if (c.suite == "all") suites = kSuites;
  else if (std::find(kSuites.begin(), kSuites.end(), c.suite) != kSuites.end()) suites = {c.suite};
  else throw UsageError("unknown suite '" + c.suite + "'");
  if (c.p) validate(params_from(c, *c.p), parse_theorem_mode(c.mode));
  const fs::path dir = prepare_output(c);

  json report;
  report["config"] = to_json(c);
  std::vector<Verdict> verdicts;
  auto record = [&](const std::string& name, json j, Verdict v) {
    report["suites"][name] = std::move(j);
    verdicts.push_back(v);
    out << name << ": " << to_string(v) << '\n';
  };

  for (const auto& suite : suites) {
    if (suite == "theorem1") {
      Theorem1Config tc;
      tc.p = c.p.value_or(4.0);
      tc.dim = c.dim;
      tc.nodes = c.nodes;
      tc.delta = c.delta.value_or(0.5);
      if (c.q) tc.table_q = {*c.q};
      if (c.theta) tc.thetas = {*c.theta};
      const auto r = run_theorem1_check(tc);
      write_text(dir / "exponent_table.csv", exponent_table_csv(r));
      record(suite, to_json(r), r.verdict);
    } else if (suite == "eps-uniform") {
      const auto r = run_eps_sweep(sweep_config(c, 3.0));
      write_text(dir / "sweep.csv", sweep_csv(r));
      record(suite, to_json(r), r.verdict);
    } else if (suite == "scaling") {
      ScalingConfig sc;
      sc.p = c.p.value_or(3.0);
      sc.s = c.s.value_or(0.5 * sc.p);
      sc.eps = c.eps.value_or(1e-3);
      sc.lambdas = c.lambdas;
      sc.dim = c.dim;
      sc.nodes = c.nodes;
      sc.delta = c.delta.value_or(0.25);
      const auto r = run_scaling_check(sc);
      record(suite, to_json(r), r.verdict);
    } else if (suite == "composition") {
      CompositionConfig cc;
      cc.p = c.p.value_or(4.0);
      if (c.theta) cc.thetas = {*c.theta};
      cc.dim = c.dim;
      cc.nodes = c.nodes;
      cc.delta = c.delta.value_or(0.5);
      const auto r = run_composition_check(cc);
      record(suite, to_json(r), r.verdict);
    } else if (suite == "sharpness") {
      SharpnessConfig sc;
      sc.p = c.p.value_or(4.0);
      if (c.q && *c.q > sc.p - 1.0) sc.qs = {*c.q};
      sc.dim = c.dim;
      sc.nodes = c.nodes;
      sc.delta = c.delta.value_or(0.5);
      const auto r = run_sharpness_control(sc);
      record(suite, to_json(r), r.verdict);
    }
  }
  const bool ok = all_claims_pass(verdicts);
  report["verdict"] = ok ? "PASS" : "FAIL";
  write_json(dir / "verification_report.json", report);
  out << "overall: " << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? kExitOk : kExitComputeFailure;
}

}  // namespace

json to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["p"] = optional_number(c.p);
  j["eps"] = optional_number(c.eps);
  j["s"] = optional_number(c.s);
  j["theta"] = optional_number(c.theta);
  j["q"] = optional_number(c.q);
  j["nodes"] = c.nodes;
  j["dim"] = c.dim;
  j["delta"] = optional_number(c.delta);
  j["oracle"] = c.oracle;
  j["suite"] = c.suite;
  j["lambda"] = c.lambdas;
  j["eps_list"] = c.eps_list;
  j["out"] = c.out;
  j["mode"] = c.mode;
  j["input"] = c.input;
  j["problem"] = c.problem;
  j["max_iter"] = c.max_iter;
  return j;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"plapreg: regularized p-Laplace minimization and fractional smoothness laboratory"};
  app.require_subcommand(1);

  struct Bound {
    const FlagSpec* spec;
    CLI::Option* option;
    std::string value;
  };
  std::vector<CLI::App*> commands;
  std::vector<std::vector<Bound>> bound;
  std::vector<std::string> config_paths;
  const char* names[] = {"solve", "estimate", "sweep", "verify"};
  const char* descriptions[] = {"minimize the regularized energy and write the solution",
                                "estimate the Nikol'skii smoothness exponent of a field",
                                "run an eps sweep of the uniform W^{1,2} bound",
                                "run verification suites and write a report"};
  bound.resize(4);
  config_paths.resize(4);
  for (int k = 0; k < 4; ++k) {
    CLI::App* sub = app.add_subcommand(names[k], descriptions[k]);
    sub->add_option("--config", config_paths[k], "JSON file with option values; flags override it");
    bound[k].reserve(std::size(kFlags));
    for (const auto& spec : kFlags) {
      bound[k].push_back({&spec, nullptr, {}});
      bound[k].back().option = sub->add_option(spec.flag, bound[k].back().value, spec.help);
    }
    commands.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  int which = 0;
  for (int k = 0; k < 4; ++k)
    if (commands[k]->parsed()) which = k;

  RunConfig config;
  try {
    json merged = json::object();
    if (!config_paths[which].empty()) {
      std::ifstream in(config_paths[which]);
      if (!in) throw UsageError("cannot read config file " + config_paths[which]);
      try {
        in >> merged;
      } catch (const json::exception& e) {
        throw UsageError("malformed config file: " + std::string(e.what()));
      }
      if (!merged.is_object()) throw UsageError("config file must hold a JSON object");
    }
    for (const auto& b : bound[which])
      if (b.option->count() > 0) merged[b.spec->key] = parse_flag(*b.spec, b.value);
    config = resolve(names[which], merged);
  } catch (const Error& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    switch (which) {
      case 0: return cmd_solve(config, out);
      case 1: return cmd_estimate(config, out);
      case 2: return cmd_sweep(config, out);
      default: return cmd_verify(config, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SolverFailure& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitComputeFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitComputeFailure;
  }
}

}  // namespace plapreg
