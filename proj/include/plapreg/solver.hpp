#pragma once

#include <string>
#include <vector>

#include "plapreg/field.hpp"
#include "plapreg/plap_math.hpp"

namespace plapreg {

/// Minimize F(u) = sum_e w_e L_eps(grad_e u) + sum_i w_i u_i f_i over nodal
/// fields with u = g on the boundary.
struct ProblemSpec {
  Grid grid;
  PLapParams params;
  ScalarField f;  ///< source
  ScalarField g;  ///< boundary trace; interior values are ignored
};

/// Checks grid agreement between grid, f and g, and the parameter ranges.
ProblemSpec make_problem(Grid grid, PLapParams params, ScalarField f, ScalarField g);

struct SolverOptions {
  int max_iterations = 200;
  /// Stop once ||dF|| <= grad_rel * (1 + |F|) ...
  double grad_rel = 1e-10;
  /// ... and el_residual <= res_rel * rms(f) + res_abs.
  double res_rel = 1e-6;
  double res_abs = 1e-10;
  /// Starting field; the discrete harmonic extension of g when empty.
  std::vector<double> initial_guess;
};

struct TraceEntry {
  int iteration = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
};

struct SolveResult {
  ScalarField u;
  double energy = 0.0;
  double el_residual = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  double tol_res = 0.0;
  double tol_grad = 0.0;
  /// Newton steps that fell back to steepest descent.
  int gradient_fallbacks = 0;
  std::string message;
  std::vector<TraceEntry> trace;
};

double energy(const ProblemSpec& spec, const ScalarField& u);

/// Root-mean-square over interior nodes of (dF/du_i) / w_i = f - div_h(grad L_eps(grad_h u)).
/// The discrete operator is the exact derivative of energy(), so a
/// minimizer has zero residual up to the solver tolerance.
double el_residual(const ProblemSpec& spec, const ScalarField& u);
ScalarField el_residual_field(const ProblemSpec& spec, const ScalarField& u);

/// sum_e w_e (1 + |grad_e u0|^2)^{p/2} / p + sum_i w_i u0_i f_i, an upper
/// bound for the minimum energy when eps <= 1.
double energy_upper_bound(const ProblemSpec& spec, const ScalarField& u0);

/// Residual tolerance res_rel * rms(f) + res_abs used by solve().
double residual_tolerance(const ProblemSpec& spec, const SolverOptions& options = {});

/// Discrete harmonic extension of the boundary values of g.
ScalarField boundary_extension(const ProblemSpec& spec);

/// (sum_i w_i |u_i|^p + sum_e w_e |grad_e u|^p)^{1/p} with the solver's
/// element gradients.
double w1p_norm(const ScalarField& u, double p);

/// Damped Newton on the interior unknowns with an Armijo backtracking line
/// search; a steepest-descent step is tried when the Newton step does not
/// decrease the energy. Never throws on non-convergence: the result carries
/// converged = false and a message instead.
SolveResult solve(const ProblemSpec& spec, const SolverOptions& options = {});

}  // namespace plapreg
