#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "jfmg/functional.hpp"
#include "jfmg/multigrid.hpp"
#include "jfmg/stats.hpp"
#include "jfmg/transfer.hpp"

namespace jfmg {

struct LineSearchOptions {
  double c1 = 1e-4;            ///< sufficient decrease constant
  double alpha_min = 1e-12;
  int max_backtracks = 40;
  double backtrack_lo = 0.1;   ///< clamp of the model minimizer, relative to alpha
  double backtrack_hi = 0.5;
};

struct LineSearchOutcome {
  bool success = false;
  double alpha = 0.0;
  double phi_alpha = 0.0;
  int evaluations = 0;
};

/// Backtracking line search with polynomial models: full step first, a
/// quadratic model on the first backtrack, cubic models afterwards, each
/// minimizer clamped into [lo, hi] * alpha. Non-finite energies reject the
/// step and halve. Requires dphi0 < 0.
LineSearchOutcome cubic_backtracking(const std::function<double(double)>& phi, double phi0,
                                     double dphi0, const LineSearchOptions& opts = {});

/// Convenience wrapper: phi(alpha) = f.energy(x + alpha dx).
LineSearchOutcome cubic_backtracking(const EnergyFunctional& f, const DofVector& x,
                                     const DofVector& dx, const DofVector& gradient_at_x,
                                     const LineSearchOptions& opts = {});

enum class SolveStrategy { Cg, CgQn, CgMg };

std::string to_string(SolveStrategy s);

enum class RunStatus { Converged, MaxNewtonIterations, LineSearchFailure, BudgetExceeded, SolverError };

std::string to_string(RunStatus s);

struct NewtonConfig {
  int dim = 2;                      ///< spatial dimension, sets the level cost ratio
  double tol_abs = 1e-6;            ///< stop at ||F|| below this
  double forcing_cap = 0.5;         ///< eta_k = min(cap, ||F_k||)
  std::optional<double> forcing_override;
  int max_iterations = 100;
  int max_krylov_iterations = 0;    ///< 0: number of free dofs on the fine level
  SolveStrategy strategy = SolveStrategy::CgMg;
  MgOptions mg{};
  LineSearchOptions line_search{};
  int lbfgs_pairs = 20;             ///< outer quasi-Newton memory (CgQn strategy)
  long long eval_budget = 0;        ///< cap on effective gradient evaluations, 0: off
  bool verify_forcing = false;      ///< debug: check ||F + J dx|| <= eta ||F|| per step
};

struct RunReport {
  RunStatus status = RunStatus::SolverError;
  std::string message;
  int newton_iterations = 0;
  long long total_krylov_iterations = 0;
  std::vector<int> krylov_per_newton;
  std::vector<double> residual_norms;   ///< ||F|| at each iterate, including the last
  std::vector<double> step_lengths;
  std::vector<long long> gradient_evals_per_level;
  double ge_effective = 0.0;
  double age = 0.0;                     ///< ge_effective / total_krylov_iterations
  long long shift_count = 0;
  std::vector<ShiftEvent> shift_events;
  long long v_cycles = 0;
  double final_residual = 0.0;
  std::vector<bool> forcing_satisfied;  ///< filled when verify_forcing is on
};

/// Work metric across a hierarchy: fine-level evaluations count 1, each
/// coarsening halves the mesh per axis, so a level-l evaluation costs
/// 2^{-dim (L - l)} fine equivalents.
double effective_gradient_evals(const std::vector<long long>& per_level, int dim);

/// Inexact Newton driver on the finest level of a hierarchy. Solves
/// J dx = -F by CG with the configured preconditioning strategy, globalized
/// by the cubic backtracking line search on the energy. Directions that fail
/// descent or come from a broken-down solve fall back to the last safe CG
/// iterate, or to steepest descent when that iterate is unusable.
RunReport newton_solve(const TransferSet& transfers, std::vector<const EnergyFunctional*> levels,
                       DofVector x0, const NewtonConfig& cfg, RunInstruments& instruments,
                       DofVector* x_out = nullptr);

}  // namespace jfmg
