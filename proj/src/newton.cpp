#include "jfmg/newton.hpp"

#include <cmath>
#include <stdexcept>

namespace jfmg {

std::string to_string(SolveStrategy s) {
  switch (s) {
    case SolveStrategy::Cg: return "cg";
    case SolveStrategy::CgQn: return "cg-qn";
    case SolveStrategy::CgMg: return "cg-mg";
  }
  return "unknown";
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::MaxNewtonIterations: return "max-newton-iterations";
    case RunStatus::LineSearchFailure: return "line-search-failure";
    case RunStatus::BudgetExceeded: return "budget-exceeded";
    case RunStatus::SolverError: return "solver-error";
  }
  return "unknown";
}

LineSearchOutcome cubic_backtracking(const std::function<double(double)>& phi, double phi0,
                                     double dphi0, const LineSearchOptions& opts) {
  if (!(dphi0 < 0.0)) throw std::invalid_argument("cubic_backtracking: not a descent direction");

  LineSearchOutcome out;
  double alpha = 1.0;
  double phia = phi(alpha);
  out.evaluations = 1;
  double alpha_prev = 0.0, phi_prev = 0.0;
  bool have_prev = false;

  for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
    if (std::isfinite(phia) && phia <= phi0 + opts.c1 * alpha * dphi0) {
      out.success = true;
      out.alpha = alpha;
      out.phi_alpha = phia;
      return out;
    }
    double next;
    if (!std::isfinite(phia)) {
      // Inadmissible state (for example an inverted element): reject and halve.
      next = 0.5 * alpha;
    } else if (!have_prev) {
      // Quadratic model through phi0, dphi0 and the rejected sample.
      next = -dphi0 * alpha * alpha / (2.0 * (phia - phi0 - dphi0 * alpha));
    } else {
      // Cubic model through phi0, dphi0 and the last two samples.
      const double r1 = phia - phi0 - dphi0 * alpha;
      const double r2 = phi_prev - phi0 - dphi0 * alpha_prev;
      const double denom = alpha * alpha * alpha_prev * alpha_prev * (alpha - alpha_prev);
      const double a = (alpha_prev * alpha_prev * r1 - alpha * alpha * r2) / denom;
      const double b = (-alpha_prev * alpha_prev * alpha_prev * r1 + alpha * alpha * alpha * r2) / denom;
      if (a == 0.0) {
        next = -dphi0 / (2.0 * b);
      } else {
        const double disc = b * b - 3.0 * a * dphi0;
        next = disc >= 0.0 ? (-b + std::sqrt(disc)) / (3.0 * a) : 0.5 * alpha;
      }
    }
    if (!std::isfinite(next)) next = 0.5 * alpha;
    next = std::min(opts.backtrack_hi * alpha, std::max(opts.backtrack_lo * alpha, next));
    if (std::isfinite(phia)) {
      alpha_prev = alpha;
      phi_prev = phia;
      have_prev = true;
    }
    alpha = next;
    if (alpha < opts.alpha_min) return out;
    phia = phi(alpha);
    ++out.evaluations;
  }
  return out;
}

LineSearchOutcome cubic_backtracking(const EnergyFunctional& f, const DofVector& x,
                                     const DofVector& dx, const DofVector& gradient_at_x,
                                     const LineSearchOptions& opts) {
  const double phi0 = f.energy(x);
  const double dphi0 = dot(gradient_at_x, dx);
  DofVector trial(x.level, x.size());
  auto phi = [&](double a) {
    for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + a * dx[i];
    return f.energy(trial);
  };
  return cubic_backtracking(phi, phi0, dphi0, opts);
}

double effective_gradient_evals(const std::vector<long long>& per_level, int dim) {
  const int L = static_cast<int>(per_level.size()) - 1;
  double total = 0.0;
  for (int l = 0; l <= L; ++l)
    total += std::ldexp(static_cast<double>(per_level[static_cast<std::size_t>(l)]), -dim * (L - l));
  return total;
}

RunReport newton_solve(const TransferSet& transfers, std::vector<const EnergyFunctional*> levels,
                       DofVector x0, const NewtonConfig& cfg, RunInstruments& instruments,
                       DofVector* x_out) {
  RunReport rep;
  if (levels.empty()) throw std::invalid_argument("newton_solve: empty hierarchy");
  const EnergyFunctional& fine = *levels.back();
  const ConstraintSet& bc = fine.constraints();
  if (x0.size() != fine.n_dofs()) throw std::invalid_argument("newton_solve: initial guess size mismatch");

  DofVector x = std::move(x0);
  bc.impose_values(x);

  std::optional<MgContext> mg;
  std::optional<MgPreconditioner> mg_adapter;
  if (cfg.strategy == SolveStrategy::CgMg) {
    mg.emplace(transfers, levels, cfg.mg, &instruments);
    mg_adapter.emplace(*mg);
  }
  std::optional<LbfgsPreconditioner> outer_qn;

  const int max_cg =
      cfg.max_krylov_iterations > 0 ? cfg.max_krylov_iterations : static_cast<int>(bc.free_count());

  DofVector F, dx;
  try {
    for (int k = 0;; ++k) {
      rep.newton_iterations = k;
      if (!fine.gradient(x, F)) {
        rep.status = RunStatus::SolverError;
        rep.message = "non-finite gradient at iterate";
        break;
      }
      const double fnorm = norm2(F);
      rep.residual_norms.push_back(fnorm);
      rep.final_residual = fnorm;
      if (fnorm < cfg.tol_abs) {
        rep.status = RunStatus::Converged;
        break;
      }
      if (k >= cfg.max_iterations) {
        rep.status = RunStatus::MaxNewtonIterations;
        break;
      }
      if (cfg.eval_budget > 0 &&
          effective_gradient_evals(instruments.tally.snapshot(), cfg.dim) >
              static_cast<double>(cfg.eval_budget)) {
        rep.status = RunStatus::BudgetExceeded;
        break;
      }

      const double eta =
          cfg.forcing_override ? *cfg.forcing_override : std::min(cfg.forcing_cap, fnorm);

      JacobianOperator J(fine, x, F);
      DofVector rhs = F;
      scale(-1.0, rhs);

      const Preconditioner* M = nullptr;
      SecantCollector collector(cfg.lbfgs_pairs);
      SecantCollector* collect = nullptr;
      if (cfg.strategy == SolveStrategy::CgMg) {
        if (!mg->setup(x, F, k)) {
          rep.status = RunStatus::SolverError;
          rep.message = "multigrid setup failed";
          break;
        }
        M = &*mg_adapter;
      } else if (cfg.strategy == SolveStrategy::CgQn) {
        if (outer_qn) {
          M = &*outer_qn;
        } else {
          collect = &collector;  // secant pairs come from this first solve only
        }
      }

      CgOptions copts;
      copts.tol_abs = 0.0;
      copts.forcing = eta;
      copts.max_iterations = max_cg;
      DofVector s0(fine.level(), fine.n_dofs());
      CgOutcome cg = cg_solve(J, rhs, s0, M, copts, collect);
      if (collect) outer_qn.emplace(collector.pairs());

      rep.krylov_per_newton.push_back(cg.iterations);
      rep.total_krylov_iterations += cg.iterations;

      dx = std::move(cg.solution);
      double d0 = dot(F, dx);
      const bool truncated =
          cg.status == CgStatus::NegativeCurvature || cg.status == CgStatus::Breakdown;
      if (truncated) {
        // Keep the last safe iterate when it still points downhill, otherwise
        // fall back to steepest descent.
        if (!(norm2(dx) > 0.0) || !(d0 < 0.0)) {
          dx = F;
          scale(-1.0, dx);
          d0 = -dot(F, F);
        }
      } else if (!(norm2(dx) > 0.0)) {
        dx = F;
        scale(-1.0, dx);
        d0 = -dot(F, F);
      } else if (d0 >= 0.0) {
        // A non-descent solution of the linear model: flip it.
        scale(-1.0, dx);
        d0 = -d0;
      }
      if (!(d0 < 0.0)) {
        rep.status = RunStatus::SolverError;
        rep.message = "no descent direction available";
        break;
      }

      if (cfg.verify_forcing && cg.status == CgStatus::Converged) {
        DofVector Jdx;
        bool ok = J.apply(dx, Jdx);
        if (ok) {
          axpy(1.0, F, Jdx);
          ok = norm2(Jdx) <= eta * fnorm * (1.0 + 1e-6) + 1e-12;
        }
        rep.forcing_satisfied.push_back(ok);
      }

      const LineSearchOutcome ls = cubic_backtracking(fine, x, dx, F, cfg.line_search);
      if (!ls.success) {
        rep.status = RunStatus::LineSearchFailure;
        rep.message = "line search could not find sufficient decrease";
        break;
      }
      axpy(ls.alpha, dx, x);
      rep.step_lengths.push_back(ls.alpha);
    }
  } catch (const std::runtime_error& e) {
    rep.status = RunStatus::SolverError;
    rep.message = e.what();
  }

  rep.gradient_evals_per_level = instruments.tally.snapshot();
  rep.ge_effective = effective_gradient_evals(rep.gradient_evals_per_level, cfg.dim);
  rep.age = rep.total_krylov_iterations > 0
                ? rep.ge_effective / static_cast<double>(rep.total_krylov_iterations)
                : 0.0;
  rep.shift_count = static_cast<long long>(instruments.shift_events.size());
  rep.shift_events = instruments.shift_events;
  rep.v_cycles = instruments.v_cycles;
  if (x_out) *x_out = std::move(x);
  return rep;
}

}  // namespace jfmg
