#include "jfmg/multigrid.hpp"

#include <stdexcept>

namespace jfmg {

std::string to_string(CoarseVariant v) {
  switch (v) {
    case CoarseVariant::Cg: return "cg";
    case CoarseVariant::CgQn: return "cg-qn";
    case CoarseVariant::ShiftedCgQn: return "shifted";
  }
  return "unknown";
}

MgContext::MgContext(const TransferSet& transfers, std::vector<const EnergyFunctional*> levels,
                     const MgOptions& opts, RunInstruments* instruments)
    : transfers_(&transfers), levels_(std::move(levels)), opts_(opts), instruments_(instruments) {
  if (levels_.empty()) throw std::invalid_argument("MgContext: empty hierarchy");
  if (transfers.n_levels() != static_cast<int>(levels_.size()))
    throw std::invalid_argument("MgContext: transfer/functional level count mismatch");
  for (std::size_t l = 0; l < levels_.size(); ++l)
    if (levels_[l]->level() != static_cast<int>(l))
      throw std::invalid_argument("MgContext: functionals must be ordered coarse to fine");
  ops_.resize(levels_.size());
  eigs_.resize(levels_.size());
}

bool MgContext::setup(const DofVector& x, const DofVector& gradient_at_x, int newton_iteration) {
  const int L = finest_level();
  newton_iteration_ = newton_iteration;
  cycle_in_step_ = 0;
  shift_carry_ = 0.0;

  std::vector<DofVector> xs(levels_.size()), fs(levels_.size());
  xs[static_cast<std::size_t>(L)] = x;
  fs[static_cast<std::size_t>(L)] = gradient_at_x;
  for (int l = L; l >= 1; --l) {
    transfers_->project_iterate(l, xs[static_cast<std::size_t>(l)], xs[static_cast<std::size_t>(l - 1)]);
    if (!levels_[static_cast<std::size_t>(l - 1)]->gradient(xs[static_cast<std::size_t>(l - 1)],
                                                            fs[static_cast<std::size_t>(l - 1)]))
      return false;
  }
  for (int l = 0; l <= L; ++l)
    ops_[static_cast<std::size_t>(l)].emplace(*levels_[static_cast<std::size_t>(l)],
                                              std::move(xs[static_cast<std::size_t>(l)]),
                                              std::move(fs[static_cast<std::size_t>(l)]));

  // Smoothing bounds for every level that smooths. Warm starting from the
  // previous Newton step usually converges in a couple of iterations.
  for (int l = 1; l <= L; ++l) {
    PowerMethodOptions popts = opts_.power;
    popts.seed = opts_.seed + static_cast<std::uint64_t>(l) * 0x9e3779b97f4a7c15ull;
    const DofVector* warm =
        eigs_[static_cast<std::size_t>(l)] ? &eigs_[static_cast<std::size_t>(l)]->eigenvector : nullptr;
    auto est = estimate_lambda_max(*ops_[static_cast<std::size_t>(l)], warm, popts);
    if (!est || est->lambda_max <= 0.0) return false;
    if (instruments_) instruments_->power_log.emplace_back(l, est->iterations);
    eigs_[static_cast<std::size_t>(l)] = std::move(*est);
  }
  return true;
}

const JacobianOperator& MgContext::level_operator(int level) const {
  if (level < 0 || level > finest_level() || !ops_[static_cast<std::size_t>(level)])
    throw std::out_of_range("MgContext: no operator for level");
  return *ops_[static_cast<std::size_t>(level)];
}

const EigenEstimate& MgContext::eigen_estimate(int level) const {
  if (level < 1 || level > finest_level() || !eigs_[static_cast<std::size_t>(level)])
    throw std::out_of_range("MgContext: no eigenvalue estimate for level");
  return *eigs_[static_cast<std::size_t>(level)];
}

bool MgContext::apply(const DofVector& b, DofVector& z) {
  ++cycle_in_step_;
  if (instruments_) ++instruments_->v_cycles;
  return v_cycle(b, finest_level(), z);
}

bool MgContext::v_cycle(const DofVector& b, int level, DofVector& out) {
  if (level < 0 || level > finest_level()) throw std::out_of_range("MgContext: level out of range");
  if (!ops_[static_cast<std::size_t>(level)]) throw std::logic_error("MgContext: setup() has not run");
  if (level == 0) return coarse_solve(b, out);

  const JacobianOperator& A = *ops_[static_cast<std::size_t>(level)];
  const double lambda = eigs_[static_cast<std::size_t>(level)]->lambda_max;

  DofVector s(level, b.size());
  if (!chebyshev_smooth(A, b, lambda, opts_.pre_sweeps, s, opts_.interval)) return false;

  DofVector r;
  if (!A.apply(s, r)) return false;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];

  DofVector rc, c, cf;
  transfers_->restrict_residual(level, r, rc);
  if (!v_cycle(rc, level - 1, c)) return false;
  transfers_->interpolate(level, c, cf);
  axpy(1.0, cf, s);

  if (!chebyshev_smooth(A, b, lambda, opts_.post_sweeps, s, opts_.interval)) return false;
  out = std::move(s);
  return true;
}

bool MgContext::coarse_solve(const DofVector& b, DofVector& out) {
  const JacobianOperator& A0 = *ops_[0];
  CgOptions copts;
  copts.tol_abs = opts_.coarse_tol_abs;
  copts.forcing = 0.0;
  copts.max_iterations = opts_.coarse_max_iterations > 0
                             ? opts_.coarse_max_iterations
                             : static_cast<int>(A0.constraints().free_count());

  const bool quasi_newton = opts_.coarse_variant != CoarseVariant::Cg;
  SecantCollector collector(opts_.lbfgs_pairs);
  SecantCollector* collect = (quasi_newton && !coarse_pairs_frozen_) ? &collector : nullptr;
  const Preconditioner* M = (quasi_newton && coarse_precond_) ? &*coarse_precond_ : nullptr;

  DofVector s0(0, b.size());
  // The first call already applies the shift carried over from earlier coarse
  // solves of this Newton step, so consecutive V-cycles precondition with the
  // same coarse operator unless new negative curvature forces an escalation.
  double shift_acc = (opts_.coarse_variant == CoarseVariant::ShiftedCgQn) ? shift_carry_ : 0.0;
  CgOutcome res = cg_solve(A0.with_shift(-shift_acc), b, s0, M, copts, collect);
  if (collect) {
    // The pairs from the very first coarse solve of the run are frozen into
    // the preconditioner for all later cycles and Newton steps.
    coarse_precond_.emplace(collector.pairs());
    coarse_pairs_frozen_ = true;
    M = &*coarse_precond_;
  }

  if (opts_.coarse_variant == CoarseVariant::ShiftedCgQn) {
    int rounds = 0;
    while (res.status == CgStatus::NegativeCurvature && res.lambda_c < 0.0) {
      if (++rounds > opts_.max_shift_rounds)
        throw std::runtime_error("MgContext: coarse shift rounds exceeded safety cap");
      // Amplified accumulation keeps the number of re-solves small even when
      // successive curvature estimates shrink.
      shift_acc = opts_.shift_growth * std::min(res.lambda_c, shift_acc);
      ++shift_count_;
      if (instruments_)
        instruments_->shift_events.push_back(
            {newton_iteration_, cycle_in_step_, rounds, res.lambda_c, shift_acc});
      const JacobianOperator shifted = A0.with_shift(-shift_acc);
      res = cg_solve(shifted, b, res.solution, M, copts, nullptr);
    }
    shift_carry_ = shift_acc;
  }

  if (res.status == CgStatus::Breakdown) return false;
  out = std::move(res.solution);
  return true;
}

}  // namespace jfmg
