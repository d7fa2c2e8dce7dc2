#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jfmg/chebyshev.hpp"
#include "jfmg/functional.hpp"
#include "jfmg/jacobian.hpp"
#include "jfmg/krylov.hpp"
#include "jfmg/stats.hpp"
#include "jfmg/transfer.hpp"

namespace jfmg {

/// Coarse-level solver of the V-cycle.
enum class CoarseVariant { Cg, CgQn, ShiftedCgQn };

std::string to_string(CoarseVariant v);

struct MgOptions {
  int pre_sweeps = 5;
  int post_sweeps = 5;
  ChebyshevInterval interval{};
  PowerMethodOptions power{};
  CoarseVariant coarse_variant = CoarseVariant::ShiftedCgQn;
  double coarse_tol_abs = 1e-12;
  int coarse_max_iterations = 0;   ///< 0: number of free coarse dofs
  double shift_growth = 5.0;       ///< amplification of the accumulated shift
  int max_shift_rounds = 25;       ///< safety cap per coarse solve
  int lbfgs_pairs = 20;
  std::uint64_t seed = 0;
};

/// Matrix-free geometric multigrid V-cycle around the finite difference
/// Jacobian of an energy hierarchy, used as a preconditioner for an outer
/// Krylov method.
///
/// setup() rebuilds the per-level state for the current Newton iterate:
/// iterates are projected down the hierarchy, one gradient per coarse level is
/// cached as the finite-difference base, and the spectral radius of each level
/// operator is re-estimated (warm started from the previous Newton step).
///
/// v_cycle() runs Chebyshev pre-smoothing, restricts the residual, recurses,
/// adds the interpolated coarse correction and post-smooths. The coarsest
/// level is solved by CG; in the quasi-Newton variants an L-BFGS
/// preconditioner is built from secant pairs sampled during the very first
/// coarse solve and reused for the rest of the run. The shifted variant
/// responds to negative curvature by amplifying an accumulated diagonal shift
/// and re-solving from the last safe iterate.
///
/// The accumulated shifting parameter is carried across coarse solves within
/// one Newton step and reset by setup(). Re-discovering the shift from zero
/// on every coarse solve would make the effective shift fluctuate with the
/// incoming right-hand side, and the V-cycle would then act as a different
/// linear map on every outer CG iteration; since the outer method is plain
/// (non-flexible) CG, that inconsistency stalls it badly on nearly singular
/// indefinite coarse systems. Carrying the parameter keeps the coarse
/// operator fixed between shift events, which is what makes the shifted
/// variant a stable preconditioner in practice.
class MgContext {
 public:
  MgContext(const TransferSet& transfers, std::vector<const EnergyFunctional*> levels,
            const MgOptions& opts, RunInstruments* instruments = nullptr);

  /// Refresh per-level iterates, gradients and eigenvalue estimates for the
  /// fine iterate x of Newton step `newton_iteration`. Returns false when a
  /// coarse gradient or an eigenvalue estimate fails.
  bool setup(const DofVector& x, const DofVector& gradient_at_x, int newton_iteration);

  /// z = V(b) on the finest level. Counts one cycle.
  bool apply(const DofVector& b, DofVector& z);

  /// Recursive cycle entry, exposed for tests.
  bool v_cycle(const DofVector& b, int level, DofVector& out);

  const JacobianOperator& level_operator(int level) const;
  const EigenEstimate& eigen_estimate(int level) const;
  int finest_level() const { return static_cast<int>(levels_.size()) - 1; }
  long long shift_count() const { return shift_count_; }
  /// Accumulated shifting parameter currently carried between coarse solves
  /// (negative or zero, in eigenvalue units). Reset by setup().
  double shift_carry() const { return shift_carry_; }
  /// Number of secant pairs frozen into the coarse preconditioner (0 until
  /// the first coarse solve has run).
  int coarse_pair_count() const {
    return coarse_precond_ ? static_cast<int>(coarse_precond_->pair_count()) : 0;
  }

 private:
  bool coarse_solve(const DofVector& b, DofVector& out);

  const TransferSet* transfers_;
  std::vector<const EnergyFunctional*> levels_;
  MgOptions opts_;
  RunInstruments* instruments_;

  std::vector<std::optional<JacobianOperator>> ops_;
  std::vector<std::optional<EigenEstimate>> eigs_;
  std::optional<LbfgsPreconditioner> coarse_precond_;
  bool coarse_pairs_frozen_ = false;
  int newton_iteration_ = 0;
  int cycle_in_step_ = 0;
  long long shift_count_ = 0;
  double shift_carry_ = 0.0;
};

/// Adapts an MgContext to the Preconditioner interface of the outer CG.
class MgPreconditioner final : public Preconditioner {
 public:
  explicit MgPreconditioner(MgContext& ctx) : ctx_(&ctx) {}
  bool apply(const DofVector& r, DofVector& z) const override { return ctx_->apply(r, z); }

 private:
  MgContext* ctx_;
};

}  // namespace jfmg
