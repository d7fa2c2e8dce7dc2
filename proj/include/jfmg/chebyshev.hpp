#pragma once

#include <cstdint>
#include <optional>

#include "jfmg/dof_vector.hpp"
#include "jfmg/jacobian.hpp"

namespace jfmg {

struct PowerMethodOptions {
  int max_iterations = 30;
  double rel_tol = 1e-2;
  std::uint64_t seed = 0;
};

struct EigenEstimate {
  double lambda_max = 0.0;
  int iterations = 0;
  DofVector eigenvector;  ///< normalized, reused to warm start the next estimate
};

/// Largest-magnitude eigenvalue of A on the free subspace by power iteration.
/// `warm_start` (when nonempty) replaces the seeded random start vector.
/// Stops once successive estimates agree to rel_tol or after max_iterations
/// applications. Returns nullopt if an application goes non-finite.
std::optional<EigenEstimate> estimate_lambda_max(const LinearOperator& A, const DofVector* warm_start,
                                                 const PowerMethodOptions& opts);

/// Smoothing interval [lo_fraction * lambda_max, hi_fraction * lambda_max].
/// The upper safety factor covers the power method underestimating the true
/// extreme eigenvalue; the lower fraction targets the high end of the
/// spectrum and leaves the smooth error to coarse grids.
struct ChebyshevInterval {
  double lo_fraction = 0.06;
  double hi_fraction = 1.2;
};

/// nu iterations of the Chebyshev semi-iteration for A s = b on the interval
/// [a, b] = [lo_fraction, hi_fraction] * lambda_max, updating s in place.
/// Stationary-free: only applications of A, no inner products. The error
/// after nu sweeps is bounded by chebyshev_error_bound(nu, ...) in the A-norm.
/// Returns false if an application of A goes non-finite.
bool chebyshev_smooth(const LinearOperator& A, const DofVector& b, double lambda_max, int sweeps,
                      DofVector& s, const ChebyshevInterval& interval = {});

/// max_{t in [a,b]} |p_nu(t)| = 1 / cosh(nu acosh(sigma)), sigma = (b+a)/(b-a),
/// for the residual polynomial p_nu of the semi-iteration above.
double chebyshev_error_bound(int sweeps, const ChebyshevInterval& interval = {});

}  // namespace jfmg
