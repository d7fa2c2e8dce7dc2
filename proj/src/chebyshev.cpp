#include "jfmg/chebyshev.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace jfmg {

std::optional<EigenEstimate> estimate_lambda_max(const LinearOperator& A, const DofVector* warm_start,
                                                 const PowerMethodOptions& opts) {
  const std::size_t n = A.n_dofs();
  const ConstraintSet& bc = A.constraints();

  DofVector v(A.level(), n);
  if (warm_start && warm_start->size() == n && norm2(*warm_start) > 0.0) {
    v.values = warm_start->values;
  } else {
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double& x : v.values) x = gauss(rng);
  }
  bc.zero_constrained(v);
  const double vn = norm2(v);
  if (vn == 0.0) throw std::invalid_argument("estimate_lambda_max: empty free subspace");
  scale(1.0 / vn, v);

  EigenEstimate est;
  DofVector w;
  double lambda_prev = 0.0;
  for (int k = 1; k <= opts.max_iterations; ++k) {
    if (!A.apply(v, w)) return std::nullopt;
    const double lambda = norm2(w);
    est.iterations = k;
    est.lambda_max = lambda;
    if (lambda == 0.0) break;  // operator vanishes on the free subspace
    scale(1.0 / lambda, w);
    std::swap(v.values, w.values);
    if (k >= 2 && std::abs(lambda - lambda_prev) < opts.rel_tol * std::abs(lambda)) break;
    lambda_prev = lambda;
  }
  est.eigenvector = std::move(v);
  return est;
}

bool chebyshev_smooth(const LinearOperator& A, const DofVector& b, double lambda_max, int sweeps,
                      DofVector& s, const ChebyshevInterval& interval) {
  if (lambda_max <= 0.0) throw std::invalid_argument("chebyshev_smooth: lambda_max must be positive");
  if (s.size() != b.size()) throw std::invalid_argument("chebyshev_smooth: size mismatch");
  const double lo = interval.lo_fraction * lambda_max;
  const double hi = interval.hi_fraction * lambda_max;
  const double theta = 0.5 * (hi + lo);
  const double delta = 0.5 * (hi - lo);
  const double sigma = theta / delta;

  DofVector r, d(s.level, s.size());
  double rho_prev = 0.0;
  for (int k = 0; k < sweeps; ++k) {
    if (!A.apply(s, r)) return false;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    if (k == 0) {
      rho_prev = 1.0 / sigma;
      for (std::size_t i = 0; i < r.size(); ++i) d[i] = r[i] / theta;
    } else {
      const double rho = 1.0 / (2.0 * sigma - rho_prev);
      const double c1 = rho * rho_prev, c2 = 2.0 * rho / delta;
      for (std::size_t i = 0; i < r.size(); ++i) d[i] = c1 * d[i] + c2 * r[i];
      rho_prev = rho;
    }
    axpy(1.0, d, s);
  }
  return is_finite(s);
}

double chebyshev_error_bound(int sweeps, const ChebyshevInterval& interval) {
  if (sweeps <= 0) return 1.0;
  const double sigma = (interval.hi_fraction + interval.lo_fraction) / (interval.hi_fraction - interval.lo_fraction);
  return 1.0 / std::cosh(sweeps * std::acosh(sigma));
}

}  // namespace jfmg
