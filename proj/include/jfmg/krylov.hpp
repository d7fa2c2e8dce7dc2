#pragma once

#include <cstddef>
#include <vector>

#include "jfmg/dof_vector.hpp"
#include "jfmg/jacobian.hpp"

namespace jfmg {

/// Preconditioner interface: z = M r. Returns false on non-finite output.
class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual bool apply(const DofVector& r, DofVector& z) const = 0;
};

enum class CgStatus { Converged, MaxIterations, NegativeCurvature, Breakdown };

struct CgOptions {
  double tol_abs = 0.0;       ///< absolute residual tolerance
  double forcing = 0.0;       ///< relative tolerance against ||b||
  int max_iterations = 100;
  double curvature_rel_tol = 1e-12;  ///< <p,Ap> < tol * <p,p> flags negative curvature
};

struct CgOutcome {
  CgStatus status = CgStatus::Breakdown;
  DofVector solution;
  int iterations = 0;         ///< completed steps (solution updates)
  double residual_norm = 0.0;
  double lambda_c = 0.0;      ///< curvature estimate <p,Ap>/<p,p> on NegativeCurvature
};

/// One secant observation (s, y) = (alpha p, alpha A p) from a CG step.
struct SecantPair {
  DofVector s;
  DofVector y;
};

/// Records secant pairs during a CG run under a fixed memory budget. Once
/// 2 * target pairs are stored, every other stored pair is dropped and the
/// sampling stride doubles, keeping the record uniformly spread over the
/// iteration history. finalize() thins to the target count.
class SecantCollector {
 public:
  explicit SecantCollector(int target_pairs = 20);

  void observe(const DofVector& s, const DofVector& y);
  void finalize();

  const std::vector<SecantPair>& pairs() const { return pairs_; }
  long long observed() const { return observed_; }
  int target() const { return target_; }

 private:
  int target_;
  long long observed_ = 0;
  long long stride_ = 1;
  std::vector<SecantPair> pairs_;
};

/// Indices {floor(j (count-1) / (k-1))} for j = 0..k-1 with k = min(m, count),
/// deduplicated, ascending. Uniformly spread over [0, count).
std::vector<std::size_t> uniform_sample_indices(std::size_t count, int m);

/// Limited-memory BFGS approximation of A^{-1} built from secant pairs, used
/// as a fixed preconditioner (pairs are frozen at construction). Standard two
/// loop recursion; the initial scaling gamma = <s_m, y_m> / <y_m, y_m> comes
/// from the newest pair. Pairs with <s, y> <= 0 are skipped.
class LbfgsPreconditioner final : public Preconditioner {
 public:
  explicit LbfgsPreconditioner(std::vector<SecantPair> pairs);

  bool apply(const DofVector& r, DofVector& z) const override;
  std::size_t pair_count() const { return pairs_.size(); }
  double gamma() const { return gamma_; }

 private:
  std::vector<SecantPair> pairs_;
  std::vector<double> rho_;  ///< 1 / <s_i, y_i>
  double gamma_ = 1.0;
};

/// Preconditioned conjugate gradients for A s = b with A symmetric on the
/// free subspace. Stops at ||r|| <= max(tol_abs, forcing * ||b||). A step with
/// <p, A p> < curvature_rel_tol * <p, p> terminates with the last iterate and
/// the offending curvature estimate, so callers can shift the operator and
/// restart. An indefinite preconditioner (<r, z> <= 0) is tolerated; only
/// non-finite quantities end in Breakdown. Each iteration costs one operator
/// application, plus one more when s0 is nonzero.
CgOutcome cg_solve(const LinearOperator& A, const DofVector& b, const DofVector& s0,
                   const Preconditioner* M, const CgOptions& opts, SecantCollector* collector = nullptr);

}  // namespace jfmg
