#include "jfmg/krylov.hpp"

#include <cmath>
#include <stdexcept>

namespace jfmg {

SecantCollector::SecantCollector(int target_pairs) : target_(target_pairs) {
  if (target_pairs < 1) throw std::invalid_argument("SecantCollector: target must be positive");
}

void SecantCollector::observe(const DofVector& s, const DofVector& y) {
  if (observed_ % stride_ == 0) {
    pairs_.push_back({s, y});
    if (static_cast<int>(pairs_.size()) >= 2 * target_) {
      // Halve the record, double the stride: memory stays bounded while the
      // kept pairs remain uniformly spread over the history.
      std::vector<SecantPair> kept;
      kept.reserve(pairs_.size() / 2 + 1);
      for (std::size_t i = 0; i < pairs_.size(); i += 2) kept.push_back(std::move(pairs_[i]));
      pairs_ = std::move(kept);
      stride_ *= 2;
    }
  }
  ++observed_;
}

void SecantCollector::finalize() {
  if (static_cast<int>(pairs_.size()) <= target_) return;
  const auto idx = uniform_sample_indices(pairs_.size(), target_);
  std::vector<SecantPair> kept;
  kept.reserve(idx.size());
  for (std::size_t i : idx) kept.push_back(std::move(pairs_[i]));
  pairs_ = std::move(kept);
}

std::vector<std::size_t> uniform_sample_indices(std::size_t count, int m) {
  std::vector<std::size_t> out;
  if (count == 0 || m <= 0) return out;
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(m), count);
  if (k == 1) {
    out.push_back(0);
    return out;
  }
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t idx = j * (count - 1) / (k - 1);
    if (out.empty() || out.back() != idx) out.push_back(idx);
  }
  return out;
}

LbfgsPreconditioner::LbfgsPreconditioner(std::vector<SecantPair> pairs) {
  for (auto& p : pairs) {
    const double sy = dot(p.s, p.y);
    if (sy <= 0.0 || !std::isfinite(sy)) continue;  // curvature condition
    rho_.push_back(1.0 / sy);
    pairs_.push_back(std::move(p));
  }
  if (!pairs_.empty()) {
    const SecantPair& newest = pairs_.back();
    const double yy = dot(newest.y, newest.y);
    if (yy > 0.0) gamma_ = dot(newest.s, newest.y) / yy;
  }
}

bool LbfgsPreconditioner::apply(const DofVector& r, DofVector& z) const {
  z.level = r.level;
  z.values = r.values;
  const std::size_t m = pairs_.size();
  if (m == 0) return is_finite(z);

  std::vector<double> alpha(m);
  for (std::size_t i = m; i-- > 0;) {
    alpha[i] = rho_[i] * dot(pairs_[i].s, z);
    axpy(-alpha[i], pairs_[i].y, z);
  }
  scale(gamma_, z);
  for (std::size_t i = 0; i < m; ++i) {
    const double beta = rho_[i] * dot(pairs_[i].y, z);
    axpy(alpha[i] - beta, pairs_[i].s, z);
  }
  return is_finite(z);
}

CgOutcome cg_solve(const LinearOperator& A, const DofVector& b, const DofVector& s0,
                   const Preconditioner* M, const CgOptions& opts, SecantCollector* collector) {
  const std::size_t n = A.n_dofs();
  if (b.size() != n || s0.size() != n) throw std::invalid_argument("cg_solve: size mismatch");
  const ConstraintSet& bc = A.constraints();

  CgOutcome out;
  out.solution = s0;
  out.solution.level = A.level();
  bc.zero_constrained(out.solution);
  DofVector& s = out.solution;

  DofVector bz = b;
  bc.zero_constrained(bz);
  const double bn = norm2(bz);
  const double stop_tol = std::max(opts.tol_abs, opts.forcing * bn);

  DofVector r = bz;
  DofVector Ap;
  if (norm2(s) > 0.0) {
    if (!A.apply(s, Ap)) return out;  // Breakdown
    for (std::size_t i = 0; i < n; ++i) r[i] = bz[i] - Ap[i];
  }

  out.residual_norm = norm2(r);
  if (out.residual_norm <= stop_tol) {
    out.status = CgStatus::Converged;
    if (collector) collector->finalize();
    return out;
  }

  DofVector z;
  if (M) {
    if (!M->apply(r, z)) return out;
  } else {
    z = r;
  }
  double rz = dot(r, z);
  if (!std::isfinite(rz) || rz == 0.0) return out;  // preconditioner annihilated the residual
  DofVector p = z;

  for (int it = 1; it <= opts.max_iterations; ++it) {
    if (!A.apply(p, Ap)) return out;  // Breakdown, keep last iterate
    const double pp = dot(p, p);
    const double kappa = dot(p, Ap);
    if (!std::isfinite(kappa) || pp == 0.0) return out;
    if (kappa < opts.curvature_rel_tol * pp) {
      // Direction of nonpositive curvature: report the Rayleigh quotient and
      // hand back the last safe iterate.
      out.status = CgStatus::NegativeCurvature;
      out.lambda_c = kappa / pp;
      out.residual_norm = norm2(r);
      if (collector) collector->finalize();
      return out;
    }
    const double alpha = rz / kappa;
    if (!std::isfinite(alpha)) return out;
    axpy(alpha, p, s);
    axpy(-alpha, Ap, r);
    if (collector) {
      // (alpha p, alpha A p) is a secant pair of the operator along the step.
      DofVector sp = p, yp = Ap;
      scale(alpha, sp);
      scale(alpha, yp);
      collector->observe(sp, yp);
    }
    out.iterations = it;
    out.residual_norm = norm2(r);
    if (!std::isfinite(out.residual_norm)) return out;
    if (out.residual_norm <= stop_tol) {
      out.status = CgStatus::Converged;
      if (collector) collector->finalize();
      return out;
    }
    if (M) {
      if (!M->apply(r, z)) return out;
    } else {
      z.values = r.values;
    }
    const double rz_new = dot(r, z);
    if (!std::isfinite(rz_new) || rz_new == 0.0) return out;
    const double beta = rz_new / rz;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rz = rz_new;
  }
  out.status = CgStatus::MaxIterations;
  if (collector) collector->finalize();
  return out;
}

}  // namespace jfmg
