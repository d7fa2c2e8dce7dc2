#pragma once

#include <memory>

#include "jfmg/functional.hpp"

namespace jfmg {

/// Abstract symmetric linear operator on one level. apply() returns false when
/// the result is non-finite; callers treat that as a solver breakdown.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual int level() const = 0;
  virtual std::size_t n_dofs() const = 0;
  virtual const ConstraintSet& constraints() const = 0;
  virtual bool apply(const DofVector& u, DofVector& out) const = 0;
};

/// Finite difference step for a directional derivative at x along u:
///   eps = sqrt(eps_mach) * sum_i (1 + |x_i|) / (n * ||u||)
/// Balances truncation against roundoff for gradients accurate to machine
/// precision. Throws std::invalid_argument when u = 0.
double fd_epsilon(const DofVector& x, const DofVector& u);

/// <p, A p> / <p, p> given p and A p. Throws std::invalid_argument when p = 0.
double rayleigh_quotient(const DofVector& p, const DofVector& Ap);

/// Matrix-free Jacobian of an energy gradient, evaluated by one-sided finite
/// differences around a frozen base point:
///
///   (J + shift I) u  ~=  (F(x + eps Z u) - F(x)) / eps + shift Z u
///
/// Z masks constrained dofs, so the operator acts on the free subspace and
/// returns zero rows on Dirichlet entries. Each apply() costs exactly one
/// gradient evaluation; eps is recomputed per direction. The base gradient
/// F(x) is shared between shifted views of the same operator.
class JacobianOperator final : public LinearOperator {
 public:
  JacobianOperator(const EnergyFunctional& f, DofVector base_point, DofVector base_gradient,
                   double shift = 0.0);

  int level() const override { return f_->level(); }
  std::size_t n_dofs() const override { return f_->n_dofs(); }
  const ConstraintSet& constraints() const override { return f_->constraints(); }
  bool apply(const DofVector& u, DofVector& out) const override;

  /// Same base point and gradient, different diagonal shift. Cheap.
  JacobianOperator with_shift(double shift) const;

  double shift() const { return shift_; }
  const DofVector& base_point() const { return *x_; }
  const DofVector& base_gradient() const { return *f0_; }
  const EnergyFunctional& functional() const { return *f_; }

 private:
  JacobianOperator(const EnergyFunctional& f, std::shared_ptr<const DofVector> x,
                   std::shared_ptr<const DofVector> f0, double sum_abs, double shift);

  const EnergyFunctional* f_;
  std::shared_ptr<const DofVector> x_;
  std::shared_ptr<const DofVector> f0_;
  double sum_one_plus_abs_;  ///< cached sum_i (1 + |x_i|)
  double shift_;
};

}  // namespace jfmg
