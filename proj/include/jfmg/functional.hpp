#pragma once

#include <cstddef>

#include "jfmg/constraints.hpp"
#include "jfmg/dof_vector.hpp"

namespace jfmg {

/// Discrete energy functional on one mesh level. Minimizers of energy() are
/// roots of gradient(), which is the residual the nonlinear solver drives to
/// zero. Implementations must zero gradient entries at constrained dofs and
/// may return +infinity from energy() to flag inadmissible states (the line
/// search treats that as an automatic rejection).
class EnergyFunctional {
 public:
  virtual ~EnergyFunctional() = default;

  virtual int level() const = 0;
  virtual std::size_t n_dofs() const = 0;
  virtual const ConstraintSet& constraints() const = 0;

  virtual double energy(const DofVector& x) const = 0;

  /// F = grad Psi(x). Returns false if any entry is non-finite; the output is
  /// then unspecified. Each call counts as one gradient evaluation.
  virtual bool gradient(const DofVector& x, DofVector& out) const = 0;
};

}  // namespace jfmg
