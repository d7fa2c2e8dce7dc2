#include "jfmg/jacobian.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace jfmg {

namespace {
const double kSqrtEps = std::sqrt(std::numeric_limits<double>::epsilon());

double sum_one_plus_abs(const DofVector& x) {
  double s = 0.0;
  for (double v : x.values) s += 1.0 + std::abs(v);
  return s;
}
}  // namespace

double fd_epsilon(const DofVector& x, const DofVector& u) {
  const double un = norm2(u);
  if (un == 0.0) throw std::invalid_argument("fd_epsilon: zero direction");
  return kSqrtEps * sum_one_plus_abs(x) / (static_cast<double>(x.size()) * un);
}

double rayleigh_quotient(const DofVector& p, const DofVector& Ap) {
  const double pp = dot(p, p);
  if (pp == 0.0) throw std::invalid_argument("rayleigh_quotient: zero vector");
  return dot(p, Ap) / pp;
}

JacobianOperator::JacobianOperator(const EnergyFunctional& f, DofVector base_point,
                                   DofVector base_gradient, double shift)
    : f_(&f),
      x_(std::make_shared<const DofVector>(std::move(base_point))),
      f0_(std::make_shared<const DofVector>(std::move(base_gradient))),
      sum_one_plus_abs_(sum_one_plus_abs(*x_)),
      shift_(shift) {
  if (x_->size() != f.n_dofs() || f0_->size() != f.n_dofs())
    throw std::invalid_argument("JacobianOperator: size mismatch");
}

JacobianOperator::JacobianOperator(const EnergyFunctional& f, std::shared_ptr<const DofVector> x,
                                   std::shared_ptr<const DofVector> f0, double sum_abs, double shift)
    : f_(&f), x_(std::move(x)), f0_(std::move(f0)), sum_one_plus_abs_(sum_abs), shift_(shift) {}

JacobianOperator JacobianOperator::with_shift(double shift) const {
  return JacobianOperator(*f_, x_, f0_, sum_one_plus_abs_, shift);
}

bool JacobianOperator::apply(const DofVector& u, DofVector& out) const {
  const std::size_t n = f_->n_dofs();
  if (u.size() != n) throw std::invalid_argument("JacobianOperator::apply: size mismatch");
  const ConstraintSet& bc = f_->constraints();

  double un2 = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (!bc.is_constrained(i)) un2 += u[i] * u[i];
  const double un = std::sqrt(un2);

  out.level = f_->level();
  if (un == 0.0) {
    // Zero direction on the free subspace: J u = 0 without spending an
    // evaluation.
    out.values.assign(n, 0.0);
    return true;
  }

  const double eps = kSqrtEps * sum_one_plus_abs_ / (static_cast<double>(n) * un);

  DofVector xp(f_->level(), n);
  for (std::size_t i = 0; i < n; ++i)
    xp[i] = bc.is_constrained(i) ? (*x_)[i] : (*x_)[i] + eps * u[i];

  DofVector gp;
  if (!f_->gradient(xp, gp)) return false;

  out.values.resize(n);
  const double inv_eps = 1.0 / eps;
  for (std::size_t i = 0; i < n; ++i) {
    if (bc.is_constrained(i)) {
      out[i] = 0.0;
    } else {
      out[i] = (gp[i] - (*f0_)[i]) * inv_eps + shift_ * u[i];
    }
  }
  return is_finite(out);
}

}  // namespace jfmg
