#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "jfmg/dof_vector.hpp"

namespace jfmg {

/// Dirichlet constraints handled by elimination: prescribed values are imposed
/// on iterates, while gradients, residuals and Krylov vectors are zeroed on the
/// constrained entries so every solver works on the free subspace.
class ConstraintSet {
 public:
  ConstraintSet() = default;
  explicit ConstraintSet(std::size_t n_dofs) : mask_(n_dofs, 0), values_(n_dofs, 0.0) {}

  void constrain(std::size_t dof, double value) {
    if (dof >= mask_.size()) throw std::out_of_range("ConstraintSet: dof out of range");
    if (!mask_[dof]) ++n_constrained_;
    mask_[dof] = 1;
    values_[dof] = value;
  }

  bool is_constrained(std::size_t dof) const { return mask_[dof] != 0; }

  std::size_t size() const { return mask_.size(); }
  std::size_t constrained_count() const { return n_constrained_; }
  std::size_t free_count() const { return mask_.size() - n_constrained_; }

  /// Zero the constrained entries (residuals, search directions, corrections).
  void zero_constrained(DofVector& v) const {
    for (std::size_t i = 0; i < mask_.size(); ++i)
      if (mask_[i]) v[i] = 0.0;
  }

  /// Overwrite the constrained entries with the prescribed boundary values.
  void impose_values(DofVector& v) const {
    for (std::size_t i = 0; i < mask_.size(); ++i)
      if (mask_[i]) v[i] = values_[i];
  }

  double value(std::size_t dof) const { return values_[dof]; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }

 private:
  std::vector<std::uint8_t> mask_;
  std::vector<double> values_;
  std::size_t n_constrained_ = 0;
};

}  // namespace jfmg
