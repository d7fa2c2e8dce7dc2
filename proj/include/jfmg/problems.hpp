#pragma once

#include <string>
#include <vector>

#include "jfmg/functional.hpp"
#include "jfmg/mesh.hpp"
#include "jfmg/stats.hpp"

namespace jfmg {

enum class ProblemKind { Bratu, MinimalSurface, NeoHookean };

std::string to_string(ProblemKind k);

struct MaterialParams {
  double bratu_lambda = 5.0;
  double youngs_modulus = 10.0;
  double poisson_ratio = 0.3;

  double shear_modulus() const { return youngs_modulus / (2.0 * (1.0 + poisson_ratio)); }
  double lame_lambda() const {
    return youngs_modulus * poisson_ratio / ((1.0 + poisson_ratio) * (1.0 - 2.0 * poisson_ratio));
  }
};

/// Finite element discretization of one benchmark energy on one mesh level.
///
///   Bratu            Psi(u) = int 1/2 |grad u|^2 - lambda exp(u),   P1, 1-point quadrature
///   MinimalSurface   Psi(u) = int sqrt(1 + |grad u|^2),             P1, 1-point quadrature
///   NeoHookean       Psi(u) = int mu/2 (tr(F^T F) - 3) - mu ln J
///                             + lambda/2 (ln J)^2,  F = I + grad u, Q1, 2x2x2 Gauss
///
/// The deformation gradient must stay invertible: J <= 0 at any quadrature
/// point makes energy() return +infinity and gradient() fail.
class ProblemDefinition final : public EnergyFunctional {
 public:
  ProblemDefinition(const MeshLevel& mesh, ProblemKind kind, MaterialParams params = {},
                    GradientTally* tally = nullptr);

  int level() const override { return mesh_->level_index; }
  std::size_t n_dofs() const override { return mesh_->n_dofs(); }
  const ConstraintSet& constraints() const override { return mesh_->constraint_set; }

  double energy(const DofVector& x) const override;
  bool gradient(const DofVector& x, DofVector& out) const override;

  /// Zero vector with the prescribed boundary values imposed.
  DofVector initial_guess() const;

  /// Smallest det(I + grad u) over all quadrature points (hyperelastic only).
  double min_jacobian_determinant(const DofVector& x) const;

  ProblemKind kind() const { return kind_; }
  const MeshLevel& mesh() const { return *mesh_; }
  const MaterialParams& params() const { return params_; }

 private:
  double energy_p1(const DofVector& x) const;
  double energy_hex(const DofVector& x) const;
  bool gradient_p1(const DofVector& x, DofVector& out) const;
  bool gradient_hex(const DofVector& x, DofVector& out) const;

  const MeshLevel* mesh_;
  ProblemKind kind_;
  MaterialParams params_;
  GradientTally* tally_;
};

/// Boundary data for the benchmarks.
DirichletFn bratu_boundary();             ///< u = 0 on the whole square boundary
DirichletFn minimal_surface_boundary();   ///< u = 0 at x in {0,1}, u = x(1-x) at y in {0,1}
DirichletFn beam_rotation_boundary();     ///< clamped at x = 0, half-rotated by pi/6 at x = 10

/// Mesh hierarchy plus one ProblemDefinition per level, all sharing a tally.
struct ProblemHierarchy {
  MeshHierarchy mesh;
  std::vector<ProblemDefinition> problems;

  const ProblemDefinition& finest() const { return problems.back(); }
  std::vector<const EnergyFunctional*> functionals() const {
    std::vector<const EnergyFunctional*> out;
    for (const auto& p : problems) out.push_back(&p);
    return out;
  }
};

/// Canonical benchmark setup: unit square with a 25 x 25 coarse grid for the
/// scalar problems, a 10 x 1 x 1 beam of extent 10 x 1 x 1 for hyperelasticity.
/// `n0_override` (scalar problems) and `beam_n0_override` shrink the coarse
/// grid for tests.
ProblemHierarchy build_problem_hierarchy(ProblemKind kind, int n_levels, GradientTally* tally = nullptr,
                                         MaterialParams params = {}, int n0_override = 0,
                                         std::array<int, 3> beam_n0_override = {0, 0, 0});

}  // namespace jfmg
