#pragma once

#include <cstddef>
#include <vector>

#include "jfmg/dof_vector.hpp"
#include "jfmg/mesh.hpp"

namespace jfmg {

/// Grid transfer operators between adjacent levels of a nested hierarchy.
///
/// The interpolation I maps coarse nodal values to fine nodal values by the
/// finite element basis: copy at coincident nodes, edge midpoints average
/// their two edge endpoints. On triangulated quads the (odd, odd) fine node
/// sits on the cell diagonal and averages the two diagonal endpoints; on
/// hexahedra face and cell centers average 4 and 8 coarse nodes.
///
/// Residual restriction is R = I^T, iterate projection is P = 2^{-dim} I^T.
/// All three sandwich the operator between constraint maskings so Dirichlet
/// dofs never leak into the free equations; project_iterate then overwrites
/// the coarse Dirichlet entries with their prescribed values.
class TransferSet {
 public:
  explicit TransferSet(const MeshHierarchy& hierarchy);

  /// fine = Z_f I (Z_c coarse)
  void interpolate(int fine_level, const DofVector& coarse, DofVector& fine) const;

  /// coarse = Z_c I^T (Z_f fine)
  void restrict_residual(int fine_level, const DofVector& fine, DofVector& coarse) const;

  /// coarse = 2^{-dim} I^T (Z_f fine), then coarse Dirichlet values imposed
  void project_iterate(int fine_level, const DofVector& fine, DofVector& coarse) const;

  /// Interpolation stencil of one fine node: coarse node ids plus weights.
  struct NodeStencil {
    std::vector<int> coarse_nodes;
    std::vector<double> weights;
  };
  NodeStencil node_stencil(int fine_level, int fine_node) const;

  int n_levels() const;

 private:
  struct LevelStencil {
    std::vector<int> offsets;      ///< CSR offsets over fine nodes
    std::vector<int> coarse_node;
    std::vector<double> weight;
  };

  void check_fine_level(int fine_level) const;

  const MeshHierarchy* hierarchy_;
  std::vector<LevelStencil> stencils_;  ///< entry l-1 couples levels l-1 and l
};

}  // namespace jfmg
