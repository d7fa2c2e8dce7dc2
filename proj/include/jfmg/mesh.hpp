#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "jfmg/constraints.hpp"

namespace jfmg {

using Point = std::array<double, 3>;

/// Boundary condition callback. Called once per boundary node; returns true if
/// the node is constrained and fills `values` (dofs_per_node entries) with the
/// prescribed values.
using DirichletFn = std::function<bool(const Point& p, double* values)>;

/// One level of a nested structured hierarchy: P1 triangles on a rectangle
/// (dim == 2) or Q1 hexahedra on a box (dim == 3). Nodes are ordered
/// lexicographically with x fastest, then y, then z, so grid indices and node
/// indices convert in O(1). Dofs are interleaved: dof(node, c) = node * dpn + c.
struct MeshLevel {
  int level_index = 0;
  int dim = 2;
  int dofs_per_node = 1;
  std::array<int, 3> cells{1, 1, 1};  ///< cell counts per axis; cells[2] == 0 in 2-D
  Point box_lo{0.0, 0.0, 0.0};
  Point box_hi{1.0, 1.0, 1.0};

  std::vector<Point> node_coords;
  std::vector<int> elem_nodes;        ///< flattened connectivity, stride nodes_per_elem()
  std::vector<int> dirichlet_nodes;   ///< sorted node indices carrying constraints
  ConstraintSet constraint_set;       ///< per-dof mask and prescribed values

  int nodes_per_elem() const { return dim == 2 ? 3 : 8; }
  int nodes_along(int axis) const { return axis < dim ? cells[axis] + 1 : 1; }

  std::size_t n_nodes() const { return node_coords.size(); }
  std::size_t n_elems() const { return elem_nodes.size() / static_cast<std::size_t>(nodes_per_elem()); }
  std::size_t n_dofs() const { return n_nodes() * static_cast<std::size_t>(dofs_per_node); }

  int node_index(int i, int j, int k) const {
    return (k * nodes_along(1) + j) * nodes_along(0) + i;
  }
  std::array<int, 3> grid_coords(int node) const {
    const int nx = nodes_along(0), ny = nodes_along(1);
    return {node % nx, (node / nx) % ny, node / (nx * ny)};
  }
  bool on_boundary(int node) const {
    const auto g = grid_coords(node);
    for (int a = 0; a < dim; ++a)
      if (g[static_cast<std::size_t>(a)] == 0 || g[static_cast<std::size_t>(a)] == cells[static_cast<std::size_t>(a)]) return true;
    return false;
  }

  const int* element(std::size_t e) const { return elem_nodes.data() + e * static_cast<std::size_t>(nodes_per_elem()); }
};

struct MeshHierarchy {
  std::vector<MeshLevel> levels;

  int n_levels() const { return static_cast<int>(levels.size()); }
  const MeshLevel& finest() const { return levels.back(); }
  const MeshLevel& coarsest() const { return levels.front(); }
};

/// Uniform refinement: every cell splits into 2^dim children, coarse nodes are
/// reproduced exactly at even grid indices. Boundary tags are not carried over;
/// re-apply the Dirichlet callback on the new level.
MeshLevel refine(const MeshLevel& coarse);

/// Tag boundary nodes via the callback and record the prescribed dof values.
void apply_dirichlet(MeshLevel& mesh, const DirichletFn& fn);

/// Triangulated unit square, n0 x n0 cells on the coarsest level, one dof per
/// node. All cell diagonals run from (low,low) to (high,high) so refinement
/// stays nested.
MeshHierarchy build_unit_square_hierarchy(int n0, int n_levels, const DirichletFn& dirichlet);

/// Hexahedral box [0,len_x] x [0,len_y] x [0,len_z], three dofs per node.
MeshHierarchy build_box_hierarchy(const Point& extent, const std::array<int, 3>& n0, int n_levels,
                                  const DirichletFn& dirichlet);

/// Signed measure of one element (area in 2-D, volume in 3-D).
double element_measure(const MeshLevel& mesh, std::size_t e);

}  // namespace jfmg
