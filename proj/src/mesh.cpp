#include "jfmg/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace jfmg {

namespace {

/// Fills coordinates and connectivity for a structured level whose cell counts
/// are already set. 2-D cells split into two triangles along the
/// (low,low)-(high,high) diagonal; 3-D cells are single hexahedra with the
/// usual counterclockwise-bottom / counterclockwise-top vertex order.
void build_structured(MeshLevel& m) {
  const int nx = m.nodes_along(0), ny = m.nodes_along(1), nz = m.nodes_along(2);
  m.node_coords.resize(static_cast<std::size_t>(nx) * ny * nz);
  std::array<double, 3> h{0.0, 0.0, 0.0};
  for (int a = 0; a < m.dim; ++a)
    h[static_cast<std::size_t>(a)] =
        (m.box_hi[static_cast<std::size_t>(a)] - m.box_lo[static_cast<std::size_t>(a)]) / m.cells[static_cast<std::size_t>(a)];

  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        m.node_coords[static_cast<std::size_t>(m.node_index(i, j, k))] = {
            m.box_lo[0] + i * h[0], m.box_lo[1] + j * h[1], m.box_lo[2] + k * h[2]};

  m.elem_nodes.clear();
  if (m.dim == 2) {
    m.elem_nodes.reserve(static_cast<std::size_t>(m.cells[0]) * m.cells[1] * 6);
    for (int j = 0; j < m.cells[1]; ++j)
      for (int i = 0; i < m.cells[0]; ++i) {
        const int n00 = m.node_index(i, j, 0), n10 = m.node_index(i + 1, j, 0);
        const int n11 = m.node_index(i + 1, j + 1, 0), n01 = m.node_index(i, j + 1, 0);
        m.elem_nodes.insert(m.elem_nodes.end(), {n00, n10, n11});
        m.elem_nodes.insert(m.elem_nodes.end(), {n00, n11, n01});
      }
  } else {
    m.elem_nodes.reserve(static_cast<std::size_t>(m.cells[0]) * m.cells[1] * m.cells[2] * 8);
    for (int k = 0; k < m.cells[2]; ++k)
      for (int j = 0; j < m.cells[1]; ++j)
        for (int i = 0; i < m.cells[0]; ++i) {
          m.elem_nodes.insert(m.elem_nodes.end(),
                              {m.node_index(i, j, k), m.node_index(i + 1, j, k), m.node_index(i + 1, j + 1, k),
                               m.node_index(i, j + 1, k), m.node_index(i, j, k + 1), m.node_index(i + 1, j, k + 1),
                               m.node_index(i + 1, j + 1, k + 1), m.node_index(i, j + 1, k + 1)});
        }
  }
  m.constraint_set = ConstraintSet(m.n_dofs());
  m.dirichlet_nodes.clear();
}

}  // namespace

MeshLevel refine(const MeshLevel& coarse) {
  MeshLevel fine;
  fine.level_index = coarse.level_index + 1;
  fine.dim = coarse.dim;
  fine.dofs_per_node = coarse.dofs_per_node;
  fine.box_lo = coarse.box_lo;
  fine.box_hi = coarse.box_hi;
  fine.cells = coarse.cells;
  for (int a = 0; a < coarse.dim; ++a) fine.cells[static_cast<std::size_t>(a)] *= 2;
  build_structured(fine);
  return fine;
}

void apply_dirichlet(MeshLevel& m, const DirichletFn& fn) {
  if (!fn) return;
  std::vector<double> vals(static_cast<std::size_t>(m.dofs_per_node), 0.0);
  m.dirichlet_nodes.clear();
  m.constraint_set = ConstraintSet(m.n_dofs());
  const int n = static_cast<int>(m.n_nodes());
  for (int node = 0; node < n; ++node) {
    if (!m.on_boundary(node)) continue;
    if (!fn(m.node_coords[static_cast<std::size_t>(node)], vals.data())) continue;
    m.dirichlet_nodes.push_back(node);
    for (int c = 0; c < m.dofs_per_node; ++c)
      m.constraint_set.constrain(static_cast<std::size_t>(node) * m.dofs_per_node + c, vals[static_cast<std::size_t>(c)]);
  }
}

MeshHierarchy build_unit_square_hierarchy(int n0, int n_levels, const DirichletFn& dirichlet) {
  if (n0 < 1) throw std::invalid_argument("build_unit_square_hierarchy: need at least one cell per side");
  if (n_levels < 1) throw std::invalid_argument("build_unit_square_hierarchy: need at least one level");
  MeshHierarchy h;
  MeshLevel base;
  base.dim = 2;
  base.dofs_per_node = 1;
  base.cells = {n0, n0, 0};
  base.box_lo = {0.0, 0.0, 0.0};
  base.box_hi = {1.0, 1.0, 0.0};
  build_structured(base);
  apply_dirichlet(base, dirichlet);
  h.levels.push_back(std::move(base));
  for (int l = 1; l < n_levels; ++l) {
    MeshLevel fine = refine(h.levels.back());
    apply_dirichlet(fine, dirichlet);
    h.levels.push_back(std::move(fine));
  }
  return h;
}

MeshHierarchy build_box_hierarchy(const Point& extent, const std::array<int, 3>& n0, int n_levels,
                                  const DirichletFn& dirichlet) {
  for (int a = 0; a < 3; ++a)
    if (n0[static_cast<std::size_t>(a)] < 1) throw std::invalid_argument("build_box_hierarchy: need at least one cell per axis");
  if (n_levels < 1) throw std::invalid_argument("build_box_hierarchy: need at least one level");
  MeshHierarchy h;
  MeshLevel base;
  base.dim = 3;
  base.dofs_per_node = 3;
  base.cells = n0;
  base.box_lo = {0.0, 0.0, 0.0};
  base.box_hi = extent;
  build_structured(base);
  apply_dirichlet(base, dirichlet);
  h.levels.push_back(std::move(base));
  for (int l = 1; l < n_levels; ++l) {
    MeshLevel fine = refine(h.levels.back());
    apply_dirichlet(fine, dirichlet);
    h.levels.push_back(std::move(fine));
  }
  return h;
}

double element_measure(const MeshLevel& m, std::size_t e) {
  const int* en = m.element(e);
  if (m.dim == 2) {
    const Point& a = m.node_coords[static_cast<std::size_t>(en[0])];
    const Point& b = m.node_coords[static_cast<std::size_t>(en[1])];
    const Point& c = m.node_coords[static_cast<std::size_t>(en[2])];
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
  }
  // Axis-aligned hexahedron: volume from opposite corners.
  const Point& a = m.node_coords[static_cast<std::size_t>(en[0])];
  const Point& g = m.node_coords[static_cast<std::size_t>(en[6])];
  return (g[0] - a[0]) * (g[1] - a[1]) * (g[2] - a[2]);
}

}  // namespace jfmg
