#include "jfmg/transfer.hpp"

#include <stdexcept>

namespace jfmg {

namespace {

/// Per-axis interpolation factors of one fine grid index: an even index lies
/// on a coarse node, an odd one between two.
struct AxisFactor {
  int n = 1;
  int idx[2];
  double w[2];
};

AxisFactor axis_factor(int fine_index) {
  AxisFactor f;
  if (fine_index % 2 == 0) {
    f.n = 1;
    f.idx[0] = fine_index / 2;
    f.w[0] = 1.0;
  } else {
    f.n = 2;
    f.idx[0] = (fine_index - 1) / 2;
    f.idx[1] = (fine_index + 1) / 2;
    f.w[0] = f.w[1] = 0.5;
  }
  return f;
}

}  // namespace

TransferSet::TransferSet(const MeshHierarchy& hierarchy) : hierarchy_(&hierarchy) {
  const int L = hierarchy.n_levels();
  stencils_.resize(L > 0 ? static_cast<std::size_t>(L - 1) : 0);
  for (int l = 1; l < L; ++l) {
    const MeshLevel& fine = hierarchy.levels[static_cast<std::size_t>(l)];
    const MeshLevel& coarse = hierarchy.levels[static_cast<std::size_t>(l - 1)];
    for (int a = 0; a < fine.dim; ++a)
      if (fine.cells[static_cast<std::size_t>(a)] != 2 * coarse.cells[static_cast<std::size_t>(a)])
        throw std::invalid_argument("TransferSet: levels are not a nested refinement pair");

    LevelStencil& st = stencils_[static_cast<std::size_t>(l - 1)];
    const int nn = static_cast<int>(fine.n_nodes());
    st.offsets.reserve(static_cast<std::size_t>(nn) + 1);
    st.offsets.push_back(0);
    for (int node = 0; node < nn; ++node) {
      const auto g = fine.grid_coords(node);
      const bool odd_x = g[0] % 2 != 0, odd_y = g[1] % 2 != 0;
      if (fine.dim == 2 && odd_x && odd_y) {
        // Diagonal midpoint: the fine node lies on the (low,low)-(high,high)
        // cell diagonal, so only its two endpoints carry it.
        st.coarse_node.push_back(coarse.node_index((g[0] - 1) / 2, (g[1] - 1) / 2, 0));
        st.weight.push_back(0.5);
        st.coarse_node.push_back(coarse.node_index((g[0] + 1) / 2, (g[1] + 1) / 2, 0));
        st.weight.push_back(0.5);
      } else {
        AxisFactor f[3];
        for (int a = 0; a < fine.dim; ++a) f[a] = axis_factor(g[static_cast<std::size_t>(a)]);
        for (int iz = 0; iz < f[2].n; ++iz)
          for (int iy = 0; iy < f[1].n; ++iy)
            for (int ix = 0; ix < f[0].n; ++ix) {
              st.coarse_node.push_back(coarse.node_index(f[0].idx[ix], f[1].idx[iy], f[2].idx[iz]));
              st.weight.push_back(f[0].w[ix] * f[1].w[iy] * (fine.dim == 3 ? f[2].w[iz] : 1.0));
            }
      }
      st.offsets.push_back(static_cast<int>(st.coarse_node.size()));
    }
  }
}

int TransferSet::n_levels() const { return hierarchy_->n_levels(); }

void TransferSet::check_fine_level(int fine_level) const {
  if (fine_level < 1 || fine_level >= hierarchy_->n_levels())
    throw std::out_of_range("TransferSet: fine level out of range");
}

TransferSet::NodeStencil TransferSet::node_stencil(int fine_level, int fine_node) const {
  check_fine_level(fine_level);
  const LevelStencil& st = stencils_[static_cast<std::size_t>(fine_level - 1)];
  if (fine_node < 0 || fine_node + 1 >= static_cast<int>(st.offsets.size()))
    throw std::out_of_range("TransferSet: fine node out of range");
  NodeStencil out;
  for (int e = st.offsets[static_cast<std::size_t>(fine_node)]; e < st.offsets[static_cast<std::size_t>(fine_node) + 1]; ++e) {
    out.coarse_nodes.push_back(st.coarse_node[static_cast<std::size_t>(e)]);
    out.weights.push_back(st.weight[static_cast<std::size_t>(e)]);
  }
  return out;
}

void TransferSet::interpolate(int fine_level, const DofVector& coarse, DofVector& fine) const {
  check_fine_level(fine_level);
  const MeshLevel& fm = hierarchy_->levels[static_cast<std::size_t>(fine_level)];
  const MeshLevel& cm = hierarchy_->levels[static_cast<std::size_t>(fine_level - 1)];
  if (coarse.size() != cm.n_dofs()) throw std::invalid_argument("interpolate: coarse size mismatch");
  const LevelStencil& st = stencils_[static_cast<std::size_t>(fine_level - 1)];
  const int dpn = fm.dofs_per_node;

  fine.level = fine_level;
  fine.values.assign(fm.n_dofs(), 0.0);
  const int nn = static_cast<int>(fm.n_nodes());
  for (int node = 0; node < nn; ++node) {
    for (int e = st.offsets[static_cast<std::size_t>(node)]; e < st.offsets[static_cast<std::size_t>(node) + 1]; ++e) {
      const std::size_t cbase = static_cast<std::size_t>(st.coarse_node[static_cast<std::size_t>(e)]) * dpn;
      const double w = st.weight[static_cast<std::size_t>(e)];
      for (int c = 0; c < dpn; ++c) {
        const std::size_t cdof = cbase + static_cast<std::size_t>(c);
        if (cm.constraint_set.is_constrained(cdof)) continue;
        fine[static_cast<std::size_t>(node) * dpn + static_cast<std::size_t>(c)] += w * coarse[cdof];
      }
    }
  }
  fm.constraint_set.zero_constrained(fine);
}

void TransferSet::restrict_residual(int fine_level, const DofVector& fine, DofVector& coarse) const {
  check_fine_level(fine_level);
  const MeshLevel& fm = hierarchy_->levels[static_cast<std::size_t>(fine_level)];
  const MeshLevel& cm = hierarchy_->levels[static_cast<std::size_t>(fine_level - 1)];
  if (fine.size() != fm.n_dofs()) throw std::invalid_argument("restrict_residual: fine size mismatch");
  const LevelStencil& st = stencils_[static_cast<std::size_t>(fine_level - 1)];
  const int dpn = fm.dofs_per_node;

  coarse.level = fine_level - 1;
  coarse.values.assign(cm.n_dofs(), 0.0);
  const int nn = static_cast<int>(fm.n_nodes());
  for (int node = 0; node < nn; ++node) {
    for (int c = 0; c < dpn; ++c) {
      const std::size_t fdof = static_cast<std::size_t>(node) * dpn + static_cast<std::size_t>(c);
      if (fm.constraint_set.is_constrained(fdof)) continue;
      const double v = fine[fdof];
      if (v == 0.0) continue;
      for (int e = st.offsets[static_cast<std::size_t>(node)]; e < st.offsets[static_cast<std::size_t>(node) + 1]; ++e)
        coarse[static_cast<std::size_t>(st.coarse_node[static_cast<std::size_t>(e)]) * dpn + static_cast<std::size_t>(c)] +=
            st.weight[static_cast<std::size_t>(e)] * v;
    }
  }
  cm.constraint_set.zero_constrained(coarse);
}

void TransferSet::project_iterate(int fine_level, const DofVector& fine, DofVector& coarse) const {
  check_fine_level(fine_level);
  const MeshLevel& fm = hierarchy_->levels[static_cast<std::size_t>(fine_level)];
  const MeshLevel& cm = hierarchy_->levels[static_cast<std::size_t>(fine_level - 1)];
  if (fine.size() != fm.n_dofs()) throw std::invalid_argument("project_iterate: fine size mismatch");
  const LevelStencil& st = stencils_[static_cast<std::size_t>(fine_level - 1)];
  const int dpn = fm.dofs_per_node;
  // Interior coarse basis functions collect interpolation weight 2^dim from
  // the fine nodes they cover, so this scaling makes the projection preserve
  // constants away from the boundary.
  const double scalefac = fm.dim == 2 ? 0.25 : 0.125;

  coarse.level = fine_level - 1;
  coarse.values.assign(cm.n_dofs(), 0.0);
  const int nn = static_cast<int>(fm.n_nodes());
  for (int node = 0; node < nn; ++node) {
    for (int c = 0; c < dpn; ++c) {
      // The full state is restricted, boundary values included: unlike
      // residuals and corrections, the iterate is nonzero on Dirichlet dofs
      // and the nearby coarse nodes need those contributions.
      const std::size_t fdof = static_cast<std::size_t>(node) * dpn + static_cast<std::size_t>(c);
      const double v = fine[fdof];
      if (v == 0.0) continue;
      for (int e = st.offsets[static_cast<std::size_t>(node)]; e < st.offsets[static_cast<std::size_t>(node) + 1]; ++e)
        coarse[static_cast<std::size_t>(st.coarse_node[static_cast<std::size_t>(e)]) * dpn + static_cast<std::size_t>(c)] +=
            st.weight[static_cast<std::size_t>(e)] * v;
    }
  }
  for (double& v : coarse.values) v *= scalefac;
  cm.constraint_set.impose_values(coarse);
}

}  // namespace jfmg
