#include "jfmg/problems.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace jfmg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Tri {
  double area;
  double g[3][2];  ///< P1 shape function gradients
};

/// Geometry of one triangle; gradients follow from the edge normals.
Tri tri_geometry(const MeshLevel& m, const int* en) {
  const Point& a = m.node_coords[static_cast<std::size_t>(en[0])];
  const Point& b = m.node_coords[static_cast<std::size_t>(en[1])];
  const Point& c = m.node_coords[static_cast<std::size_t>(en[2])];
  Tri t;
  const double det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
  t.area = 0.5 * det;
  const double inv = 1.0 / det;
  t.g[0][0] = (b[1] - c[1]) * inv;
  t.g[0][1] = (c[0] - b[0]) * inv;
  t.g[1][0] = (c[1] - a[1]) * inv;
  t.g[1][1] = (a[0] - c[0]) * inv;
  t.g[2][0] = (a[1] - b[1]) * inv;
  t.g[2][1] = (b[0] - a[0]) * inv;
  return t;
}

/// Trilinear shape data at the 8 Gauss points of the 2x2x2 rule, reference
/// cell [-1,1]^3. dphi[q][a][k] is d phi_a / d xi_k at point q, weight 1 each.
struct HexTable {
  double dphi[8][8][3];
};

const HexTable& hex_table() {
  static const HexTable table = [] {
    HexTable t{};
    const double s[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                            {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};
    const double gp = 1.0 / std::sqrt(3.0);
    for (int q = 0; q < 8; ++q) {
      const double xi[3] = {s[q][0] * gp, s[q][1] * gp, s[q][2] * gp};
      for (int a = 0; a < 8; ++a) {
        const double f0 = 1.0 + xi[0] * s[a][0];
        const double f1 = 1.0 + xi[1] * s[a][1];
        const double f2 = 1.0 + xi[2] * s[a][2];
        t.dphi[q][a][0] = 0.125 * s[a][0] * f1 * f2;
        t.dphi[q][a][1] = 0.125 * f0 * s[a][1] * f2;
        t.dphi[q][a][2] = 0.125 * f0 * f1 * s[a][2];
      }
    }
    return t;
  }();
  return table;
}

double det3(const double F[3][3]) {
  return F[0][0] * (F[1][1] * F[2][2] - F[1][2] * F[2][1]) -
         F[0][1] * (F[1][0] * F[2][2] - F[1][2] * F[2][0]) +
         F[0][2] * (F[1][0] * F[2][1] - F[1][1] * F[2][0]);
}

/// out = inv(F)^T, given det(F): out[i][j] is the (i,j) cofactor over det.
void inv_transpose3(const double F[3][3], double detF, double out[3][3]) {
  const double inv = 1.0 / detF;
  out[0][0] = (F[1][1] * F[2][2] - F[1][2] * F[2][1]) * inv;
  out[0][1] = -(F[1][0] * F[2][2] - F[1][2] * F[2][0]) * inv;
  out[0][2] = (F[1][0] * F[2][1] - F[1][1] * F[2][0]) * inv;
  out[1][0] = -(F[0][1] * F[2][2] - F[0][2] * F[2][1]) * inv;
  out[1][1] = (F[0][0] * F[2][2] - F[0][2] * F[2][0]) * inv;
  out[1][2] = -(F[0][0] * F[2][1] - F[0][1] * F[2][0]) * inv;
  out[2][0] = (F[0][1] * F[1][2] - F[0][2] * F[1][1]) * inv;
  out[2][1] = -(F[0][0] * F[1][2] - F[0][2] * F[1][0]) * inv;
  out[2][2] = (F[0][0] * F[1][1] - F[0][1] * F[1][0]) * inv;
}

}  // namespace

std::string to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::Bratu: return "bratu";
    case ProblemKind::MinimalSurface: return "minsurf";
    case ProblemKind::NeoHookean: return "neohookean";
  }
  return "unknown";
}

ProblemDefinition::ProblemDefinition(const MeshLevel& mesh, ProblemKind kind, MaterialParams params,
                                     GradientTally* tally)
    : mesh_(&mesh), kind_(kind), params_(params), tally_(tally) {
  const bool wants_3d = kind == ProblemKind::NeoHookean;
  if (wants_3d != (mesh.dim == 3))
    throw std::invalid_argument("ProblemDefinition: mesh dimension does not match problem kind");
}

double ProblemDefinition::energy(const DofVector& x) const {
  if (x.size() != n_dofs()) throw std::invalid_argument("ProblemDefinition::energy: size mismatch");
  return kind_ == ProblemKind::NeoHookean ? energy_hex(x) : energy_p1(x);
}

bool ProblemDefinition::gradient(const DofVector& x, DofVector& out) const {
  if (x.size() != n_dofs()) throw std::invalid_argument("ProblemDefinition::gradient: size mismatch");
  if (tally_) tally_->record(mesh_->level_index);
  out.level = mesh_->level_index;
  out.values.assign(n_dofs(), 0.0);
  const bool ok = kind_ == ProblemKind::NeoHookean ? gradient_hex(x, out) : gradient_p1(x, out);
  if (!ok) return false;
  mesh_->constraint_set.zero_constrained(out);
  return is_finite(out);
}

double ProblemDefinition::energy_p1(const DofVector& x) const {
  const bool bratu = kind_ == ProblemKind::Bratu;
  const double lam = params_.bratu_lambda;
  double e = 0.0;
  const std::size_t ne = mesh_->n_elems();
  for (std::size_t el = 0; el < ne; ++el) {
    const int* en = mesh_->element(el);
    const Tri t = tri_geometry(*mesh_, en);
    const double u0 = x[static_cast<std::size_t>(en[0])], u1 = x[static_cast<std::size_t>(en[1])],
                 u2 = x[static_cast<std::size_t>(en[2])];
    const double gx = u0 * t.g[0][0] + u1 * t.g[1][0] + u2 * t.g[2][0];
    const double gy = u0 * t.g[0][1] + u1 * t.g[1][1] + u2 * t.g[2][1];
    const double q2 = gx * gx + gy * gy;
    if (bratu) {
      e += t.area * (0.5 * q2 - lam * std::exp((u0 + u1 + u2) / 3.0));
    } else {
      e += t.area * std::sqrt(1.0 + q2);
    }
  }
  return e;
}

bool ProblemDefinition::gradient_p1(const DofVector& x, DofVector& out) const {
  const bool bratu = kind_ == ProblemKind::Bratu;
  const double lam = params_.bratu_lambda;
  const std::size_t ne = mesh_->n_elems();
  for (std::size_t el = 0; el < ne; ++el) {
    const int* en = mesh_->element(el);
    const Tri t = tri_geometry(*mesh_, en);
    const double u0 = x[static_cast<std::size_t>(en[0])], u1 = x[static_cast<std::size_t>(en[1])],
                 u2 = x[static_cast<std::size_t>(en[2])];
    const double gx = u0 * t.g[0][0] + u1 * t.g[1][0] + u2 * t.g[2][0];
    const double gy = u0 * t.g[0][1] + u1 * t.g[1][1] + u2 * t.g[2][1];
    if (bratu) {
      const double ex = lam * std::exp((u0 + u1 + u2) / 3.0) / 3.0;
      for (int v = 0; v < 3; ++v)
        out[static_cast<std::size_t>(en[v])] += t.area * (gx * t.g[v][0] + gy * t.g[v][1] - ex);
    } else {
      const double w = 1.0 / std::sqrt(1.0 + gx * gx + gy * gy);
      for (int v = 0; v < 3; ++v)
        out[static_cast<std::size_t>(en[v])] += t.area * w * (gx * t.g[v][0] + gy * t.g[v][1]);
    }
  }
  return true;
}

double ProblemDefinition::energy_hex(const DofVector& x) const {
  const HexTable& tab = hex_table();
  const double mu = params_.shear_modulus(), lam = params_.lame_lambda();
  double e = 0.0;
  const std::size_t ne = mesh_->n_elems();
  for (std::size_t el = 0; el < ne; ++el) {
    const int* en = mesh_->element(el);
    const Point& p0 = mesh_->node_coords[static_cast<std::size_t>(en[0])];
    const Point& p6 = mesh_->node_coords[static_cast<std::size_t>(en[6])];
    const double h[3] = {p6[0] - p0[0], p6[1] - p0[1], p6[2] - p0[2]};
    const double wdet = 0.125 * h[0] * h[1] * h[2];
    const double sc[3] = {2.0 / h[0], 2.0 / h[1], 2.0 / h[2]};
    double u[8][3];
    for (int a = 0; a < 8; ++a)
      for (int i = 0; i < 3; ++i) u[a][i] = x[static_cast<std::size_t>(en[a]) * 3 + static_cast<std::size_t>(i)];
    for (int q = 0; q < 8; ++q) {
      double F[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
      for (int a = 0; a < 8; ++a)
        for (int i = 0; i < 3; ++i)
          for (int k = 0; k < 3; ++k) F[i][k] += u[a][i] * tab.dphi[q][a][k] * sc[k];
      const double J = det3(F);
      if (J <= 0.0) return kInf;
      const double lnJ = std::log(J);
      double ic = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) ic += F[i][k] * F[i][k];
      e += wdet * (0.5 * mu * (ic - 3.0) - mu * lnJ + 0.5 * lam * lnJ * lnJ);
    }
  }
  return e;
}

bool ProblemDefinition::gradient_hex(const DofVector& x, DofVector& out) const {
  const HexTable& tab = hex_table();
  const double mu = params_.shear_modulus(), lam = params_.lame_lambda();
  const std::size_t ne = mesh_->n_elems();
  for (std::size_t el = 0; el < ne; ++el) {
    const int* en = mesh_->element(el);
    const Point& p0 = mesh_->node_coords[static_cast<std::size_t>(en[0])];
    const Point& p6 = mesh_->node_coords[static_cast<std::size_t>(en[6])];
    const double h[3] = {p6[0] - p0[0], p6[1] - p0[1], p6[2] - p0[2]};
    const double wdet = 0.125 * h[0] * h[1] * h[2];
    const double sc[3] = {2.0 / h[0], 2.0 / h[1], 2.0 / h[2]};
    double u[8][3];
    for (int a = 0; a < 8; ++a)
      for (int i = 0; i < 3; ++i) u[a][i] = x[static_cast<std::size_t>(en[a]) * 3 + static_cast<std::size_t>(i)];
    for (int q = 0; q < 8; ++q) {
      double G[8][3];
      for (int a = 0; a < 8; ++a)
        for (int k = 0; k < 3; ++k) G[a][k] = tab.dphi[q][a][k] * sc[k];
      double F[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
      for (int a = 0; a < 8; ++a)
        for (int i = 0; i < 3; ++i)
          for (int k = 0; k < 3; ++k) F[i][k] += u[a][i] * G[a][k];
      const double J = det3(F);
      if (J <= 0.0) return false;
      const double lnJ = std::log(J);
      double FinvT[3][3];
      inv_transpose3(F, J, FinvT);
      // First Piola-Kirchhoff stress of the compressible neo-Hookean law.
      double P[3][3];
      const double c = lam * lnJ - mu;
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) P[i][k] = mu * F[i][k] + c * FinvT[i][k];
      for (int a = 0; a < 8; ++a) {
        const std::size_t base = static_cast<std::size_t>(en[a]) * 3;
        for (int i = 0; i < 3; ++i) {
          double s = 0.0;
          for (int k = 0; k < 3; ++k) s += P[i][k] * G[a][k];
          out[base + static_cast<std::size_t>(i)] += wdet * s;
        }
      }
    }
  }
  return true;
}

DofVector ProblemDefinition::initial_guess() const {
  DofVector x(mesh_->level_index, n_dofs());
  mesh_->constraint_set.impose_values(x);
  return x;
}

double ProblemDefinition::min_jacobian_determinant(const DofVector& x) const {
  if (kind_ != ProblemKind::NeoHookean)
    throw std::logic_error("min_jacobian_determinant: hyperelastic problems only");
  const HexTable& tab = hex_table();
  double jmin = kInf;
  const std::size_t ne = mesh_->n_elems();
  for (std::size_t el = 0; el < ne; ++el) {
    const int* en = mesh_->element(el);
    const Point& p0 = mesh_->node_coords[static_cast<std::size_t>(en[0])];
    const Point& p6 = mesh_->node_coords[static_cast<std::size_t>(en[6])];
    const double sc[3] = {2.0 / (p6[0] - p0[0]), 2.0 / (p6[1] - p0[1]), 2.0 / (p6[2] - p0[2])};
    for (int q = 0; q < 8; ++q) {
      double F[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
      for (int a = 0; a < 8; ++a)
        for (int i = 0; i < 3; ++i)
          for (int k = 0; k < 3; ++k)
            F[i][k] += x[static_cast<std::size_t>(en[a]) * 3 + static_cast<std::size_t>(i)] * tab.dphi[q][a][k] * sc[k];
      jmin = std::min(jmin, det3(F));
    }
  }
  return jmin;
}

DirichletFn bratu_boundary() {
  return [](const Point&, double* v) {
    v[0] = 0.0;
    return true;
  };
}

DirichletFn minimal_surface_boundary() {
  // u = x (1 - x) vanishes on the vertical sides, so one expression covers
  // the whole boundary.
  return [](const Point& p, double* v) {
    v[0] = p[0] * (1.0 - p[0]);
    return true;
  };
}

DirichletFn beam_rotation_boundary() {
  const double c = std::cos(M_PI / 6.0), s = std::sin(M_PI / 6.0);
  return [c, s](const Point& p, double* v) {
    const double tol = 1e-9;
    if (std::abs(p[0]) < tol) {
      v[0] = v[1] = v[2] = 0.0;
      return true;
    }
    if (std::abs(p[0] - 10.0) < tol) {
      // Halfway toward a rigid rotation by pi/6 about the beam axis through
      // the cross-section center (0.5, 0.5).
      const double y = p[1] - 0.5, z = p[2] - 0.5;
      v[0] = 0.0;
      v[1] = 0.5 * (0.5 + y * c - z * s - p[1]);
      v[2] = 0.5 * (0.5 + y * s + z * c - p[2]);
      return true;
    }
    return false;
  };
}

ProblemHierarchy build_problem_hierarchy(ProblemKind kind, int n_levels, GradientTally* tally,
                                         MaterialParams params, int n0_override,
                                         std::array<int, 3> beam_n0_override) {
  ProblemHierarchy out;
  if (kind == ProblemKind::NeoHookean) {
    std::array<int, 3> n0 = beam_n0_override[0] > 0 ? beam_n0_override : std::array<int, 3>{10, 1, 1};
    out.mesh = build_box_hierarchy({10.0, 1.0, 1.0}, n0, n_levels, beam_rotation_boundary());
  } else {
    const int n0 = n0_override > 0 ? n0_override : 25;
    const DirichletFn bc = kind == ProblemKind::Bratu ? bratu_boundary() : minimal_surface_boundary();
    out.mesh = build_unit_square_hierarchy(n0, n_levels, bc);
  }
  out.problems.reserve(static_cast<std::size_t>(n_levels));
  for (const MeshLevel& level : out.mesh.levels) out.problems.emplace_back(level, kind, params, tally);
  return out;
}

}  // namespace jfmg
