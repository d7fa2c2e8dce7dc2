#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace jfmg {

/// Nodal coefficient vector bound to one level of a mesh hierarchy.
/// The level tag travels with the data so transfer operators and the
/// V-cycle can assert they were handed the right grid.
struct DofVector {
  int level = 0;
  std::vector<double> values;

  DofVector() = default;
  DofVector(int level_index, std::size_t n) : level(level_index), values(n, 0.0) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  void set_zero() { std::fill(values.begin(), values.end(), 0.0); }
};

inline double dot(const DofVector& a, const DofVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
  return s;
}

inline double norm2(const DofVector& a) { return std::sqrt(dot(a, a)); }

/// y += alpha * x
inline void axpy(double alpha, const DofVector& x, DofVector& y) {
  for (std::size_t i = 0; i < x.values.size(); ++i) y.values[i] += alpha * x.values[i];
}

inline void scale(double alpha, DofVector& x) {
  for (double& v : x.values) v *= alpha;
}

inline bool is_finite(const DofVector& a) {
  for (double v : a.values)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace jfmg
