#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace jfmg {

/// Per-level gradient evaluation counter. Every gradient() call increments the
/// tally of its level exactly once, no matter who triggered it (Newton
/// residuals, finite-difference Jacobian applications, smoother sweeps,
/// eigenvalue estimation, coarse solves).
class GradientTally {
 public:
  explicit GradientTally(int n_levels)
      : n_levels_(n_levels), counts_(new std::atomic<long long>[static_cast<std::size_t>(n_levels)]) {
    if (n_levels <= 0) throw std::invalid_argument("GradientTally: need at least one level");
    for (int i = 0; i < n_levels; ++i) counts_[i].store(0, std::memory_order_relaxed);
  }

  void record(int level) {
    if (level < 0 || level >= n_levels_) throw std::out_of_range("GradientTally: level out of range");
    counts_[level].fetch_add(1, std::memory_order_relaxed);
  }

  long long at(int level) const {
    if (level < 0 || level >= n_levels_) throw std::out_of_range("GradientTally: level out of range");
    return counts_[level].load(std::memory_order_relaxed);
  }

  int n_levels() const { return n_levels_; }

  std::vector<long long> snapshot() const {
    std::vector<long long> out(static_cast<std::size_t>(n_levels_));
    for (int i = 0; i < n_levels_; ++i) out[static_cast<std::size_t>(i)] = counts_[i].load(std::memory_order_relaxed);
    return out;
  }

  void reset() {
    for (int i = 0; i < n_levels_; ++i) counts_[i].store(0, std::memory_order_relaxed);
  }

 private:
  int n_levels_;
  std::unique_ptr<std::atomic<long long>[]> counts_;
};

/// One spectral-shift event during a coarse solve.
struct ShiftEvent {
  int newton_iteration = 0;   ///< outer Newton step the V-cycle belonged to
  int cycle = 0;              ///< V-cycle count within that Newton step
  int round = 0;              ///< shift round within the coarse solve (1-based)
  double lambda_c = 0.0;      ///< curvature estimate that triggered the shift
  double lambda_shift = 0.0;  ///< accumulated shift after amplification
};

/// Shared instrumentation for one nonlinear solve.
struct RunInstruments {
  GradientTally tally;
  std::vector<ShiftEvent> shift_events;
  std::vector<std::pair<int, int>> power_log;  ///< (level, iterations) per estimate
  long long v_cycles = 0;

  explicit RunInstruments(int n_levels) : tally(n_levels) {}
};

}  // namespace jfmg
