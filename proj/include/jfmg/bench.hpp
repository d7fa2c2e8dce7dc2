#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "jfmg/newton.hpp"
#include "jfmg/problems.hpp"

namespace jfmg {

/// One benchmark run: problem, refinement level and solver strategy.
/// `level` counts refinements of the coarse benchmark grid, so level k solves
/// on a hierarchy of k + 1 meshes.
struct BenchmarkConfig {
  ProblemKind problem = ProblemKind::Bratu;
  int level = 1;
  SolveStrategy strategy = SolveStrategy::CgMg;
  CoarseVariant coarse = CoarseVariant::ShiftedCgQn;
  std::uint64_t seed = 0;

  int pre_sweeps = 5;
  int post_sweeps = 5;
  double shift_growth = 5.0;
  int lbfgs_pairs = 20;
  double newton_tol = 1e-6;
  double coarse_tol = 1e-12;
  std::optional<double> forcing_override;
  int max_newton = 100;
  long long eval_budget = 200000;
  bool timing = false;  ///< off by default so reports are bit-reproducible

  int n0_override = 0;                          ///< test hook: coarse cells per side
  std::array<int, 3> beam_n0_override{0, 0, 0};  ///< test hook: coarse beam cells

  /// Throws std::invalid_argument on out-of-range settings (level outside
  /// [1,5], hyperelastic level 5, nonpositive sweeps or tolerances).
  void validate() const;
};

struct BenchmarkResult {
  BenchmarkConfig config;
  RunReport report;
  std::size_t n_dofs = 0;
  int n_levels = 0;
  double wall_seconds = 0.0;
};

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg);

/// Published measurements the harness reproduces, keyed like the runs.
/// table1_ge: effective gradient evaluations per (problem, level, strategy).
/// table2: Newton iterations, total outer Krylov iterations and average
///         evaluations per iteration for the multigrid strategy.
/// table3: coarse-variant study on the hyperelastic beam.
namespace reference {

std::optional<double> table1_ge(ProblemKind p, int level, SolveStrategy s);

struct MultigridRow {
  int newton_iterations;
  long long krylov_iterations;
  double age;
};
std::optional<MultigridRow> table2(ProblemKind p, int level);

struct CoarseStudyRow {
  int newton_iterations;
  long long krylov_iterations;
  double ge;
};
std::optional<CoarseStudyRow> table3(int level, CoarseVariant v);

}  // namespace reference

/// Acceptance bands for comparisons against the reference tables.
struct TolerancePolicy {
  int newton_slack = 1;        ///< absolute band for Newton iteration counts
  double krylov_factor = 1.5;  ///< multiplicative band for Krylov counts
  double ge_factor = 2.0;      ///< multiplicative band for GE and AGE
  double warn_factor = 1.5;    ///< widens a band into the WARN zone
};

enum class Verdict { Pass, Warn, Fail, NoReference };

struct MetricVerdict {
  std::string metric;
  double measured = 0.0;
  double expected = 0.0;
  double ratio = 0.0;
  Verdict verdict = Verdict::NoReference;
};

/// Minimal run summary, round-trippable through the JSON report.
struct RunSummary {
  ProblemKind problem;
  int level;
  SolveStrategy strategy;
  CoarseVariant coarse;
  RunStatus status;
  int newton_iterations;
  long long krylov_iterations;
  double ge_effective;
  double age;
};

RunSummary summarize(const BenchmarkResult& r);
std::vector<MetricVerdict> compare_run(const RunSummary& run, const TolerancePolicy& policy = {});
std::string format_verdict(const RunSummary& run, const MetricVerdict& v);

std::string to_json(const BenchmarkResult& r);
RunSummary summary_from_json(const std::string& text);

std::string csv_header();
std::string csv_row(const BenchmarkResult& r);

/// Row set of one published table: 1 compares outer strategies, 2 details the
/// multigrid strategy, 3 compares coarse-level solvers on the beam.
/// `max_level` > 0 caps the refinement level for quick runs.
std::vector<BenchmarkConfig> table_suite(int table, std::uint64_t seed, int max_level = 0);

/// Parsing helpers shared by the command line and the report reader. All
/// throw std::invalid_argument on unknown values.
ProblemKind parse_problem(const std::string& s);
SolveStrategy parse_strategy(const std::string& s);
CoarseVariant parse_coarse(const std::string& s);
int parse_level(const std::string& s);  ///< accepts "3" or "L3"
RunStatus parse_status(const std::string& s);

}  // namespace jfmg
