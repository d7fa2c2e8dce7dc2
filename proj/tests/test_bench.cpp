#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "jfmg/bench.hpp"

using namespace jfmg;

namespace {

/// Hand-built run summary for exercising the comparison bands.
RunSummary make_summary(ProblemKind p, int level, SolveStrategy s, CoarseVariant c) {
  RunSummary r{};
  r.problem = p;
  r.level = level;
  r.strategy = s;
  r.coarse = c;
  r.status = RunStatus::Converged;
  return r;
}

/// Hand-built benchmark result for serialization tests.
BenchmarkResult make_result() {
  BenchmarkResult r;
  r.config.problem = ProblemKind::NeoHookean;
  r.config.level = 2;
  r.config.strategy = SolveStrategy::CgMg;
  r.config.coarse = CoarseVariant::ShiftedCgQn;
  r.config.seed = 7;
  r.n_dofs = 567;
  r.n_levels = 3;
  r.report.status = RunStatus::Converged;
  r.report.message = "ok";
  r.report.newton_iterations = 5;
  r.report.krylov_per_newton = {3, 3, 3, 3, 3};
  r.report.total_krylov_iterations = 15;
  r.report.gradient_evals_per_level = {100, 40, 10};
  r.report.ge_effective = 123.75;
  r.report.age = 8.25;
  r.report.shift_count = 2;
  r.report.shift_events = {{1, 1, 1, -0.25, -1.25}, {2, 1, 2, -0.1, -0.5}};
  r.report.v_cycles = 15;
  r.report.residual_norms = {1.0, 0.5, 1e-7};
  r.report.step_lengths = {1.0, 1.0};
  r.report.final_residual = 1e-7;
  r.wall_seconds = 0.0;
  return r;
}

const MetricVerdict& find_metric(const std::vector<MetricVerdict>& v, const std::string& name) {
  for (const MetricVerdict& m : v)
    if (m.metric == name) return m;
  throw std::runtime_error("metric not found: " + name);
}

}  // namespace

TEST_CASE("config validation rejects out-of-range settings") {
  BenchmarkConfig ok;
  CHECK_NOTHROW(ok.validate());

  auto expect_invalid = [](auto&& mutate) {
    BenchmarkConfig c;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  };
  expect_invalid([](BenchmarkConfig& c) { c.level = 0; });
  expect_invalid([](BenchmarkConfig& c) { c.level = 6; });
  expect_invalid([](BenchmarkConfig& c) {
    c.problem = ProblemKind::NeoHookean;
    c.level = 5;
  });
  expect_invalid([](BenchmarkConfig& c) { c.pre_sweeps = -1; });
  expect_invalid([](BenchmarkConfig& c) { c.post_sweeps = -2; });
  expect_invalid([](BenchmarkConfig& c) { c.shift_growth = 0.5; });
  expect_invalid([](BenchmarkConfig& c) { c.lbfgs_pairs = 0; });
  expect_invalid([](BenchmarkConfig& c) { c.newton_tol = 0.0; });
  expect_invalid([](BenchmarkConfig& c) { c.coarse_tol = -1e-12; });
  expect_invalid([](BenchmarkConfig& c) { c.max_newton = 0; });
  expect_invalid([](BenchmarkConfig& c) { c.eval_budget = -1; });

  // The 2D problems do have a level 5 row.
  BenchmarkConfig l5;
  l5.problem = ProblemKind::MinimalSurface;
  l5.level = 5;
  CHECK_NOTHROW(l5.validate());
}

TEST_CASE("reference tables expose the expected entries") {
  using reference::CoarseStudyRow;
  using reference::MultigridRow;
  using reference::table1_ge;
  using reference::table2;
  using reference::table3;

  SUBCASE("effective gradient evaluations by strategy") {
    CHECK(table1_ge(ProblemKind::Bratu, 1, SolveStrategy::Cg) == 176.0);
    CHECK(table1_ge(ProblemKind::Bratu, 5, SolveStrategy::Cg) == 3377.0);
    CHECK(table1_ge(ProblemKind::Bratu, 5, SolveStrategy::CgQn) == 2345.0);
    CHECK(table1_ge(ProblemKind::Bratu, 5, SolveStrategy::CgMg) == 238.0);
    CHECK(table1_ge(ProblemKind::MinimalSurface, 3, SolveStrategy::CgQn) == 1170.0);
    CHECK(table1_ge(ProblemKind::MinimalSurface, 5, SolveStrategy::CgMg) == 931.0);
    CHECK(table1_ge(ProblemKind::NeoHookean, 4, SolveStrategy::Cg) == 1971.0);
    CHECK(table1_ge(ProblemKind::NeoHookean, 2, SolveStrategy::CgMg) == 372.0);
    // The beam study stops at level 4; out-of-range levels have no entry.
    CHECK_FALSE(table1_ge(ProblemKind::NeoHookean, 5, SolveStrategy::Cg).has_value());
    CHECK_FALSE(table1_ge(ProblemKind::NeoHookean, 5, SolveStrategy::CgMg).has_value());
    CHECK_FALSE(table1_ge(ProblemKind::Bratu, 0, SolveStrategy::Cg).has_value());
    CHECK_FALSE(table1_ge(ProblemKind::Bratu, 6, SolveStrategy::Cg).has_value());
  }

  SUBCASE("multigrid iteration counts and AGE") {
    const MultigridRow b1 = *table2(ProblemKind::Bratu, 1);
    CHECK(b1.newton_iterations == 3);
    CHECK(b1.krylov_iterations == 7);
    CHECK(b1.age == 39.32);
    const MultigridRow m4 = *table2(ProblemKind::MinimalSurface, 4);
    CHECK(m4.newton_iterations == 9);
    CHECK(m4.krylov_iterations == 32);
    CHECK(m4.age == 24.45);
    const MultigridRow n4 = *table2(ProblemKind::NeoHookean, 4);
    CHECK(n4.newton_iterations == 5);
    CHECK(n4.krylov_iterations == 39);
    CHECK(n4.age == 18.76);
    CHECK_FALSE(table2(ProblemKind::NeoHookean, 5).has_value());
    CHECK_FALSE(table2(ProblemKind::Bratu, 0).has_value());
    CHECK_FALSE(table2(ProblemKind::Bratu, 6).has_value());
  }

  SUBCASE("coarse variant study") {
    const CoarseStudyRow cg2 = *table3(2, CoarseVariant::Cg);
    CHECK(cg2.newton_iterations == 5);
    CHECK(cg2.krylov_iterations == 16);
    CHECK(cg2.ge == 44866.0);
    const CoarseStudyRow qn2 = *table3(2, CoarseVariant::CgQn);
    CHECK(qn2.krylov_iterations == 1017);
    CHECK(qn2.ge == 14814.0);
    const CoarseStudyRow sh2 = *table3(2, CoarseVariant::ShiftedCgQn);
    CHECK(sh2.krylov_iterations == 15);
    CHECK(sh2.ge == 372.0);
    // The variants' costs coincide at level 4, where no shift fires.
    for (CoarseVariant v : {CoarseVariant::Cg, CoarseVariant::CgQn, CoarseVariant::ShiftedCgQn}) {
      const CoarseStudyRow r = *table3(4, v);
      CHECK(r.krylov_iterations == 39);
      CHECK(r.ge == 733.0);
    }
    CHECK_FALSE(table3(0, CoarseVariant::Cg).has_value());
    CHECK_FALSE(table3(5, CoarseVariant::Cg).has_value());
  }
}

TEST_CASE("compare_run picks the reference row for the strategy") {
  const TolerancePolicy policy;  // slack 1, krylov x1.5, ge x2.0, warn x1.5

  SUBCASE("single-level strategies compare GE against the strategy table") {
    RunSummary r = make_summary(ProblemKind::Bratu, 2, SolveStrategy::Cg, CoarseVariant::ShiftedCgQn);
    r.ge_effective = 367.0;
    auto v = compare_run(r, policy);
    REQUIRE(v.size() == 1);
    CHECK(v[0].metric == "ge_effective");
    CHECK(v[0].expected == 367.0);
    CHECK(v[0].ratio == 1.0);
    CHECK(v[0].verdict == Verdict::Pass);

    r.ge_effective = 367.0 * 2.0;  // on the PASS boundary
    CHECK(compare_run(r, policy)[0].verdict == Verdict::Pass);
    r.ge_effective = 367.0 * 2.5;  // inside the widened WARN band (up to x3)
    CHECK(compare_run(r, policy)[0].verdict == Verdict::Warn);
    r.ge_effective = 367.0 * 4.0;
    CHECK(compare_run(r, policy)[0].verdict == Verdict::Fail);
    r.ge_effective = 367.0 / 2.5;  // bands are symmetric in ratio
    CHECK(compare_run(r, policy)[0].verdict == Verdict::Warn);
    r.ge_effective = 0.0;  // nonpositive measurements cannot pass
    CHECK(compare_run(r, policy)[0].verdict == Verdict::Fail);
  }

  SUBCASE("default multigrid runs compare against both tables") {
    RunSummary r = make_summary(ProblemKind::Bratu, 1, SolveStrategy::CgMg, CoarseVariant::ShiftedCgQn);
    r.newton_iterations = 3;
    r.krylov_iterations = 7;
    r.ge_effective = 264.0;
    r.age = 39.32;
    auto v = compare_run(r, policy);
    REQUIRE(v.size() == 4);
    for (const MetricVerdict& m : v) CHECK(m.verdict == Verdict::Pass);
    CHECK(find_metric(v, "ge_effective").expected == 264.0);
    CHECK(find_metric(v, "newton_iterations").expected == 3.0);
    CHECK(find_metric(v, "krylov_iterations").expected == 7.0);
    CHECK(find_metric(v, "age").expected == 39.32);

    // Iteration counts use an absolute slack of one, then a doubled WARN band.
    r.newton_iterations = 4;
    CHECK(find_metric(compare_run(r, policy), "newton_iterations").verdict == Verdict::Pass);
    r.newton_iterations = 5;
    CHECK(find_metric(compare_run(r, policy), "newton_iterations").verdict == Verdict::Warn);
    r.newton_iterations = 6;
    CHECK(find_metric(compare_run(r, policy), "newton_iterations").verdict == Verdict::Fail);

    r.newton_iterations = 3;
    r.krylov_iterations = 10;  // 10/7 < 1.5
    CHECK(find_metric(compare_run(r, policy), "krylov_iterations").verdict == Verdict::Pass);
    r.krylov_iterations = 14;  // 2.0 is inside the x2.25 WARN band
    CHECK(find_metric(compare_run(r, policy), "krylov_iterations").verdict == Verdict::Warn);
    r.krylov_iterations = 70;
    CHECK(find_metric(compare_run(r, policy), "krylov_iterations").verdict == Verdict::Fail);
  }

  SUBCASE("non-default coarse variants compare against the variant study") {
    RunSummary r = make_summary(ProblemKind::NeoHookean, 2, SolveStrategy::CgMg, CoarseVariant::Cg);
    r.newton_iterations = 5;
    r.krylov_iterations = 16;
    r.ge_effective = 44866.0;
    auto v = compare_run(r, policy);
    REQUIRE(v.size() == 3);
    CHECK(find_metric(v, "ge_effective").expected == 44866.0);
    CHECK(find_metric(v, "krylov_iterations").expected == 16.0);
    for (const MetricVerdict& m : v) CHECK(m.verdict == Verdict::Pass);
  }

  SUBCASE("runs without a reference entry report NO-REFERENCE") {
    // The variant study only covers the beam problem.
    RunSummary r = make_summary(ProblemKind::Bratu, 1, SolveStrategy::CgMg, CoarseVariant::Cg);
    auto v = compare_run(r, policy);
    REQUIRE(v.size() == 1);
    CHECK(v[0].verdict == Verdict::NoReference);
    CHECK(format_verdict(r, v[0]).find("no reference entry") != std::string::npos);

    RunSummary n5 = make_summary(ProblemKind::NeoHookean, 5, SolveStrategy::Cg, CoarseVariant::ShiftedCgQn);
    auto v5 = compare_run(n5, policy);
    REQUIRE(v5.size() == 1);
    CHECK(v5[0].verdict == Verdict::NoReference);
  }

  SUBCASE("format_verdict renders the measured and expected values") {
    RunSummary r = make_summary(ProblemKind::Bratu, 2, SolveStrategy::Cg, CoarseVariant::ShiftedCgQn);
    r.ge_effective = 367.0;
    const std::string line = format_verdict(r, compare_run(r, policy)[0]);
    CHECK(line.find("bratu L2 cg/") != std::string::npos);
    CHECK(line.find("ge_effective") != std::string::npos);
    CHECK(line.find("PASS") != std::string::npos);
  }
}

TEST_CASE("summarize copies the run identity and headline counters") {
  const BenchmarkResult r = make_result();
  const RunSummary s = summarize(r);
  CHECK(s.problem == ProblemKind::NeoHookean);
  CHECK(s.level == 2);
  CHECK(s.strategy == SolveStrategy::CgMg);
  CHECK(s.coarse == CoarseVariant::ShiftedCgQn);
  CHECK(s.status == RunStatus::Converged);
  CHECK(s.newton_iterations == 5);
  CHECK(s.krylov_iterations == 15);
  CHECK(s.ge_effective == 123.75);
  CHECK(s.age == 8.25);
}

TEST_CASE("json reports round-trip through summary_from_json") {
  const BenchmarkResult r = make_result();
  const std::string text = to_json(r);

  const nlohmann::json j = nlohmann::json::parse(text);
  CHECK(j.at("problem") == "neohookean");
  CHECK(j.at("strategy") == "cg-mg");
  CHECK(j.at("coarse_variant") == "shifted");
  CHECK(j.at("status") == "converged");
  CHECK(j.at("seed") == 7);
  CHECK(j.at("n_dofs") == 567);
  CHECK(j.at("n_levels") == 3);
  CHECK(j.at("gradient_evals_per_level") == nlohmann::json({100, 40, 10}));
  CHECK(j.at("shift_count") == 2);
  REQUIRE(j.at("shift_events").size() == 2);
  CHECK(j.at("shift_events")[0].at("newton_iteration") == 1);
  CHECK(j.at("shift_events")[0].at("lambda_c") == -0.25);
  CHECK(j.at("shift_events")[1].at("lambda_shift") == -0.5);
  CHECK(j.at("v_cycles") == 15);
  CHECK(j.at("final_residual") == 1e-7);

  const RunSummary s = summary_from_json(text);
  CHECK(s.problem == r.config.problem);
  CHECK(s.level == r.config.level);
  CHECK(s.strategy == r.config.strategy);
  CHECK(s.coarse == r.config.coarse);
  CHECK(s.status == r.report.status);
  CHECK(s.newton_iterations == r.report.newton_iterations);
  CHECK(s.krylov_iterations == r.report.total_krylov_iterations);
  CHECK(s.ge_effective == r.report.ge_effective);
  CHECK(s.age == r.report.age);

  CHECK_THROWS(summary_from_json("not json"));
}

TEST_CASE("csv output is stable") {
  CHECK(csv_header() ==
        "problem,level,strategy,coarse_variant,n_dofs,newton_iters,krylov_iters,ge_effective,age,"
        "shifts,wall_seconds,status");

  BenchmarkResult r = make_result();
  CHECK(csv_row(r) == "neohookean,L2,cg-mg,shifted,567,5,15,123.750000,8.250000,2,0.000000,converged");

  // Single-level strategies have no coarse variant column value.
  r.config.strategy = SolveStrategy::Cg;
  r.report.shift_count = 0;
  CHECK(csv_row(r) == "neohookean,L2,cg,-,567,5,15,123.750000,8.250000,0,0.000000,converged");
}

TEST_CASE("table_suite enumerates the benchmark grids") {
  const auto t1 = table_suite(1, 7);
  CHECK(t1.size() == 42);  // 3 strategies x (5 + 5 + 4) levels
  const auto t2 = table_suite(2, 7);
  CHECK(t2.size() == 14);
  const auto t3 = table_suite(3, 7);
  CHECK(t3.size() == 12);

  for (const BenchmarkConfig& c : t1) {
    CHECK_NOTHROW(c.validate());
    CHECK(c.seed == 7);
  }
  for (const BenchmarkConfig& c : t2) {
    CHECK(c.strategy == SolveStrategy::CgMg);
    CHECK(c.coarse == CoarseVariant::ShiftedCgQn);
  }
  std::set<CoarseVariant> variants;
  for (const BenchmarkConfig& c : t3) {
    CHECK(c.problem == ProblemKind::NeoHookean);
    CHECK(c.strategy == SolveStrategy::CgMg);
    CHECK(c.level <= 4);
    variants.insert(c.coarse);
  }
  CHECK(variants.size() == 3);

  SUBCASE("level caps") {
    const auto capped = table_suite(1, 0, 2);
    CHECK(capped.size() == 18);
    for (const BenchmarkConfig& c : capped) CHECK(c.level <= 2);
    // The beam cap stays at 4 even when the requested cap is higher.
    for (const BenchmarkConfig& c : table_suite(2, 0, 5))
      if (c.problem == ProblemKind::NeoHookean) CHECK(c.level <= 4);
  }

  CHECK_THROWS_AS(table_suite(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(table_suite(4, 0), std::invalid_argument);
}

TEST_CASE("parse helpers invert to_string") {
  CHECK(parse_problem("bratu") == ProblemKind::Bratu);
  CHECK(parse_problem("minsurf") == ProblemKind::MinimalSurface);
  CHECK(parse_problem("neohookean") == ProblemKind::NeoHookean);
  CHECK_THROWS_AS(parse_problem("poisson"), std::invalid_argument);

  CHECK(parse_strategy("cg") == SolveStrategy::Cg);
  CHECK(parse_strategy("cg-qn") == SolveStrategy::CgQn);
  CHECK(parse_strategy("cg-mg") == SolveStrategy::CgMg);
  CHECK_THROWS_AS(parse_strategy("gmres"), std::invalid_argument);

  CHECK(parse_coarse("cg") == CoarseVariant::Cg);
  CHECK(parse_coarse("cg-qn") == CoarseVariant::CgQn);
  CHECK(parse_coarse("shifted") == CoarseVariant::ShiftedCgQn);
  CHECK_THROWS_AS(parse_coarse("lu"), std::invalid_argument);

  CHECK(parse_level("L3") == 3);
  CHECK(parse_level("l3") == 3);
  CHECK(parse_level("3") == 3);
  CHECK_THROWS_AS(parse_level("L3x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_level(""), std::invalid_argument);

  for (RunStatus st : {RunStatus::Converged, RunStatus::MaxNewtonIterations, RunStatus::LineSearchFailure,
                       RunStatus::BudgetExceeded, RunStatus::SolverError})
    CHECK(parse_status(to_string(st)) == st);
  CHECK_THROWS_AS(parse_status("diverged"), std::invalid_argument);
}

TEST_CASE("run_benchmark solves a small instance end to end") {
  BenchmarkConfig cfg;
  cfg.problem = ProblemKind::Bratu;
  cfg.level = 1;
  cfg.n0_override = 4;
  const BenchmarkResult r = run_benchmark(cfg);

  CHECK(r.n_levels == 2);
  CHECK(r.n_dofs == 81);  // 9x9 nodes after one refinement of the 4x4 grid
  CHECK(r.report.status == RunStatus::Converged);
  CHECK(r.report.newton_iterations >= 1);
  CHECK(r.report.ge_effective > 0.0);
  CHECK(r.wall_seconds == 0.0);  // timing is off by default for reproducible reports

  const std::string row = csv_row(r);
  CHECK(row.rfind("bratu,L1,cg-mg,shifted,81,", 0) == 0);
  CHECK(row.find(",converged") != std::string::npos);

  BenchmarkConfig timed = cfg;
  timed.timing = true;
  CHECK(run_benchmark(timed).wall_seconds > 0.0);

  BenchmarkConfig bad = cfg;
  bad.level = 0;
  CHECK_THROWS_AS(run_benchmark(bad), std::invalid_argument);
}
