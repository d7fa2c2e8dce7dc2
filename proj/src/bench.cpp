#include "jfmg/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace jfmg {

void BenchmarkConfig::validate() const {
  if (level < 1 || level > 5) throw std::invalid_argument("level must be in [1, 5]");
  if (problem == ProblemKind::NeoHookean && level > 4)
    throw std::invalid_argument("the hyperelastic benchmark is defined up to level 4");
  if (pre_sweeps < 0 || post_sweeps < 0) throw std::invalid_argument("sweep counts must be nonnegative");
  if (shift_growth < 1.0) throw std::invalid_argument("shift growth factor must be at least 1");
  if (lbfgs_pairs < 1) throw std::invalid_argument("lbfgs pair count must be positive");
  if (newton_tol <= 0.0 || coarse_tol <= 0.0) throw std::invalid_argument("tolerances must be positive");
  if (max_newton < 1) throw std::invalid_argument("max newton iterations must be positive");
  if (eval_budget < 0) throw std::invalid_argument("evaluation budget must be nonnegative");
}

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg) {
  cfg.validate();
  const int n_levels = cfg.level + 1;
  RunInstruments instruments(n_levels);
  ProblemHierarchy ph = build_problem_hierarchy(cfg.problem, n_levels, &instruments.tally, {},
                                                cfg.n0_override, cfg.beam_n0_override);
  TransferSet transfers(ph.mesh);

  NewtonConfig ncfg;
  ncfg.dim = cfg.problem == ProblemKind::NeoHookean ? 3 : 2;
  ncfg.tol_abs = cfg.newton_tol;
  ncfg.forcing_override = cfg.forcing_override;
  ncfg.max_iterations = cfg.max_newton;
  ncfg.strategy = cfg.strategy;
  ncfg.lbfgs_pairs = cfg.lbfgs_pairs;
  ncfg.eval_budget = cfg.eval_budget;
  ncfg.mg.pre_sweeps = cfg.pre_sweeps;
  ncfg.mg.post_sweeps = cfg.post_sweeps;
  ncfg.mg.coarse_variant = cfg.coarse;
  ncfg.mg.coarse_tol_abs = cfg.coarse_tol;
  ncfg.mg.shift_growth = cfg.shift_growth;
  ncfg.mg.lbfgs_pairs = cfg.lbfgs_pairs;
  ncfg.mg.seed = cfg.seed;

  BenchmarkResult out;
  out.config = cfg;
  out.n_levels = n_levels;
  out.n_dofs = ph.mesh.finest().n_dofs();

  const auto t0 = std::chrono::steady_clock::now();
  out.report = newton_solve(transfers, ph.functionals(), ph.finest().initial_guess(), ncfg, instruments);
  const auto t1 = std::chrono::steady_clock::now();
  out.wall_seconds = cfg.timing ? std::chrono::duration<double>(t1 - t0).count() : 0.0;
  return out;
}

namespace reference {

namespace {
// Effective gradient evaluations by outer strategy, levels 1..5 (the beam has
// no level 5 entry).
constexpr double kT1Bratu[3][5] = {{176, 367, 767, 1582, 3377},
                                   {107, 233, 476, 1097, 2345},
                                   {264, 253, 244, 239, 238}};
constexpr double kT1MinSurf[3][5] = {{360, 835, 2009, 3544, 6154},
                                     {229, 501, 1170, 2201, 4316},
                                     {596, 567, 662, 782, 931}};
constexpr double kT1Neo[3][5] = {{467, 626, 1349, 1971, -1},
                                 {546, 655, 1464, 1954, -1},
                                 {868, 372, 426, 733, -1}};

constexpr MultigridRow kT2Bratu[5] = {{3, 7, 39.32}, {3, 9, 28.25}, {3, 9, 27.10}, {3, 9, 26.61}, {3, 9, 26.53}};
constexpr MultigridRow kT2MinSurf[5] = {{6, 13, 45.85}, {7, 18, 31.51}, {8, 25, 26.50}, {9, 32, 24.45}, {9, 41, 22.79}};
constexpr MultigridRow kT2Neo[4] = {{9, 28, 34.66}, {5, 15, 25.12}, {5, 20, 20.95}, {5, 39, 18.76}};

constexpr CoarseStudyRow kT3Cg[4] = {{9, 3010, 51094}, {5, 16, 44866}, {5, 21, 1265}, {6, 39, 733}};
constexpr CoarseStudyRow kT3CgQn[4] = {{9, 130, 2057}, {5, 1017, 14814}, {5, 26, 512}, {6, 39, 733}};
constexpr CoarseStudyRow kT3Shifted[4] = {{9, 28, 868}, {5, 15, 372}, {5, 20, 426}, {5, 39, 733}};
}  // namespace

std::optional<double> table1_ge(ProblemKind p, int level, SolveStrategy s) {
  if (level < 1 || level > 5) return std::nullopt;
  const int si = static_cast<int>(s);
  const auto& row = p == ProblemKind::Bratu ? kT1Bratu : p == ProblemKind::MinimalSurface ? kT1MinSurf : kT1Neo;
  const double v = row[si][level - 1];
  if (v < 0) return std::nullopt;
  return v;
}

std::optional<MultigridRow> table2(ProblemKind p, int level) {
  if (level < 1) return std::nullopt;
  switch (p) {
    case ProblemKind::Bratu:
      return level <= 5 ? std::optional<MultigridRow>(kT2Bratu[level - 1]) : std::nullopt;
    case ProblemKind::MinimalSurface:
      return level <= 5 ? std::optional<MultigridRow>(kT2MinSurf[level - 1]) : std::nullopt;
    case ProblemKind::NeoHookean:
      return level <= 4 ? std::optional<MultigridRow>(kT2Neo[level - 1]) : std::nullopt;
  }
  return std::nullopt;
}

std::optional<CoarseStudyRow> table3(int level, CoarseVariant v) {
  if (level < 1 || level > 4) return std::nullopt;
  switch (v) {
    case CoarseVariant::Cg: return kT3Cg[level - 1];
    case CoarseVariant::CgQn: return kT3CgQn[level - 1];
    case CoarseVariant::ShiftedCgQn: return kT3Shifted[level - 1];
  }
  return std::nullopt;
}

}  // namespace reference

RunSummary summarize(const BenchmarkResult& r) {
  return {r.config.problem,          r.config.level,
          r.config.strategy,         r.config.coarse,
          r.report.status,           r.report.newton_iterations,
          r.report.total_krylov_iterations, r.report.ge_effective,
          r.report.age};
}

namespace {

Verdict band_verdict(double ratio, double factor, double warn_factor) {
  if (ratio >= 1.0 / factor && ratio <= factor) return Verdict::Pass;
  const double wf = factor * warn_factor;
  if (ratio >= 1.0 / wf && ratio <= wf) return Verdict::Warn;
  return Verdict::Fail;
}

MetricVerdict count_metric(const std::string& name, double measured, double expected, int slack) {
  MetricVerdict v{name, measured, expected, expected != 0.0 ? measured / expected : 0.0, Verdict::Fail};
  const double diff = std::abs(measured - expected);
  if (diff <= slack)
    v.verdict = Verdict::Pass;
  else if (diff <= 2 * slack)
    v.verdict = Verdict::Warn;
  return v;
}

MetricVerdict ratio_metric(const std::string& name, double measured, double expected, double factor,
                           double warn_factor) {
  MetricVerdict v{name, measured, expected, 0.0, Verdict::Fail};
  if (expected > 0.0 && measured > 0.0) {
    v.ratio = measured / expected;
    v.verdict = band_verdict(v.ratio, factor, warn_factor);
  }
  return v;
}

}  // namespace

std::vector<MetricVerdict> compare_run(const RunSummary& run, const TolerancePolicy& policy) {
  std::vector<MetricVerdict> out;
  const bool shifted_mg = run.strategy == SolveStrategy::CgMg && run.coarse == CoarseVariant::ShiftedCgQn;

  if (run.strategy != SolveStrategy::CgMg || shifted_mg) {
    if (auto ge = reference::table1_ge(run.problem, run.level, run.strategy))
      out.push_back(ratio_metric("ge_effective", run.ge_effective, *ge, policy.ge_factor, policy.warn_factor));
  }
  if (shifted_mg) {
    if (auto row = reference::table2(run.problem, run.level)) {
      out.push_back(count_metric("newton_iterations", run.newton_iterations, row->newton_iterations,
                                 policy.newton_slack));
      out.push_back(ratio_metric("krylov_iterations", static_cast<double>(run.krylov_iterations),
                                 static_cast<double>(row->krylov_iterations), policy.krylov_factor,
                                 policy.warn_factor));
      out.push_back(ratio_metric("age", run.age, row->age, policy.ge_factor, policy.warn_factor));
    }
  } else if (run.strategy == SolveStrategy::CgMg && run.problem == ProblemKind::NeoHookean) {
    if (auto row = reference::table3(run.level, run.coarse)) {
      out.push_back(count_metric("newton_iterations", run.newton_iterations, row->newton_iterations,
                                 policy.newton_slack));
      out.push_back(ratio_metric("krylov_iterations", static_cast<double>(run.krylov_iterations),
                                 static_cast<double>(row->krylov_iterations), policy.krylov_factor,
                                 policy.warn_factor));
      out.push_back(ratio_metric("ge_effective", run.ge_effective, row->ge, policy.ge_factor, policy.warn_factor));
    }
  }
  if (out.empty()) out.push_back({"(any)", 0.0, 0.0, 0.0, Verdict::NoReference});
  return out;
}

std::string format_verdict(const RunSummary& run, const MetricVerdict& v) {
  char buf[256];
  const char* verdict = v.verdict == Verdict::Pass   ? "PASS"
                        : v.verdict == Verdict::Warn ? "WARN"
                        : v.verdict == Verdict::Fail ? "FAIL"
                                                     : "NO-REFERENCE";
  if (v.verdict == Verdict::NoReference) {
    std::snprintf(buf, sizeof buf, "%s L%d %s/%s: no reference entry", to_string(run.problem).c_str(),
                  run.level, to_string(run.strategy).c_str(), to_string(run.coarse).c_str());
  } else {
    std::snprintf(buf, sizeof buf, "%s L%d %s/%s %s: measured=%.4g expected=%.4g ratio=%.3f %s",
                  to_string(run.problem).c_str(), run.level, to_string(run.strategy).c_str(),
                  to_string(run.coarse).c_str(), v.metric.c_str(), v.measured, v.expected, v.ratio, verdict);
  }
  return buf;
}

std::string to_json(const BenchmarkResult& r) {
  nlohmann::ordered_json j;
  j["problem"] = to_string(r.config.problem);
  j["level"] = r.config.level;
  j["strategy"] = to_string(r.config.strategy);
  j["coarse_variant"] = to_string(r.config.coarse);
  j["seed"] = r.config.seed;
  j["n_dofs"] = r.n_dofs;
  j["n_levels"] = r.n_levels;
  j["status"] = to_string(r.report.status);
  j["message"] = r.report.message;
  j["newton_iterations"] = r.report.newton_iterations;
  j["krylov_per_newton"] = r.report.krylov_per_newton;
  j["total_krylov_iterations"] = r.report.total_krylov_iterations;
  j["gradient_evals_per_level"] = r.report.gradient_evals_per_level;
  j["ge_effective"] = r.report.ge_effective;
  j["age"] = r.report.age;
  j["shift_count"] = r.report.shift_count;
  nlohmann::ordered_json events = nlohmann::ordered_json::array();
  for (const ShiftEvent& e : r.report.shift_events) {
    nlohmann::ordered_json je;
    je["newton_iteration"] = e.newton_iteration;
    je["cycle"] = e.cycle;
    je["round"] = e.round;
    je["lambda_c"] = e.lambda_c;
    je["lambda_shift"] = e.lambda_shift;
    events.push_back(std::move(je));
  }
  j["shift_events"] = std::move(events);
  j["v_cycles"] = r.report.v_cycles;
  j["residual_norms"] = r.report.residual_norms;
  j["step_lengths"] = r.report.step_lengths;
  j["final_residual"] = r.report.final_residual;
  j["wall_seconds"] = r.wall_seconds;
  return j.dump(2);
}

RunSummary summary_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  RunSummary s{};
  s.problem = parse_problem(j.at("problem").get<std::string>());
  s.level = j.at("level").get<int>();
  s.strategy = parse_strategy(j.at("strategy").get<std::string>());
  s.coarse = parse_coarse(j.at("coarse_variant").get<std::string>());
  s.status = parse_status(j.at("status").get<std::string>());
  s.newton_iterations = j.at("newton_iterations").get<int>();
  s.krylov_iterations = j.at("total_krylov_iterations").get<long long>();
  s.ge_effective = j.at("ge_effective").get<double>();
  s.age = j.at("age").get<double>();
  return s;
}

std::string csv_header() {
  return "problem,level,strategy,coarse_variant,n_dofs,newton_iters,krylov_iters,ge_effective,age,"
         "shifts,wall_seconds,status";
}

std::string csv_row(const BenchmarkResult& r) {
  char buf[512];
  const std::string coarse =
      r.config.strategy == SolveStrategy::CgMg ? to_string(r.config.coarse) : "-";
  std::snprintf(buf, sizeof buf, "%s,L%d,%s,%s,%zu,%d,%lld,%.6f,%.6f,%lld,%.6f,%s",
                to_string(r.config.problem).c_str(), r.config.level,
                to_string(r.config.strategy).c_str(), coarse.c_str(), r.n_dofs,
                r.report.newton_iterations, r.report.total_krylov_iterations, r.report.ge_effective,
                r.report.age, r.report.shift_count, r.wall_seconds, to_string(r.report.status).c_str());
  return buf;
}

std::vector<BenchmarkConfig> table_suite(int table, std::uint64_t seed, int max_level) {
  std::vector<BenchmarkConfig> out;
  const auto max_for = [max_level](ProblemKind p) {
    int cap = p == ProblemKind::NeoHookean ? 4 : 5;
    if (max_level > 0) cap = std::min(cap, max_level);
    return cap;
  };
  const ProblemKind problems[] = {ProblemKind::Bratu, ProblemKind::MinimalSurface, ProblemKind::NeoHookean};

  BenchmarkConfig base;
  base.seed = seed;
  switch (table) {
    case 1:
      for (ProblemKind p : problems)
        for (SolveStrategy s : {SolveStrategy::Cg, SolveStrategy::CgQn, SolveStrategy::CgMg})
          for (int l = 1; l <= max_for(p); ++l) {
            BenchmarkConfig c = base;
            c.problem = p;
            c.strategy = s;
            c.level = l;
            out.push_back(c);
          }
      break;
    case 2:
      for (ProblemKind p : problems)
        for (int l = 1; l <= max_for(p); ++l) {
          BenchmarkConfig c = base;
          c.problem = p;
          c.strategy = SolveStrategy::CgMg;
          c.level = l;
          out.push_back(c);
        }
      break;
    case 3:
      for (CoarseVariant v : {CoarseVariant::Cg, CoarseVariant::CgQn, CoarseVariant::ShiftedCgQn})
        for (int l = 1; l <= max_for(ProblemKind::NeoHookean); ++l) {
          BenchmarkConfig c = base;
          c.problem = ProblemKind::NeoHookean;
          c.strategy = SolveStrategy::CgMg;
          c.coarse = v;
          c.level = l;
          out.push_back(c);
        }
      break;
    default:
      throw std::invalid_argument("table must be 1, 2 or 3");
  }
  return out;
}

ProblemKind parse_problem(const std::string& s) {
  if (s == "bratu") return ProblemKind::Bratu;
  if (s == "minsurf") return ProblemKind::MinimalSurface;
  if (s == "neohookean") return ProblemKind::NeoHookean;
  throw std::invalid_argument("unknown problem: " + s);
}

SolveStrategy parse_strategy(const std::string& s) {
  if (s == "cg") return SolveStrategy::Cg;
  if (s == "cg-qn") return SolveStrategy::CgQn;
  if (s == "cg-mg") return SolveStrategy::CgMg;
  throw std::invalid_argument("unknown strategy: " + s);
}

CoarseVariant parse_coarse(const std::string& s) {
  if (s == "cg") return CoarseVariant::Cg;
  if (s == "cg-qn") return CoarseVariant::CgQn;
  if (s == "shifted") return CoarseVariant::ShiftedCgQn;
  throw std::invalid_argument("unknown coarse variant: " + s);
}

int parse_level(const std::string& s) {
  std::string t = s;
  if (!t.empty() && (t[0] == 'L' || t[0] == 'l')) t = t.substr(1);
  std::size_t pos = 0;
  int level = 0;
  try {
    level = std::stoi(t, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("unknown level: " + s);
  }
  if (pos != t.size()) throw std::invalid_argument("unknown level: " + s);
  return level;
}

RunStatus parse_status(const std::string& s) {
  if (s == "converged") return RunStatus::Converged;
  if (s == "max-newton-iterations") return RunStatus::MaxNewtonIterations;
  if (s == "line-search-failure") return RunStatus::LineSearchFailure;
  if (s == "budget-exceeded") return RunStatus::BudgetExceeded;
  if (s == "solver-error") return RunStatus::SolverError;
  throw std::invalid_argument("unknown status: " + s);
}

}  // namespace jfmg
