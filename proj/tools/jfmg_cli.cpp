// Command line front end: single benchmark runs, report comparison against
// the published tables, and whole-table suites.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "jfmg/bench.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolverFailure = 1;
constexpr int kExitUsage = 2;

struct RunArgs {
  std::string problem = "bratu";
  std::string level = "L1";
  std::string strategy = "cg-mg";
  std::string coarse = "shifted";
  std::uint64_t seed = 0;
  std::string out_path;
  std::string csv_path;
  int nu1 = 5, nu2 = 5;
  double gamma = 5.0;
  int pairs = 20;
  double newton_tol = 1e-6;
  double coarse_tol = 1e-12;
  double forcing = -1.0;
  int max_newton = 100;
  long long budget = 200000;
  bool timing = false;
  bool compare = false;
};

jfmg::BenchmarkConfig to_config(const RunArgs& a) {
  jfmg::BenchmarkConfig cfg;
  cfg.problem = jfmg::parse_problem(a.problem);
  cfg.level = jfmg::parse_level(a.level);
  cfg.strategy = jfmg::parse_strategy(a.strategy);
  cfg.coarse = jfmg::parse_coarse(a.coarse);
  cfg.seed = a.seed;
  cfg.pre_sweeps = a.nu1;
  cfg.post_sweeps = a.nu2;
  cfg.shift_growth = a.gamma;
  cfg.lbfgs_pairs = a.pairs;
  cfg.newton_tol = a.newton_tol;
  cfg.coarse_tol = a.coarse_tol;
  if (a.forcing >= 0.0) cfg.forcing_override = a.forcing;
  cfg.max_newton = a.max_newton;
  cfg.eval_budget = a.budget;
  cfg.timing = a.timing;
  cfg.validate();
  return cfg;
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return false;
  }
  out << content;
  return true;
}

void print_summary(const jfmg::BenchmarkResult& r) {
  std::cout << jfmg::to_string(r.config.problem) << " L" << r.config.level << " "
            << jfmg::to_string(r.config.strategy);
  if (r.config.strategy == jfmg::SolveStrategy::CgMg)
    std::cout << " (coarse " << jfmg::to_string(r.config.coarse) << ")";
  std::cout << ": status=" << jfmg::to_string(r.report.status)
            << " n_dofs=" << r.n_dofs
            << " newton=" << r.report.newton_iterations
            << " krylov=" << r.report.total_krylov_iterations;
  char buf[128];
  std::snprintf(buf, sizeof buf, " ge=%.2f age=%.2f", r.report.ge_effective, r.report.age);
  std::cout << buf << " shifts=" << r.report.shift_count << "\n";
}

int emit_compare(const jfmg::RunSummary& summary) {
  bool failed = false;
  for (const jfmg::MetricVerdict& v : jfmg::compare_run(summary)) {
    std::cout << jfmg::format_verdict(summary, v) << "\n";
    failed = failed || v.verdict == jfmg::Verdict::Fail;
  }
  return failed ? kExitSolverFailure : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jacobian-free Newton-Krylov benchmarks with matrix-free multigrid preconditioning"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "run one benchmark");
  run->add_option("--problem", run_args.problem, "bratu | minsurf | neohookean");
  run->add_option("--level", run_args.level, "refinement level, L1..L5");
  run->add_option("--strategy", run_args.strategy, "cg | cg-qn | cg-mg");
  run->add_option("--coarse", run_args.coarse, "coarse solver for cg-mg: cg | cg-qn | shifted");
  run->add_option("--seed", run_args.seed, "random seed for eigenvalue estimation");
  run->add_option("--out", run_args.out_path, "write the JSON report here");
  run->add_option("--csv", run_args.csv_path, "write header plus one CSV row here");
  run->add_option("--nu1", run_args.nu1, "pre-smoothing sweeps");
  run->add_option("--nu2", run_args.nu2, "post-smoothing sweeps");
  run->add_option("--gamma", run_args.gamma, "spectral shift growth factor");
  run->add_option("--pairs", run_args.pairs, "L-BFGS memory");
  run->add_option("--newton-tol", run_args.newton_tol, "nonlinear residual tolerance");
  run->add_option("--coarse-tol", run_args.coarse_tol, "coarse-level absolute tolerance");
  run->add_option("--forcing", run_args.forcing, "fixed forcing term (overrides the adaptive one)");
  run->add_option("--max-newton", run_args.max_newton, "Newton iteration cap");
  run->add_option("--budget", run_args.budget, "effective gradient evaluation budget, 0 disables");
  run->add_flag("--timing", run_args.timing, "record wall time (off for reproducible reports)");
  run->add_flag("--compare", run_args.compare, "also compare against the reference tables");

  std::string report_path;
  CLI::App* compare = app.add_subcommand("compare", "check a JSON report against the reference tables");
  compare->add_option("--report", report_path, "JSON report produced by run --out")->required();

  int table = 2;
  std::uint64_t suite_seed = 0;
  int max_level = 0;
  std::string suite_csv, out_dir;
  bool suite_compare = false, suite_timing = false;
  CLI::App* suite = app.add_subcommand("suite", "run every row of one reference table");
  suite->add_option("--table", table, "1 (strategies) | 2 (multigrid) | 3 (coarse variants)")->required();
  suite->add_option("--seed", suite_seed, "random seed for eigenvalue estimation");
  suite->add_option("--max-level", max_level, "cap the refinement level (0: full table)");
  suite->add_option("--csv", suite_csv, "write the CSV table here (default: stdout)");
  suite->add_option("--out-dir", out_dir, "write one JSON report per run into this directory");
  suite->add_flag("--compare", suite_compare, "print reference verdicts per run");
  suite->add_flag("--timing", suite_timing, "record wall times (off for reproducible tables)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) {
      const jfmg::BenchmarkConfig cfg = to_config(run_args);
      const jfmg::BenchmarkResult result = jfmg::run_benchmark(cfg);
      print_summary(result);
      if (!run_args.out_path.empty() && !write_file(run_args.out_path, jfmg::to_json(result) + "\n"))
        return kExitUsage;
      if (!run_args.csv_path.empty() &&
          !write_file(run_args.csv_path, jfmg::csv_header() + "\n" + jfmg::csv_row(result) + "\n"))
        return kExitUsage;
      int code = result.report.status == jfmg::RunStatus::Converged ? kExitOk : kExitSolverFailure;
      if (run_args.compare) {
        const int cmp = emit_compare(jfmg::summarize(result));
        code = std::max(code, cmp);
      }
      return code;
    }

    if (compare->parsed()) {
      std::ifstream in(report_path);
      if (!in) {
        std::cerr << "error: cannot read " << report_path << "\n";
        return kExitUsage;
      }
      std::ostringstream ss;
      ss << in.rdbuf();
      return emit_compare(jfmg::summary_from_json(ss.str()));
    }

    // suite
    std::ostringstream csv;
    csv << jfmg::csv_header() << "\n";
    bool all_converged = true;
    for (const jfmg::BenchmarkConfig& base : jfmg::table_suite(table, suite_seed, max_level)) {
      jfmg::BenchmarkConfig cfg = base;
      cfg.timing = suite_timing;
      const jfmg::BenchmarkResult result = jfmg::run_benchmark(cfg);
      print_summary(result);
      csv << jfmg::csv_row(result) << "\n";
      all_converged = all_converged && result.report.status == jfmg::RunStatus::Converged;
      if (!out_dir.empty()) {
        std::ostringstream name;
        name << out_dir << "/" << jfmg::to_string(cfg.problem) << "_L" << cfg.level << "_"
             << jfmg::to_string(cfg.strategy);
        if (cfg.strategy == jfmg::SolveStrategy::CgMg) name << "_" << jfmg::to_string(cfg.coarse);
        name << ".json";
        if (!write_file(name.str(), jfmg::to_json(result) + "\n")) return kExitUsage;
      }
      if (suite_compare)
        for (const jfmg::MetricVerdict& v : jfmg::compare_run(jfmg::summarize(result)))
          std::cout << "  " << jfmg::format_verdict(jfmg::summarize(result), v) << "\n";
    }
    if (suite_csv.empty()) {
      std::cout << csv.str();
    } else if (!write_file(suite_csv, csv.str())) {
      return kExitUsage;
    }
    return all_converged ? kExitOk : kExitSolverFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolverFailure;
  }
}
