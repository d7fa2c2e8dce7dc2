#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "jfmg/krylov.hpp"

#ifdef JFMG_HAVE_EIGEN
#include <Eigen/Dense>
#endif

using namespace jfmg;

namespace {

class DiagOperator final : public LinearOperator {
 public:
  explicit DiagOperator(std::vector<double> d) : d_(std::move(d)), bc_(d_.size()) {}
  int level() const override { return 0; }
  std::size_t n_dofs() const override { return d_.size(); }
  const ConstraintSet& constraints() const override { return bc_; }
  bool apply(const DofVector& u, DofVector& out) const override {
    ++applies;
    out.level = u.level;
    out.values.resize(d_.size());
    for (std::size_t i = 0; i < d_.size(); ++i) out[i] = d_[i] * u[i];
    return true;
  }
  mutable long applies = 0;

 private:
  std::vector<double> d_;
  ConstraintSet bc_;
};

class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(std::vector<std::vector<double>> A) : A_(std::move(A)), bc_(A_.size()) {}
  int level() const override { return 0; }
  std::size_t n_dofs() const override { return A_.size(); }
  const ConstraintSet& constraints() const override { return bc_; }
  bool apply(const DofVector& u, DofVector& out) const override {
    out.level = u.level;
    out.values.assign(A_.size(), 0.0);
    for (std::size_t i = 0; i < A_.size(); ++i)
      for (std::size_t j = 0; j < A_.size(); ++j) out[i] += A_[i][j] * u[j];
    return true;
  }

 private:
  std::vector<std::vector<double>> A_;
  ConstraintSet bc_;
};

class NanOperator final : public LinearOperator {
 public:
  explicit NanOperator(std::size_t n) : n_(n), bc_(n) {}
  int level() const override { return 0; }
  std::size_t n_dofs() const override { return n_; }
  const ConstraintSet& constraints() const override { return bc_; }
  bool apply(const DofVector&, DofVector&) const override { return false; }

 private:
  std::size_t n_;
  ConstraintSet bc_;
};

class NegatingPreconditioner final : public Preconditioner {
 public:
  bool apply(const DofVector& r, DofVector& z) const override {
    z = r;
    scale(-1.0, z);
    return true;
  }
};

DofVector random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  DofVector v(0, n);
  for (double& x : v.values) x = gauss(rng);
  return v;
}

}  // namespace

TEST_CASE("cg solves a random diagonal system to the direct solution") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unif(0.5, 10.0);
  std::vector<double> d(50);
  for (double& v : d) v = unif(rng);
  DiagOperator A(d);
  const DofVector b = random_vector(50, 3);

  CgOptions opts;
  opts.tol_abs = 1e-10;
  opts.max_iterations = 200;
  DofVector s0(0, 50);
  const CgOutcome out = cg_solve(A, b, s0, nullptr, opts);
  CHECK(out.status == CgStatus::Converged);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < 50; ++i) {
    const double xi = b[i] / d[i];
    num += (out.solution[i] - xi) * (out.solution[i] - xi);
    den += xi * xi;
  }
  CHECK(std::sqrt(num / den) <= 1e-8);
}

#ifdef JFMG_HAVE_EIGEN
TEST_CASE("cg matches a dense direct solve on random spd systems") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    const int n = 50;
    Eigen::MatrixXd B(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) B(i, j) = gauss(rng);
    Eigen::MatrixXd A = B.transpose() * B + Eigen::MatrixXd::Identity(n, n);
    std::vector<std::vector<double>> Av(static_cast<std::size_t>(n),
                                        std::vector<double>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) Av[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = A(i, j);
    Eigen::VectorXd be(n);
    for (int i = 0; i < n; ++i) be(i) = gauss(rng);
    const Eigen::VectorXd xe = A.ldlt().solve(be);

    DenseOperator op(Av);
    DofVector b(0, static_cast<std::size_t>(n)), s0(0, static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) b[static_cast<std::size_t>(i)] = be(i);
    CgOptions opts;
    opts.tol_abs = 1e-12 * be.norm();
    opts.max_iterations = 500;
    const CgOutcome out = cg_solve(op, b, s0, nullptr, opts);
    CHECK(out.status == CgStatus::Converged);
    double num = 0.0;
    for (int i = 0; i < n; ++i) num += std::pow(out.solution[static_cast<std::size_t>(i)] - xe(i), 2);
    CHECK(std::sqrt(num) / xe.norm() <= 1e-8);
  }
}
#endif

TEST_CASE("identity converges in one step") {
  DiagOperator A(std::vector<double>(6, 1.0));
  const DofVector b = random_vector(6, 4);
  DofVector s0(0, 6);
  CgOptions opts;
  opts.tol_abs = 1e-14;
  const CgOutcome out = cg_solve(A, b, s0, nullptr, opts);
  CHECK(out.status == CgStatus::Converged);
  CHECK(out.iterations == 1);
  for (std::size_t i = 0; i < 6; ++i) CHECK(out.solution[i] == doctest::Approx(b[i]).epsilon(1e-14));
}

TEST_CASE("negative definite operators stop immediately with the exact rayleigh quotient") {
  DiagOperator A(std::vector<double>(5, -1.0));
  const DofVector b = random_vector(5, 5);
  DofVector s0(0, 5);
  CgOptions opts;
  opts.tol_abs = 1e-12;
  const CgOutcome out = cg_solve(A, b, s0, nullptr, opts);
  CHECK(out.status == CgStatus::NegativeCurvature);
  CHECK(out.lambda_c == -1.0);  // <p, -p> / <p, p> with identical summation order
  CHECK(out.iterations == 0);
  CHECK(norm2(out.solution) == 0.0);  // the pre-step iterate
}

TEST_CASE("indefinite diagonal: detection, safe iterate, shifted re-solve") {
  // diag(-1, 2) with b = (1, 1): the first step has positive curvature and
  // lands on (2, 2); the second direction p = (12, 6) exposes the negative
  // eigenvalue with Rayleigh quotient -72/180.
  DiagOperator A(std::vector<double>{-1.0, 2.0});
  DofVector b(0, 2), s0(0, 2);
  b[0] = 1.0;
  b[1] = 1.0;
  CgOptions opts;
  opts.tol_abs = 1e-12;
  const CgOutcome out = cg_solve(A, b, s0, nullptr, opts);
  CHECK(out.status == CgStatus::NegativeCurvature);
  CHECK(out.iterations == 1);
  CHECK(out.lambda_c == doctest::Approx(-0.4).epsilon(1e-15));
  CHECK(out.solution[0] == doctest::Approx(2.0));
  CHECK(out.solution[1] == doctest::Approx(2.0));

  // Shift by 5 |lambda_c|: diag(1, 4) is SPD and CG converges from the safe iterate.
  const double shift = 5.0 * std::abs(out.lambda_c);
  DiagOperator As(std::vector<double>{-1.0 + shift, 2.0 + shift});
  const CgOutcome out2 = cg_solve(As, b, out.solution, nullptr, opts);
  CHECK(out2.status == CgStatus::Converged);
  CHECK(out2.solution[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out2.solution[1] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("an indefinite preconditioner is tolerated") {
  // M = -I flips the search direction; on A = I the flipped alpha still lands
  // on the solution. No breakdown, no NaNs.
  DiagOperator A(std::vector<double>(4, 1.0));
  const DofVector b = random_vector(4, 6);
  DofVector s0(0, 4);
  NegatingPreconditioner M;
  CgOptions opts;
  opts.tol_abs = 1e-12;
  const CgOutcome out = cg_solve(A, b, s0, &M, opts);
  CHECK(out.status == CgStatus::Converged);
  CHECK(out.iterations == 1);
  for (std::size_t i = 0; i < 4; ++i) CHECK(out.solution[i] == doctest::Approx(b[i]).epsilon(1e-13));
}

TEST_CASE("termination honours max(tol_abs, forcing * ||b||)") {
  std::vector<double> d(30);
  for (std::size_t i = 0; i < 30; ++i) d[i] = 1.0 + static_cast<double>(i);
  DiagOperator A(d);
  const DofVector b = random_vector(30, 7);
  DofVector s0(0, 30);

  CgOptions loose;
  loose.forcing = 0.5;
  loose.max_iterations = 100;
  const CgOutcome c1 = cg_solve(A, b, s0, nullptr, loose);
  CHECK(c1.status == CgStatus::Converged);
  CHECK(c1.residual_norm <= 0.5 * norm2(b));

  CgOptions tight;
  tight.tol_abs = 1e-10;
  tight.max_iterations = 100;
  const CgOutcome c2 = cg_solve(A, b, s0, nullptr, tight);
  CHECK(c2.status == CgStatus::Converged);
  CHECK(c2.iterations > c1.iterations);
  CHECK(c2.residual_norm <= 1e-10);
}

TEST_CASE("iteration cap and apply accounting") {
  std::vector<double> d(40);
  for (std::size_t i = 0; i < 40; ++i) d[i] = 1.0 + 0.3 * static_cast<double>(i);
  DiagOperator A(d);
  const DofVector b = random_vector(40, 8);
  DofVector s0(0, 40);
  CgOptions opts;
  opts.tol_abs = 1e-14;
  opts.max_iterations = 3;
  const CgOutcome out = cg_solve(A, b, s0, nullptr, opts);
  CHECK(out.status == CgStatus::MaxIterations);
  CHECK(out.iterations == 3);
  CHECK(A.applies == 3);  // one application per step from a zero start

  // A nonzero start costs one extra application for the initial residual.
  A.applies = 0;
  DofVector s1 = random_vector(40, 9);
  cg_solve(A, b, s1, nullptr, opts);
  CHECK(A.applies == 4);

  // Starting at the exact solution converges with zero iterations.
  A.applies = 0;
  DofVector xstar(0, 40);
  for (std::size_t i = 0; i < 40; ++i) xstar[i] = b[i] / d[i];
  CgOptions prec;
  prec.tol_abs = 1e-9;
  const CgOutcome at_solution = cg_solve(A, b, xstar, nullptr, prec);
  CHECK(at_solution.status == CgStatus::Converged);
  CHECK(at_solution.iterations == 0);
  CHECK(A.applies == 1);
}

TEST_CASE("breakdown on non-finite operators") {
  NanOperator A(5);
  const DofVector b = random_vector(5, 10);
  DofVector s0(0, 5);
  const CgOutcome out = cg_solve(A, b, s0, nullptr, {});
  CHECK(out.status == CgStatus::Breakdown);
}

TEST_CASE("size validation") {
  DiagOperator A(std::vector<double>(4, 1.0));
  DofVector b(0, 3), s0(0, 4);
  CHECK_THROWS_AS(cg_solve(A, b, s0, nullptr, {}), std::invalid_argument);
}

TEST_CASE("uniform sampling of pair indices") {
  CHECK(uniform_sample_indices(100, 5) == std::vector<std::size_t>{0, 24, 49, 74, 99});
  CHECK(uniform_sample_indices(3, 20) == std::vector<std::size_t>{0, 1, 2});
  CHECK(uniform_sample_indices(1, 5) == std::vector<std::size_t>{0});
  CHECK(uniform_sample_indices(0, 5).empty());
  CHECK(uniform_sample_indices(10, 0).empty());
  CHECK(uniform_sample_indices(2, 5) == std::vector<std::size_t>{0, 1});
  const auto idx = uniform_sample_indices(20, 20);
  REQUIRE(idx.size() == 20);
  for (std::size_t j = 0; j < 20; ++j) CHECK(idx[j] == j);
}

TEST_CASE("secant collector keeps a bounded uniformly spread record") {
  SecantCollector col(3);
  for (int k = 0; k < 11; ++k) {
    DofVector s(0, 1), y(0, 1);
    s[0] = static_cast<double>(k);
    y[0] = static_cast<double>(k) + 0.5;
    col.observe(s, y);
    CHECK(static_cast<int>(col.pairs().size()) < 2 * col.target());
  }
  CHECK(col.observed() == 11);
  // Stride doubling keeps observations 0, 4, 8 after eleven pushes.
  REQUIRE(col.pairs().size() == 3);
  CHECK(col.pairs()[0].s[0] == 0.0);
  CHECK(col.pairs()[1].s[0] == 4.0);
  CHECK(col.pairs()[2].s[0] == 8.0);
  col.finalize();
  CHECK(col.pairs().size() == 3);

  SecantCollector few(10);
  for (int k = 0; k < 4; ++k) {
    DofVector s(0, 1), y(0, 1);
    s[0] = 1.0;
    y[0] = 1.0;
    few.observe(s, y);
  }
  few.finalize();
  CHECK(few.pairs().size() == 4);

  CHECK_THROWS_AS(SecantCollector(0), std::invalid_argument);
}

TEST_CASE("lbfgs with no pairs is the identity") {
  LbfgsPreconditioner M({});
  CHECK(M.pair_count() == 0);
  CHECK(M.gamma() == 1.0);
  const DofVector r = random_vector(6, 11);
  DofVector z;
  REQUIRE(M.apply(r, z));
  for (std::size_t i = 0; i < 6; ++i) CHECK(z[i] == r[i]);
}

TEST_CASE("lbfgs satisfies the secant equation of its newest pair") {
  // With a single pair the two-loop recursion maps y exactly to s.
  DofVector s(0, 4), y(0, 4);
  s[0] = 1.0;
  s[1] = 2.0;
  s[2] = -0.5;
  s[3] = 0.25;
  y[0] = 0.5;
  y[1] = 1.0;
  y[2] = 0.5;
  y[3] = 1.5;
  REQUIRE(dot(s, y) > 0.0);
  LbfgsPreconditioner M({SecantPair{s, y}});
  REQUIRE(M.pair_count() == 1);
  DofVector z;
  REQUIRE(M.apply(y, z));
  for (std::size_t i = 0; i < 4; ++i) CHECK(z[i] == doctest::Approx(s[i]).epsilon(1e-13));
}

TEST_CASE("lbfgs drops pairs violating the curvature condition") {
  DofVector s(0, 2), y(0, 2);
  s[0] = 1.0;
  y[0] = -1.0;  // <s, y> < 0
  DofVector s2(0, 2), y2(0, 2);
  s2[1] = 1.0;
  y2[1] = 2.0;
  LbfgsPreconditioner M({SecantPair{s, y}, SecantPair{s2, y2}});
  CHECK(M.pair_count() == 1);
  CHECK(M.gamma() == doctest::Approx(0.5));  // <s2,y2>/<y2,y2> from the surviving pair
}

TEST_CASE("lbfgs is symmetric and positive on random vectors") {
  std::vector<double> d(20);
  for (std::size_t i = 0; i < 20; ++i) d[i] = 1.0 + static_cast<double>(i);
  DiagOperator A(d);
  const DofVector b = random_vector(20, 12);
  DofVector s0(0, 20);
  SecantCollector col(8);
  CgOptions opts;
  opts.tol_abs = 1e-12;
  opts.max_iterations = 60;
  cg_solve(A, b, s0, nullptr, opts, &col);
  col.finalize();
  LbfgsPreconditioner M(col.pairs());
  REQUIRE(M.pair_count() > 0);

  for (unsigned t = 0; t < 20; ++t) {
    const DofVector r = random_vector(20, 100 + t);
    const DofVector q = random_vector(20, 200 + t);
    DofVector Mr, Mq;
    REQUIRE(M.apply(r, Mr));
    REQUIRE(M.apply(q, Mq));
    const double rq = dot(Mr, q), qr = dot(r, Mq);
    CHECK(rq == doctest::Approx(qr).epsilon(1e-10));
    CHECK(dot(r, Mr) > 0.0);
  }
}

TEST_CASE("lbfgs preconditioning accelerates cg") {
  // Collect pairs on one run, then precondition a second run with a fresh
  // right-hand side: the iteration count must drop.
  std::vector<double> d(60);
  for (std::size_t i = 0; i < 60; ++i) d[i] = std::pow(10.0, 3.0 * static_cast<double>(i) / 59.0);
  DiagOperator A(d);
  DofVector s0(0, 60);
  CgOptions opts;
  opts.tol_abs = 1e-10;
  opts.max_iterations = 400;

  SecantCollector col(20);
  const DofVector b1 = random_vector(60, 13);
  const CgOutcome plain1 = cg_solve(A, b1, s0, nullptr, opts, &col);
  CHECK(plain1.status == CgStatus::Converged);
  LbfgsPreconditioner M(col.pairs());
  REQUIRE(M.pair_count() >= 10);

  const DofVector b2 = random_vector(60, 14);
  const CgOutcome plain2 = cg_solve(A, b2, s0, nullptr, opts);
  const CgOutcome precon = cg_solve(A, b2, s0, &M, opts);
  CHECK(precon.status == CgStatus::Converged);
  CHECK(precon.iterations < plain2.iterations);
}
