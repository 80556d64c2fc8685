#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>

#include "ipc/errors.hpp"
#include "ipc/numerics.hpp"
#include "ipc/problems.hpp"
#include "ipc/rng.hpp"

using namespace ipc;

namespace {

Eigen::VectorXd rand_vec(int n, std::uint64_t seed, double lo, double hi) {
  Xoshiro256pp rng(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

bool fd_matches(const GradientOracle& oracle, const Eigen::VectorXd& x,
                const Eigen::VectorXd& expected_grad, double rel_tol) {
  const Eigen::VectorXd fd = finite_difference_grad(oracle, x, 1e-4);
  const double scale = std::max(1.0, expected_grad.lpNorm<Eigen::Infinity>());
  return (fd - expected_grad).lpNorm<Eigen::Infinity>() <= rel_tol * scale;
}

}  // namespace

TEST_CASE("generators are deterministic in (n, seed)") {
  const auto a = FractionalProblem::generate(17, 99);
  const auto b = FractionalProblem::generate(17, 99);
  CHECK(a.Q == b.Q);
  CHECK(a.c == b.c);
  CHECK(a.x0 == b.x0);
  CHECK(a.q_const == b.q_const);

  const auto c = ArctanQuadraticProblem::generate(9, 5);
  const auto d = ArctanQuadraticProblem::generate(9, 5);
  CHECK(c.M == d.M);
  CHECK(c.lipschitz == d.lipschitz);

  const auto e = FractionalProblem::generate(17, 100);
  CHECK(a.Q != e.Q);
}

TEST_CASE("fractional: construction invariants") {
  const auto p = FractionalProblem::generate(30, 4);
  CHECK((p.Q - p.Q.transpose()).norm() <= 1e-12 * p.Q.norm());
  // Q = MM' + I: smallest eigenvalue at least 1.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p.Q);
  CHECK(eig.eigenvalues().minCoeff() >= 1.0 - 1e-9);
  CHECK(p.c.minCoeff() > 0.0);
  CHECK(p.c.maxCoeff() < 2.0);
  CHECK(p.r.minCoeff() > 0.0);
  CHECK(p.r.maxCoeff() < 2.0);
  CHECK(p.q_const > 1.0);
  CHECK(p.q_const < 2.0);
  CHECK(p.t_const == 1.0 + 4.0 * 30);
  CHECK(p.x0.minCoeff() >= 1.0);
  CHECK(p.x0.maxCoeff() < 10.0);
}

TEST_CASE("fractional: denominator positive and f bounded below on the box") {
  const auto p = FractionalProblem::generate(12, 8);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Eigen::VectorXd x = rand_vec(12, 1000 + s, 0.0, 10.0);
    CHECK(p.denom(x) > 0.0);
    CHECK(p.f(x) > 0.0);  // G and D are both positive on the orthant
  }
  CHECK(p.oracle().domain_ok(p.x0));
}

TEST_CASE("fractional: gradient matches finite differences") {
  for (int n : {1, 7, 40}) {
    const auto p = FractionalProblem::generate(n, 21);
    const GradientOracle oracle = p.oracle();
    for (std::uint64_t s = 0; s < 10; ++s) {
      const Eigen::VectorXd x = rand_vec(n, 2000 + s, 1.0, 10.0);
      CHECK(fd_matches(oracle, x, oracle.eval_grad(x), 1e-5));
    }
  }
}

TEST_CASE("fractional: pseudo-monotone gradient on the positive box") {
  const int n = 15;
  const auto p = FractionalProblem::generate(n, 33);
  const GradientOracle oracle = p.oracle();
  int checked = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Eigen::VectorXd x = rand_vec(n, 3000 + 2 * s, 1.0, 10.0);
    const Eigen::VectorXd y = rand_vec(n, 3001 + 2 * s, 1.0, 10.0);
    const Eigen::VectorXd d = y - x;
    if (oracle.eval_grad(x).dot(d) >= 0.0) {
      CHECK(oracle.eval_grad(y).dot(d) >= -1e-8);
      ++checked;
    }
  }
  CHECK(checked > 10);  // the implication premise must actually fire
}

TEST_CASE("arctan-quadratic: construction invariants") {
  const auto p = ArctanQuadraticProblem::generate(25, 6);
  // Skew part is exactly the skew of M; symmetric part is PSD.
  const Eigen::MatrixXd sym = 0.5 * (p.M + p.M.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
  CHECK(p.x0.minCoeff() >= 0.0);
  CHECK(p.x0.maxCoeff() < 1.0);
  CHECK(p.lipschitz > 1.0);
}

TEST_CASE("arctan-quadratic: gradient at zero is q") {
  const auto p = ArctanQuadraticProblem::generate(10, 77);
  const Eigen::VectorXd g0 = p.grad(Eigen::VectorXd::Zero(10));
  CHECK((g0 - p.q).norm() == 0.0);
}

TEST_CASE("arctan-quadratic: monotone operator and Lipschitz certificate") {
  const int n = 20;
  const auto p = ArctanQuadraticProblem::generate(n, 13);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Eigen::VectorXd x = rand_vec(n, 4000 + 2 * s, -2.0, 2.0);
    const Eigen::VectorXd y = rand_vec(n, 4001 + 2 * s, -2.0, 2.0);
    const Eigen::VectorXd dg = p.grad(x) - p.grad(y);
    const Eigen::VectorXd dx = x - y;
    CHECK(dg.dot(dx) >= -1e-8 * std::max(1.0, dx.squaredNorm()));
    CHECK(dg.norm() <= p.lipschitz * (1.0 + 1e-8) * dx.norm());
  }
}

TEST_CASE("arctan-quadratic: finite differences see only the symmetric part") {
  const int n = 12;
  const auto p = ArctanQuadraticProblem::generate(n, 42);
  const GradientOracle oracle = p.oracle();
  const Eigen::MatrixXd sym = 0.5 * (p.M + p.M.transpose());
  const Eigen::MatrixXd skew = 0.5 * (p.M - p.M.transpose());
  CHECK(skew.norm() > 1.0);  // the caveat is non-vacuous

  for (std::uint64_t s = 0; s < 20; ++s) {
    const Eigen::VectorXd x = rand_vec(n, 5000 + s, -1.0, 1.0);
    // d/dx of the stored f has the skew contribution dropped.
    const Eigen::VectorXd grad_of_f = x.array().atan().matrix() + sym * x + p.q;
    CHECK(fd_matches(oracle, x, grad_of_f, 1e-5));
    // and therefore differs from the iterated operator whenever skew*x != 0.
    const Eigen::VectorXd op = oracle.eval_grad(x);
    CHECK((op - grad_of_f - skew * x).norm() <= 1e-10 * std::max(1.0, op.norm()));
  }
}

TEST_CASE("quadratic: stationary point and contraction") {
  const auto p = QuadraticProblem::generate(9, 50.0, 3);
  const GradientOracle oracle = p.oracle();
  CHECK(oracle.eval_grad(p.x_star).norm() == 0.0);
  CHECK(oracle.known_solution.has_value());
  CHECK(*oracle.lipschitz == 50.0);

  // Gradient descent with h = 1/cond contracts the distance monotonically.
  Eigen::VectorXd x = p.x0;
  double dist = (x - p.x_star).norm();
  for (int i = 0; i < 25; ++i) {
    x = x - (1.0 / p.cond) * oracle.eval_grad(x);
    const double next = (x - p.x_star).norm();
    CHECK(next <= dist);
    dist = next;
  }
}

TEST_CASE("quadratic: eigenvalues log-spaced in [1, cond]") {
  const auto p = QuadraticProblem::generate(5, 16.0, 1);
  CHECK(p.h_diag[0] == doctest::Approx(1.0));
  CHECK(p.h_diag[1] == doctest::Approx(2.0));
  CHECK(p.h_diag[2] == doctest::Approx(4.0));
  CHECK(p.h_diag[3] == doctest::Approx(8.0));
  CHECK(p.h_diag[4] == doctest::Approx(16.0));
  const auto scalar = QuadraticProblem::generate(1, 9.0, 1);
  CHECK(scalar.h_diag[0] == 9.0);
}

TEST_CASE("quadratic: finite differences") {
  const auto p = QuadraticProblem::generate(20, 100.0, 11);
  const GradientOracle oracle = p.oracle();
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Eigen::VectorXd x = rand_vec(20, 6000 + s, -5.0, 5.0);
    CHECK(fd_matches(oracle, x, oracle.eval_grad(x), 1e-5));
  }
}

TEST_CASE("spectral norm power iteration") {
  // Diagonal: exact answer known.
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(4, 4);
  d.diagonal() << 1.0, -7.5, 3.0, 2.0;
  CHECK(spectral_norm(d, 1) == doctest::Approx(7.5).epsilon(1e-7));

  // Non-symmetric: compare against SVD.
  const int n = 15;
  Eigen::MatrixXd m(n, n);
  Xoshiro256pp rng(8);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(-3.0, 3.0);
  const double svd = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
  CHECK(spectral_norm(m, 2) == doctest::Approx(svd).epsilon(1e-6));
}

TEST_CASE("problem files round-trip bit-exactly") {
  const std::string path = "test_problem_roundtrip.ipcprob";

  const auto frac = FractionalProblem::generate(13, 21);
  save_problem(path, frac);
  const auto frac2 = std::get<FractionalProblem>(load_problem(path));
  CHECK(frac2.Q == frac.Q);
  CHECK(frac2.c == frac.c);
  CHECK(frac2.q_const == frac.q_const);
  CHECK(frac2.r == frac.r);
  CHECK(frac2.t_const == frac.t_const);
  CHECK(frac2.x0 == frac.x0);
  CHECK(frac2.seed == frac.seed);

  const auto arct = ArctanQuadraticProblem::generate(6, 2);
  save_problem(path, arct);
  const auto arct2 = std::get<ArctanQuadraticProblem>(load_problem(path));
  CHECK(arct2.M == arct.M);
  CHECK(arct2.q == arct.q);
  CHECK(arct2.lipschitz == arct.lipschitz);
  CHECK(arct2.x0 == arct.x0);

  const auto quad = QuadraticProblem::generate(6, 12.0, 2);
  save_problem(path, quad);
  const auto quad2 = std::get<QuadraticProblem>(load_problem(path));
  CHECK(quad2.h_diag == quad.h_diag);
  CHECK(quad2.x_star == quad.x_star);
  CHECK(quad2.cond == quad.cond);
  CHECK(quad2.x0 == quad.x0);

  // An oracle rebuilt from the file evaluates identically to the source.
  save_problem(path, arct);
  const GradientOracle o1 = arct.oracle();
  const GradientOracle o2 = oracle_of(load_problem(path));
  const Eigen::VectorXd probe = rand_vec(6, 404, -1.0, 1.0);
  CHECK(o1.eval_f(probe) == o2.eval_f(probe));
  CHECK(o1.eval_grad(probe) == o2.eval_grad(probe));
  std::remove(path.c_str());
}

TEST_CASE("problem file loader rejects junk") {
  const std::string path = "test_problem_junk.bin";
  {
    FILE* f = std::fopen(path.c_str(), "wb");
    std::fputs("not a problem file at all", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS((void)load_problem(path), IoError);
  std::remove(path.c_str());
  CHECK_THROWS_AS((void)load_problem("does_not_exist.ipcprob"), IoError);
}

TEST_CASE("default starting points are within spec ranges") {
  const auto frac = FractionalProblem::generate(40, 9);
  CHECK(frac.oracle().default_x0 == frac.x0);
  const auto arct = ArctanQuadraticProblem::generate(40, 9);
  CHECK(arct.oracle().default_x0 == arct.x0);
}
