#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <variant>

#include "ipc/oracle.hpp"

namespace ipc {

// Benchmark problem generators. Each generator is a pure function of
// (n, seed): every random quantity is drawn from its own named substream
// (see rng.hpp), matrices are filled row by row, so regenerating with the
// same inputs reproduces the instance bit for bit.

// min G(x)/D(x) with G(x) = x'Qx/2 + c'x + q convex quadratic and
// D(x) = r'x + t positive linear. Q = MM' + I with M entries uniform(0,1);
// c, r entrywise uniform(0,2); q uniform(1,2); t = 1 + 4n. Pseudo-convex
// on the region D > 0, which the oracle's domain_ok exposes; solver
// iterates are asserted to stay there, line-search trials may cross.
struct FractionalProblem {
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
  double q_const = 0.0;
  Eigen::VectorXd r;
  double t_const = 0.0;
  Eigen::VectorXd x0;  // uniform (1,10)^n
  std::uint64_t seed = 0;

  static FractionalProblem generate(int n, std::uint64_t seed);

  double denom(const Eigen::VectorXd& x) const;
  double f(const Eigen::VectorXd& x) const;
  // Quotient rule, with G/D computed once and reused: (Qx + c - f(x) r)/D.
  Eigen::VectorXd grad(const Eigen::VectorXd& x) const;
  GradientOracle oracle() const;
};

// min x'arctan(x) - sum log(1+x_i^2)/2 + x'Mx/2 + q'x with M = A'A + B,
// A entries uniform(-5,5), B the skew-symmetric part of a matrix drawn the
// same way, q uniform(-500,500). grad is the monotone operator
// arctan(x) + Mx + q; when B != 0 that is not the exact gradient of f (the
// skew part drops out of x'Mx/2), so f is recorded for reporting only.
struct ArctanQuadraticProblem {
  Eigen::MatrixXd M;
  Eigen::VectorXd q;
  double lipschitz = 0.0;  // ||M||_2 + 1, by power iteration
  Eigen::VectorXd x0;      // uniform (0,1)^n
  std::uint64_t seed = 0;

  static ArctanQuadraticProblem generate(int n, std::uint64_t seed);

  double f(const Eigen::VectorXd& x) const;
  Eigen::VectorXd grad(const Eigen::VectorXd& x) const;
  GradientOracle oracle() const;
};

// f(x) = (x - x*)'H(x - x*)/2 with H diagonal, eigenvalues log-spaced in
// [1, cond]. The minimizer and the exact gradient-flow trajectory are
// known in closed form, which makes this the verification oracle.
struct QuadraticProblem {
  Eigen::VectorXd h_diag;
  Eigen::VectorXd x_star;
  Eigen::VectorXd x0;  // uniform (-10,10)^n
  double cond = 1.0;
  std::uint64_t seed = 0;

  static QuadraticProblem generate(int n, double cond, std::uint64_t seed);

  double f(const Eigen::VectorXd& x) const;
  Eigen::VectorXd grad(const Eigen::VectorXd& x) const;
  // Exact solution of dx/dt = -grad f from x0: x* + exp(-Ht)(x0 - x*).
  Eigen::VectorXd flow_at(double t) const;
  GradientOracle oracle() const;
};

GradientOracle make_fractional(int n, std::uint64_t seed);
GradientOracle make_arctan_quadratic(int n, std::uint64_t seed);
GradientOracle make_quadratic(int n, double cond, std::uint64_t seed);

// Spectral norm by power iteration on M'M; stops after max_iters rounds or
// when the Rayleigh quotient changes by less than rel_tol relatively.
double spectral_norm(const Eigen::MatrixXd& m, std::uint64_t seed,
                     int max_iters = 200, double rel_tol = 1e-8);

// Self-describing binary problem files (version tag, generator name, seed,
// row-major 64-bit little-endian matrices). A saved instance reloads
// bit-exactly without re-running the generator.
using AnyProblem =
    std::variant<FractionalProblem, ArctanQuadraticProblem, QuadraticProblem>;

void save_problem(const std::string& path, const AnyProblem& problem);
AnyProblem load_problem(const std::string& path);
GradientOracle oracle_of(const AnyProblem& problem);

}  // namespace ipc
