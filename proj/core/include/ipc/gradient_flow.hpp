#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "ipc/oracle.hpp"
#include "ipc/problems.hpp"

namespace ipc {

// Discretizations of the gradient flow dx/dt = -grad f(x). The implicit
// schemes solve their update equation by plain fixed-point iteration, which
// contracts only while h*L stays small; those schemes require h*L <= 0.5
// whenever L is known.
enum class FlowScheme {
  ExplicitEuler,         // x - h g(x);                     global error O(h)
  ImplicitEuler,         // y = x - h g(y);                 global error O(h)
  Midpoint,              // z = x - (h/2) g(z), then 2z - x; O(h^2)
  Trapezoidal,           // y = x - (h/2)(g(x) + g(y));     O(h^2)
  ExplicitTrapezoidal,   // ipc_step at beta = 1/2;         O(h^2)
};

std::string to_string(FlowScheme s);
FlowScheme flow_scheme_from_string(const std::string& s);
std::vector<FlowScheme> all_flow_schemes();

struct FixedPointOptions {
  double tol = 1e-12;
  int max_iters = 200;
};

// One step from x. Throws NoConvergenceError if an implicit solve misses
// its tolerance, ValidationError if h <= 0 or h*L > 0.5 with L known.
Eigen::VectorXd flow_step(FlowScheme scheme, const GradientOracle& oracle,
                          const Eigen::VectorXd& x, double h,
                          const FixedPointOptions& fp = {});

// Integrates the quadratic's flow from its x0 to time T once per step size,
// measures E(h) = max_k ||x_k - x(t_k)|| against the closed-form
// trajectory, and returns the least-squares slope of log E vs log h.
// Requires at least 3 step sizes, each with h*L <= 0.5.
double estimate_order(FlowScheme scheme, const QuadraticProblem& problem, double T,
                      const std::vector<double>& h_list,
                      const FixedPointOptions& fp = {});

}  // namespace ipc
