#pragma once

#include <optional>
#include <string>

namespace ipc {

enum class Algorithm { IpcConstant, IpcAdaptive, ConvexIpc };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

// Backtracking line-search parameters shared by the adaptive algorithms.
struct LineSearchParams {
  double mu = 0.3;           // expansion test: r_k <= mu widens the next initial step
  double nu = 0.5;           // acceptance threshold: accepted steps satisfy r_k <= nu
  double theta = 0.67;       // backtracking factor
  double tau = 1.5;          // expansion factor
  double gamma0_init = 1.0;  // initial trial step of the first iteration
  double h_lo = 1e-6;        // clamp interval for each iteration's initial trial step
  double h_hi = 3.0;
  int max_evals = 100;       // gradient-evaluation cap per search
};

struct SolverConfig {
  Algorithm algorithm = Algorithm::IpcAdaptive;
  double beta = 1.0;     // adjustment coefficient of the correction term
  double eta = 1.9;      // relaxation of the scaled correction (ConvexIpc)
  double h_const = 0.0;  // fixed step; required by IpcConstant. A positive
                         // value with ConvexIpc fixes h_k and disables the
                         // line search (used by the trapezoid equivalence).
  LineSearchParams line_search;
  double epsilon = 1e-3;      // stop when ||grad f(x_k)|| < epsilon
  long max_iters = 1000000;
  bool trapezoid_mode = false;  // ConvexIpc: per-iteration eta = 1/alpha_k
                                // whenever that lies in (0, 2)
};

// The step bound the configured algorithm must keep h_k below, as a
// multiple of 1/L (1 for the constant-step algorithm, 4 for ConvexIpc).
double max_step_for(const SolverConfig& cfg, double lipschitz);

// Both throw ValidationError naming the violated inequality. Bounds on
// beta are enforced strictly (no clamping): configurations are expected
// to sit deliberately close to the open end of the interval.
void validate(const LineSearchParams& p);
void validate(const SolverConfig& cfg, std::optional<double> lipschitz);

}  // namespace ipc
