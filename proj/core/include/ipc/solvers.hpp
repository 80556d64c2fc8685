#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ipc/config.hpp"
#include "ipc/numerics.hpp"
#include "ipc/oracle.hpp"

namespace ipc {

enum class RunStatus { Converged, MaxIters, LineSearchStall, ValidationError };

std::string to_string(RunStatus s);
RunStatus run_status_from_string(const std::string& s);

// One row of a run trace. Every record carries the pre-step quantities
// (f, gradient norm, squared distance to x* when known); the step fields
// h_k / alpha_k / r_k stay empty on the terminal record, where no step was
// taken. ls_evals counts the rejected line-search trials only: the
// accepted trial's gradient is the grad f(z_k) the step itself consumes,
// so a stepped iteration costs 1 + ls_evals + 1 gradient evaluations.
struct IterationRecord {
  long k = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  std::optional<double> h_k;
  std::optional<double> alpha_k;
  std::optional<double> r_k;
  int ls_evals = 0;
  std::optional<double> dist_sq;
  bool eta_fallback = false;  // trapezoid mode reverted to cfg.eta (not serialized)
};

struct RunTrace {
  std::vector<IterationRecord> records;
  RunStatus status = RunStatus::MaxIters;
  Eigen::VectorXd final_x;
  long iterations = 0;        // steps applied (== records.size()-1 unless aborted)
  long total_grad_evals = 0;
  int eta_fallbacks = 0;
  std::string message;        // diagnostic for non-Converged statuses
};

struct LineSearchOutcome {
  double h_k = 0.0;
  Eigen::VectorXd z;
  Eigen::VectorXd grad_z;
  double r_k = 0.0;
  int evals = 0;  // total trials, accepted one included (>= 1)
};

// Backtracks from gamma0 until r(gamma) = gamma*||g(z(gamma)) - g(x)|| /
// ||z(gamma) - x|| drops to nu, shrinking by theta*min(1, 1/r) per trial.
// Throws LineSearchStallError after params.max_evals trials.
LineSearchOutcome line_search(const Eigen::VectorXd& x, const Eigen::VectorXd& grad_x,
                              double gamma0, const LineSearchParams& params,
                              const GradientOracle& oracle);

// Initial trial step for the next iteration: widen by tau when the accepted
// ratio was at most mu, then clamp to [h_lo, h_hi].
double adaptive_initial_step(double h_k, double r_k, const LineSearchParams& params);

// Called after each applied step with the new iterate.
using IterateObserver = std::function<void(long k, const Eigen::VectorXd& x)>;

RunTrace solve_ipc_constant(const GradientOracle& oracle, const SolverConfig& cfg,
                            const Eigen::VectorXd& x0, const IterateObserver& observer = {});
RunTrace solve_ipc_adaptive(const GradientOracle& oracle, const SolverConfig& cfg,
                            const Eigen::VectorXd& x0, const IterateObserver& observer = {});
RunTrace solve_convex_ipc(const GradientOracle& oracle, const SolverConfig& cfg,
                          const Eigen::VectorXd& x0, const IterateObserver& observer = {});

// Dispatches on cfg.algorithm.
RunTrace solve(const GradientOracle& oracle, const SolverConfig& cfg,
               const Eigen::VectorXd& x0, const IterateObserver& observer = {});

// Post-hoc check of the guarantees a conforming run must satisfy. Needs an
// oracle with a known solution. fejer_ok: the squared distance to x* drops
// by at least kappa*||x_k - z_k||^2 each step (slack 1e-10 * initial
// distance). ergodic_ok: the running mean of ||grad f||^2 stays below
// dist0^2/(K kappa h^2) with h the constant step, or the h_min-based bound
// for the adaptive algorithms. h_floor_ok / alpha_floor_ok: accepted steps
// and correction lengths never undercut their proven floors.
struct VerificationReport {
  bool fejer_ok = false;
  bool ergodic_ok = false;
  bool h_floor_ok = false;
  std::optional<bool> alpha_floor_ok;  // ConvexIpc only
  std::string detail;                  // first violation; empty when clean

  bool all_ok() const {
    return fejer_ok && ergodic_ok && h_floor_ok && alpha_floor_ok.value_or(true);
  }
};

VerificationReport verify_trace(const RunTrace& trace, const GradientOracle& oracle,
                                const SolverConfig& cfg);

}  // namespace ipc
