#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ipc/gradient_flow.hpp"
#include "ipc/problems.hpp"
#include "ipc/solvers.hpp"
#include "ipc/trace_io.hpp"

namespace ipc {

enum class ProblemKind { Fractional, ArctanQuadratic, Quadratic };

std::string to_string(ProblemKind p);
ProblemKind problem_kind_from_string(const std::string& s);

// A fully described experiment: problem instance, solver configuration and
// outputs. The unit the CLI builds and the sweep fans out over.
struct ExperimentSpec {
  ProblemKind problem = ProblemKind::Quadratic;
  int n = 100;
  std::uint64_t seed = 1;
  double cond = 100.0;  // quadratic generator only
  SolverConfig config;
  std::vector<double> beta_list;  // sweep mode
  std::string output_path;
  std::string profile;       // "", "exp1" or "exp2"
  std::string problem_file;  // when set, load this instead of generating
};

// Named parameter presets. exp1: line-search profile mu=0.3 nu=0.5 tau=1.5
// theta=0.67 gamma0=1 h_hi=3 h_lo=1e-6 eps=1e-3 on the fractional problem
// with ipc-adaptive. exp2: mu=0.4 nu=0.9 theta=0.7 tau=1.5 h_lo=1e-6
// eta=1.9 eps=1e-3 on the arctan-quadratic problem with convex-ipc, where
// gamma0 and h_hi resolve to 2/L once the instance (hence L) exists.
void apply_profile(ExperimentSpec& spec, const std::string& name);

GradientOracle build_oracle(const ExperimentSpec& spec);

// Copies the config with any instance-dependent profile values resolved.
SolverConfig resolved_config(const ExperimentSpec& spec, const GradientOracle& oracle);

struct RunResult {
  RunTrace trace;
  std::optional<VerificationReport> verification;
};

// Builds the oracle, runs the configured solver from the instance's x0,
// verifies when a solution is known, and writes the trace CSV when
// output_path is set.
RunResult run_single(const ExperimentSpec& spec);

struct SweepRow {
  double beta = 0.0;
  long iterations = 0;
  long grad_evals = 0;
  double final_grad_norm = 0.0;
  RunStatus status = RunStatus::MaxIters;
  std::optional<VerificationReport> verification;
  std::string error;  // nonempty if the run threw
};

struct SweepReport {
  std::vector<SweepRow> rows;              // ascending beta
  std::optional<double> argmin_beta;       // by iterations, converged rows only
};

// One run per beta, all from the same instance and starting point. Every
// beta is validated before the first run starts; per-row failures are
// recorded and the sweep continues. Rows execute in parallel, capped by
// the IPC_THREADS environment variable. Writes the report CSV when
// output_path is set.
SweepReport run_sweep(const ExperimentSpec& spec);

struct OrderStudyRow {
  FlowScheme scheme;
  double slope;
};

std::vector<OrderStudyRow> run_order_study(const std::vector<FlowScheme>& schemes,
                                           const QuadraticProblem& problem, double T,
                                           const std::vector<double>& h_list);

MetaList experiment_meta(const ExperimentSpec& spec, const SolverConfig& cfg);
std::string format_sweep_csv(const SweepReport& report, const ExperimentSpec& spec,
                             const SolverConfig& cfg, const std::string& timestamp);
std::string format_order_csv(const std::vector<OrderStudyRow>& rows);

std::string current_timestamp();
int max_sweep_threads(std::size_t rows);

}  // namespace ipc
