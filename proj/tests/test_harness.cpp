#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "ipc/errors.hpp"
#include "ipc/harness.hpp"

using namespace ipc;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(IPCOPT_CLI_PATH) + " " + args + " > cli_out.txt 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string strip_timestamp(const std::string& csv) {
  std::string out;
  std::istringstream is(csv);
  std::string line;
  while (std::getline(is, line))
    if (line.rfind("# generated=", 0) != 0) out += line + "\n";
  return out;
}

ExperimentSpec quick_quadratic_spec() {
  ExperimentSpec spec;
  spec.problem = ProblemKind::Quadratic;
  spec.n = 12;
  spec.cond = 10.0;
  spec.seed = 5;
  spec.config.algorithm = Algorithm::IpcAdaptive;
  spec.config.beta = 0.9;
  spec.config.epsilon = 1e-6;
  return spec;
}

}  // namespace

TEST_CASE("trace CSV round-trips every scalar bit-exactly") {
  ExperimentSpec spec = quick_quadratic_spec();
  spec.output_path = "trace_roundtrip.csv";
  const RunResult res = run_single(spec);
  REQUIRE(res.trace.status == RunStatus::Converged);

  const ParsedTrace parsed = read_trace_csv(spec.output_path);
  REQUIRE(parsed.records.size() == res.trace.records.size());
  for (std::size_t i = 0; i < parsed.records.size(); ++i) {
    const auto& a = res.trace.records[i];
    const auto& b = parsed.records[i];
    CHECK(a.k == b.k);
    CHECK(a.f == b.f);
    CHECK(a.grad_norm == b.grad_norm);
    CHECK(a.h_k == b.h_k);
    CHECK(a.alpha_k == b.alpha_k);
    CHECK(a.r_k == b.r_k);
    CHECK(a.ls_evals == b.ls_evals);
    CHECK(a.dist_sq == b.dist_sq);
  }
  CHECK(parsed.meta.at("status") == "converged");
  CHECK(parsed.meta.at("problem") == "quadratic");
  CHECK(parsed.meta.at("n") == "12");
  CHECK(parsed.meta.at("seed") == "5");
  std::remove(spec.output_path.c_str());
}

TEST_CASE("a second parse of a rewritten trace is byte-identical") {
  ExperimentSpec spec = quick_quadratic_spec();
  const RunResult res = run_single(spec);
  const MetaList meta = experiment_meta(spec, spec.config);
  const std::string once = format_trace_csv(res.trace, meta);
  // Re-serialize from the parsed records: formatting must be stable.
  RunTrace reparsed = res.trace;
  reparsed.records = parse_trace_csv(once).records;
  CHECK(format_trace_csv(reparsed, meta) == once);
}

TEST_CASE("run_single verifies when the solution is known") {
  const RunResult res = run_single(quick_quadratic_spec());
  REQUIRE(res.verification.has_value());
  CHECK(res.verification->fejer_ok);
  CHECK(res.verification->ergodic_ok);
  CHECK(res.verification->h_floor_ok);
}

TEST_CASE("profiles set the documented parameters") {
  ExperimentSpec spec;
  apply_profile(spec, "exp1");
  CHECK(spec.problem == ProblemKind::Fractional);
  CHECK(spec.config.algorithm == Algorithm::IpcAdaptive);
  CHECK(spec.config.line_search.mu == 0.3);
  CHECK(spec.config.line_search.nu == 0.5);
  CHECK(spec.config.line_search.tau == 1.5);
  CHECK(spec.config.line_search.theta == 0.67);
  CHECK(spec.config.line_search.gamma0_init == 1.0);
  CHECK(spec.config.line_search.h_hi == 3.0);
  CHECK(spec.config.line_search.h_lo == 1e-6);
  CHECK(spec.config.epsilon == 1e-3);

  ExperimentSpec spec2;
  apply_profile(spec2, "exp2");
  CHECK(spec2.problem == ProblemKind::ArctanQuadratic);
  CHECK(spec2.config.algorithm == Algorithm::ConvexIpc);
  CHECK(spec2.config.line_search.mu == 0.4);
  CHECK(spec2.config.line_search.nu == 0.9);
  CHECK(spec2.config.line_search.theta == 0.7);
  CHECK(spec2.config.eta == 1.9);

  // exp2's step clamps resolve to 2/L against the generated instance.
  spec2.n = 8;
  spec2.seed = 3;
  const GradientOracle oracle = build_oracle(spec2);
  const SolverConfig cfg = resolved_config(spec2, oracle);
  CHECK(cfg.line_search.h_hi == 2.0 / *oracle.lipschitz);
  CHECK(cfg.line_search.gamma0_init == cfg.line_search.h_hi);

  ExperimentSpec bad;
  CHECK_THROWS_AS(apply_profile(bad, "exp3"), ValidationError);
}

TEST_CASE("sweep: single-element list matches run_single") {
  ExperimentSpec spec = quick_quadratic_spec();
  spec.beta_list = {0.9};
  const SweepReport report = run_sweep(spec);
  REQUIRE(report.rows.size() == 1);
  const RunResult single = run_single(spec);
  CHECK(report.rows[0].iterations == single.trace.iterations);
  CHECK(report.rows[0].grad_evals == single.trace.total_grad_evals);
  CHECK(report.rows[0].final_grad_norm == single.trace.records.back().grad_norm);
  CHECK(report.argmin_beta == 0.9);
}

TEST_CASE("sweep fails fast on any invalid beta") {
  ExperimentSpec spec = quick_quadratic_spec();
  spec.beta_list = {0.9, 0.2};  // 0.2 is below the adaptive bound
  CHECK_THROWS_AS((void)run_sweep(spec), ValidationError);
}

TEST_CASE("sweep reports are deterministic apart from the timestamp") {
  ExperimentSpec spec = quick_quadratic_spec();
  spec.beta_list = {0.7, 0.8, 0.9, 1.0};

  setenv("IPC_THREADS", "3", 1);
  const SweepReport r1 = run_sweep(spec);
  setenv("IPC_THREADS", "1", 1);
  const SweepReport r2 = run_sweep(spec);
  unsetenv("IPC_THREADS");

  const GradientOracle oracle = build_oracle(spec);
  const SolverConfig cfg = resolved_config(spec, oracle);
  const std::string csv1 = format_sweep_csv(r1, spec, cfg, "T1");
  const std::string csv2 = format_sweep_csv(r2, spec, cfg, "T2");
  CHECK(csv1 != csv2);  // timestamps differ
  CHECK(strip_timestamp(csv1) == strip_timestamp(csv2));

  // Rows are sorted by beta and each converged row beats epsilon.
  for (std::size_t i = 0; i + 1 < r1.rows.size(); ++i)
    CHECK(r1.rows[i].beta < r1.rows[i + 1].beta);
  for (const auto& row : r1.rows) {
    CHECK(row.status == RunStatus::Converged);
    CHECK(row.final_grad_norm < spec.config.epsilon);
    REQUIRE(row.verification.has_value());
    CHECK(row.verification->fejer_ok);
  }
}

TEST_CASE("IPC_THREADS validation") {
  setenv("IPC_THREADS", "abc", 1);
  CHECK_THROWS_AS((void)max_sweep_threads(4), ValidationError);
  setenv("IPC_THREADS", "2", 1);
  CHECK(max_sweep_threads(8) == 2);
  CHECK(max_sweep_threads(1) == 1);
  unsetenv("IPC_THREADS");
}

TEST_CASE("order study rows serialize as scheme,slope") {
  const auto problem = QuadraticProblem::generate(1, 1.0, 1);
  const auto rows =
      run_order_study({FlowScheme::ExplicitEuler}, problem, 1.0, {0.1, 0.05, 0.025});
  const std::string csv = format_order_csv(rows);
  CHECK(csv.rfind("scheme,slope\nexplicit-euler,", 0) == 0);
}

TEST_CASE("atomic writes leave no temporary behind") {
  atomic_write_file("atomic_test.txt", "payload");
  CHECK(read_file("atomic_test.txt") == "payload");
  std::remove("atomic_test.txt");
}

// ---------------------------------------------------------------------------
// CLI process-level checks (exit codes per interface contract)

TEST_CASE("cli: solve exits 0 and writes the trace") {
  const int code = run_cli(
      "solve --problem quadratic --n 10 --cond 10 --seed 3 "
      "--algorithm ipc-constant --h 0.09 --beta 0.9 --epsilon 1e-6 --out cli_trace.csv");
  CHECK(code == 0);
  const ParsedTrace parsed = read_trace_csv("cli_trace.csv");
  CHECK(parsed.meta.at("status") == "converged");
  CHECK(parsed.meta.at("algorithm") == "ipc-constant");
  std::remove("cli_trace.csv");
}

TEST_CASE("cli: invalid beta exits 2 and names the range") {
  const int code = run_cli(
      "solve --problem fractional --n 10 --seed 1 --algorithm ipc-adaptive --beta 0.2");
  CHECK(code == 2);
  const std::string out = read_file("cli_out.txt");
  CHECK(out.find("0.535898") != std::string::npos);
  CHECK(out.find("beta") != std::string::npos);
}

TEST_CASE("cli: non-convergence exits 3") {
  const int code = run_cli(
      "solve --problem quadratic --n 10 --cond 100 --seed 3 --algorithm ipc-adaptive "
      "--beta 0.9 --epsilon 1e-12 --max-iters 3");
  CHECK(code == 3);
}

TEST_CASE("cli: unwritable output exits 4") {
  const int code = run_cli(
      "solve --problem quadratic --n 6 --cond 10 --seed 3 --algorithm ipc-adaptive "
      "--beta 0.9 --out /nonexistent_dir_zzz/trace.csv");
  CHECK(code == 4);
}

TEST_CASE("cli: gen-problem then solve from the file") {
  CHECK(run_cli("gen-problem --problem quadratic --n 8 --cond 10 --seed 4 "
                "--out cli_problem.ipcprob") == 0);
  const int code = run_cli(
      "solve --problem-file cli_problem.ipcprob --algorithm ipc-adaptive --beta 0.9 "
      "--epsilon 1e-6 --out cli_trace2.csv");
  CHECK(code == 0);
  const ParsedTrace parsed = read_trace_csv("cli_trace2.csv");
  CHECK(parsed.meta.at("problem") == "cli_problem.ipcprob");
  std::remove("cli_problem.ipcprob");
  std::remove("cli_trace2.csv");
}

TEST_CASE("cli: config file supplies flags, command line overrides") {
  {
    std::ofstream cfg("cli_config.cfg");
    cfg << "# sample config\n"
        << "problem=quadratic\n"
        << "n=10\n"
        << "cond=10\n"
        << "seed=3\n"
        << "algorithm=ipc-adaptive\n"
        << "beta=0.9\n"
        << "epsilon=1e-5\n";
  }
  CHECK(run_cli("solve --config cli_config.cfg --out cli_trace3.csv") == 0);
  ParsedTrace parsed = read_trace_csv("cli_trace3.csv");
  CHECK(parsed.meta.at("beta") == "0.90000000000000002");

  // Command line wins over the file.
  CHECK(run_cli("solve --config cli_config.cfg --beta 1.0 --out cli_trace3.csv") == 0);
  parsed = read_trace_csv("cli_trace3.csv");
  CHECK(parsed.meta.at("beta") == "1");

  // Unknown keys are rejected.
  {
    std::ofstream cfg("cli_config.cfg");
    cfg << "betta=0.9\n";
  }
  CHECK(run_cli("solve --config cli_config.cfg") == 2);
  std::remove("cli_config.cfg");
  std::remove("cli_trace3.csv");
  std::remove("cli_out.txt");
}

TEST_CASE("cli: sweep writes the report with argmin") {
  const int code = run_cli(
      "sweep --problem quadratic --n 10 --cond 10 --seed 3 --algorithm ipc-adaptive "
      "--betas 0.7,0.9,1.0 --epsilon 1e-6 --out cli_sweep.csv");
  CHECK(code == 0);
  const std::string csv = read_file("cli_sweep.csv");
  CHECK(csv.find("beta,iterations,grad_evals") != std::string::npos);
  CHECK(csv.find("# argmin_beta=") != std::string::npos);
  std::remove("cli_sweep.csv");
}

TEST_CASE("cli: ode-order runs the default study") {
  CHECK(run_cli("ode-order --out cli_slopes.csv") == 0);
  const std::string csv = read_file("cli_slopes.csv");
  CHECK(csv.find("explicit-trapezoidal,") != std::string::npos);
  std::remove("cli_slopes.csv");
  std::remove("cli_out.txt");
}
