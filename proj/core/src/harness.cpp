#include "ipc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <ctime>
#include <sstream>
#include <thread>

#include "ipc/errors.hpp"

namespace ipc {

std::string to_string(ProblemKind p) {
  switch (p) {
    case ProblemKind::Fractional: return "fractional";
    case ProblemKind::ArctanQuadratic: return "arctan-quadratic";
    case ProblemKind::Quadratic: return "quadratic";
  }
  return "?";
}

ProblemKind problem_kind_from_string(const std::string& s) {
  if (s == "fractional") return ProblemKind::Fractional;
  if (s == "arctan-quadratic") return ProblemKind::ArctanQuadratic;
  if (s == "quadratic") return ProblemKind::Quadratic;
  throw ValidationError("unknown problem '" + s +
                        "' (expected fractional, arctan-quadratic or quadratic)");
}

void apply_profile(ExperimentSpec& spec, const std::string& name) {
  if (name.empty()) return;
  LineSearchParams& ls = spec.config.line_search;
  if (name == "exp1") {
    spec.problem = ProblemKind::Fractional;
    spec.config.algorithm = Algorithm::IpcAdaptive;
    ls.mu = 0.3;
    ls.nu = 0.5;
    ls.tau = 1.5;
    ls.theta = 0.67;
    ls.gamma0_init = 1.0;
    ls.h_hi = 3.0;
    ls.h_lo = 1e-6;
    spec.config.epsilon = 1e-3;
  } else if (name == "exp2") {
    spec.problem = ProblemKind::ArctanQuadratic;
    spec.config.algorithm = Algorithm::ConvexIpc;
    ls.mu = 0.4;
    ls.nu = 0.9;
    ls.theta = 0.7;
    ls.tau = 1.5;
    ls.h_lo = 1e-6;
    // gamma0_init and h_hi become 2/L in resolved_config once L is known.
    spec.config.eta = 1.9;
    spec.config.epsilon = 1e-3;
  } else {
    throw ValidationError("unknown profile '" + name + "' (expected exp1 or exp2)");
  }
  spec.profile = name;
}

GradientOracle build_oracle(const ExperimentSpec& spec) {
  if (!spec.problem_file.empty()) return oracle_of(load_problem(spec.problem_file));
  switch (spec.problem) {
    case ProblemKind::Fractional: return make_fractional(spec.n, spec.seed);
    case ProblemKind::ArctanQuadratic: return make_arctan_quadratic(spec.n, spec.seed);
    case ProblemKind::Quadratic: return make_quadratic(spec.n, spec.cond, spec.seed);
  }
  throw ValidationError("unknown problem kind");
}

SolverConfig resolved_config(const ExperimentSpec& spec, const GradientOracle& oracle) {
  SolverConfig cfg = spec.config;
  if (spec.profile == "exp2") {
    if (!oracle.lipschitz)
      throw ValidationError("profile exp2 needs a Lipschitz constant to set h_hi = 2/L");
    cfg.line_search.h_hi = 2.0 / *oracle.lipschitz;
    cfg.line_search.gamma0_init = cfg.line_search.h_hi;
  }
  return cfg;
}

MetaList experiment_meta(const ExperimentSpec& spec, const SolverConfig& cfg) {
  MetaList meta;
  if (spec.problem_file.empty()) {
    meta.emplace_back("problem", to_string(spec.problem));
    meta.emplace_back("n", std::to_string(spec.n));
    meta.emplace_back("seed", std::to_string(spec.seed));
    if (spec.problem == ProblemKind::Quadratic)
      meta.emplace_back("cond", format_double(spec.cond));
  } else {
    meta.emplace_back("problem", spec.problem_file);
  }
  if (!spec.profile.empty()) meta.emplace_back("profile", spec.profile);
  meta.emplace_back("algorithm", to_string(cfg.algorithm));
  meta.emplace_back("beta", format_double(cfg.beta));
  if (cfg.algorithm == Algorithm::ConvexIpc) {
    meta.emplace_back("eta", format_double(cfg.eta));
    meta.emplace_back("trapezoid_mode", cfg.trapezoid_mode ? "1" : "0");
  }
  if (cfg.h_const > 0.0) meta.emplace_back("h", format_double(cfg.h_const));
  if (cfg.algorithm != Algorithm::IpcConstant) {
    const LineSearchParams& ls = cfg.line_search;
    meta.emplace_back("mu", format_double(ls.mu));
    meta.emplace_back("nu", format_double(ls.nu));
    meta.emplace_back("theta", format_double(ls.theta));
    meta.emplace_back("tau", format_double(ls.tau));
    meta.emplace_back("gamma0", format_double(ls.gamma0_init));
    meta.emplace_back("h_lo", format_double(ls.h_lo));
    meta.emplace_back("h_hi", format_double(ls.h_hi));
  }
  meta.emplace_back("epsilon", format_double(cfg.epsilon));
  meta.emplace_back("max_iters", std::to_string(cfg.max_iters));
  return meta;
}

RunResult run_single(const ExperimentSpec& spec) {
  const GradientOracle oracle = build_oracle(spec);
  const SolverConfig cfg = resolved_config(spec, oracle);

  RunResult result;
  result.trace = solve(oracle, cfg, oracle.default_x0);
  if (oracle.known_solution)
    result.verification = verify_trace(result.trace, oracle, cfg);

  if (!spec.output_path.empty())
    write_trace_csv(spec.output_path, result.trace, experiment_meta(spec, cfg));
  return result;
}

int max_sweep_threads(std::size_t rows) {
  long cap = 0;
  if (const char* env = std::getenv("IPC_THREADS")) {
    char* end = nullptr;
    cap = std::strtol(env, &end, 10);
    if (end == env || cap < 1)
      throw ValidationError("IPC_THREADS must be a positive integer");
  } else {
    cap = static_cast<long>(std::thread::hardware_concurrency());
    if (cap < 1) cap = 1;
  }
  return static_cast<int>(std::min<long>(cap, static_cast<long>(rows)));
}

SweepReport run_sweep(const ExperimentSpec& spec) {
  if (spec.beta_list.empty()) throw ValidationError("sweep requires a nonempty beta list");

  const GradientOracle oracle = build_oracle(spec);
  const SolverConfig base = resolved_config(spec, oracle);

  std::vector<double> betas = spec.beta_list;
  std::sort(betas.begin(), betas.end());

  // Fail fast: every beta must be admissible before any run starts.
  for (double beta : betas) {
    SolverConfig cfg = base;
    cfg.beta = beta;
    validate(cfg, oracle.lipschitz);
  }

  SweepReport report;
  report.rows.resize(betas.size());

  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= betas.size()) break;
      SweepRow& row = report.rows[i];
      row.beta = betas[i];
      SolverConfig cfg = base;
      cfg.beta = betas[i];
      try {
        const RunTrace trace = solve(oracle, cfg, oracle.default_x0);
        row.iterations = trace.iterations;
        row.grad_evals = trace.total_grad_evals;
        row.final_grad_norm = trace.records.empty() ? 0.0 : trace.records.back().grad_norm;
        row.status = trace.status;
        if (oracle.known_solution)
          row.verification = verify_trace(trace, oracle, cfg);
      } catch (const std::exception& e) {
        row.status = RunStatus::ValidationError;
        row.error = e.what();
      }
    }
  };

  const int nthreads = max_sweep_threads(betas.size());
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthreads) - 1);
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::optional<long> best;
  for (const auto& row : report.rows) {
    if (row.status != RunStatus::Converged) continue;
    if (!best || row.iterations < *best) {
      best = row.iterations;
      report.argmin_beta = row.beta;
    }
  }

  if (!spec.output_path.empty())
    atomic_write_file(spec.output_path,
                      format_sweep_csv(report, spec, base, current_timestamp()));
  return report;
}

std::vector<OrderStudyRow> run_order_study(const std::vector<FlowScheme>& schemes,
                                           const QuadraticProblem& problem, double T,
                                           const std::vector<double>& h_list) {
  std::vector<OrderStudyRow> rows;
  rows.reserve(schemes.size());
  for (FlowScheme scheme : schemes)
    rows.push_back({scheme, estimate_order(scheme, problem, T, h_list)});
  return rows;
}

namespace {

std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

std::string flag_field(const std::optional<VerificationReport>& v,
                       bool VerificationReport::* flag) {
  if (!v) return "";
  return (*v).*flag ? "1" : "0";
}

}  // namespace

std::string format_sweep_csv(const SweepReport& report, const ExperimentSpec& spec,
                             const SolverConfig& cfg, const std::string& timestamp) {
  std::ostringstream os;
  os << "# generated=" << timestamp << "\n";
  for (const auto& [key, value] : experiment_meta(spec, cfg))
    if (key != "beta") os << "# " << key << "=" << value << "\n";
  os << "beta,iterations,grad_evals,final_grad_norm,status,"
        "fejer_ok,ergodic_ok,h_floor_ok,alpha_floor_ok,error\n";
  for (const auto& row : report.rows) {
    os << format_double(row.beta) << ',' << row.iterations << ',' << row.grad_evals
       << ',' << format_double(row.final_grad_norm) << ',' << to_string(row.status)
       << ',' << flag_field(row.verification, &VerificationReport::fejer_ok) << ','
       << flag_field(row.verification, &VerificationReport::ergodic_ok) << ','
       << flag_field(row.verification, &VerificationReport::h_floor_ok) << ',';
    if (row.verification && row.verification->alpha_floor_ok)
      os << (*row.verification->alpha_floor_ok ? "1" : "0");
    os << ',' << csv_safe(row.error) << "\n";
  }
  if (report.argmin_beta) os << "# argmin_beta=" << format_double(*report.argmin_beta) << "\n";
  return os.str();
}

std::string format_order_csv(const std::vector<OrderStudyRow>& rows) {
  std::ostringstream os;
  os << "scheme,slope\n";
  for (const auto& row : rows)
    os << to_string(row.scheme) << ',' << format_double(row.slope) << "\n";
  return os.str();
}

std::string current_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace ipc
