// Command-line front end: single solver runs, beta sweeps, the
// discretization-order study, and benchmark problem generation.
//
// Exit codes: 0 success, 2 validation error, 3 solver non-convergence,
// 4 I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ipc/errors.hpp"
#include "ipc/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitIo = 4;

std::vector<double> parse_double_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0')
      throw ipc::ValidationError(std::string("bad ") + what + " entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ipc::ValidationError(std::string(what) + " list is empty");
  return out;
}

// Flat key=value files mirroring the long flag names (without the leading
// dashes). '#' starts a comment. Values given on the command line win.
std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ipc::IoError("cannot open config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    std::size_t e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ipc::ValidationError("config file " + path + ":" + std::to_string(lineno) +
                                 ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      const std::size_t b2 = s.find_first_not_of(" \t");
      const std::size_t e2 = s.find_last_not_of(" \t");
      s = (b2 == std::string::npos) ? "" : s.substr(b2, e2 - b2 + 1);
    };
    trim(key);
    trim(value);
    for (char& c : key)
      if (c == '_') c = '-';
    out[key] = value;
  }
  return out;
}

// Raw option values plus the set of keys actually given (command line or
// config file). Only given keys override profile and library defaults.
struct Args {
  std::string problem, algorithm, profile, out, config, problem_file;
  std::string betas, schemes, h_list;
  long long n = 0, seed = 0, max_iters = 0;
  long long ls_max_evals = 0;
  double cond = 0.0, beta = 0.0, eta = 0.0, h = 0.0, epsilon = 0.0;
  double mu = 0.0, nu = 0.0, theta = 0.0, tau = 0.0, gamma0 = 0.0, h_lo = 0.0, h_hi = 0.0;
  double T = 0.0;
  bool trapezoid_mode = false;

  std::set<std::string> given;
  bool has(const std::string& key) const { return given.count(key) > 0; }
};

class ArgBinder {
 public:
  ArgBinder(CLI::App* cmd, Args& args) : cmd_(cmd), args_(args) {}

  template <typename T>
  void bind(const std::string& key, T& field, const std::string& help) {
    opts_[key] = cmd_->add_option("--" + key, field, help);
  }
  void bind_flag(const std::string& key, bool& field, const std::string& help) {
    opts_[key] = cmd_->add_flag("--" + key, field, help);
  }

  // Fills `args_.given` and applies config-file values for keys the
  // command line left untouched.
  void finalize() {
    std::map<std::string, std::string> file;
    if (!args_.config.empty()) file = load_config_file(args_.config);
    for (auto& [key, opt] : opts_) {
      const auto it = file.find(key);
      if (opt->count() > 0) {
        args_.given.insert(key);
        if (it != file.end()) file.erase(it);  // command line wins
        continue;
      }
      if (it == file.end()) continue;
      try {
        opt->add_result(it->second);
        opt->run_callback();
      } catch (const CLI::Error&) {
        throw ipc::ValidationError("config file: bad value for '" + key + "': " +
                                   it->second);
      }
      args_.given.insert(key);
      file.erase(it);
    }
    if (!file.empty())
      throw ipc::ValidationError("config file: unknown key '" + file.begin()->first + "'");
  }

 private:
  CLI::App* cmd_;
  Args& args_;
  std::map<std::string, CLI::Option*> opts_;
};

void bind_problem_options(ArgBinder& b, Args& a) {
  b.bind("problem", a.problem, "fractional | arctan-quadratic | quadratic");
  b.bind("n", a.n, "problem dimension");
  b.bind("seed", a.seed, "generator seed");
  b.bind("cond", a.cond, "condition number (quadratic problem)");
}

void bind_solver_options(ArgBinder& b, Args& a) {
  b.bind("algorithm", a.algorithm, "ipc-constant | ipc-adaptive | convex-ipc");
  b.bind("beta", a.beta, "adjustment coefficient");
  b.bind("eta", a.eta, "relaxation in (0,2), convex-ipc only");
  b.bind("h", a.h, "fixed step size (ipc-constant; optional for convex-ipc)");
  b.bind("profile", a.profile, "parameter preset: exp1 | exp2");
  b.bind("epsilon", a.epsilon, "stop when the gradient norm drops below this");
  b.bind("max-iters", a.max_iters, "iteration cap");
  b.bind("mu", a.mu, "line search: expansion threshold");
  b.bind("nu", a.nu, "line search: acceptance threshold");
  b.bind("theta", a.theta, "line search: backtracking factor");
  b.bind("tau", a.tau, "line search: expansion factor");
  b.bind("gamma0", a.gamma0, "line search: first initial trial step");
  b.bind("h-lo", a.h_lo, "line search: initial-step lower clamp");
  b.bind("h-hi", a.h_hi, "line search: initial-step upper clamp");
  b.bind("ls-max-evals", a.ls_max_evals, "line search: gradient evaluation cap");
  b.bind_flag("trapezoid-mode", a.trapezoid_mode,
              "convex-ipc: use eta = 1/alpha_k when admissible");
  b.bind("problem-file", a.problem_file, "load a saved problem instead of generating");
}

ipc::ExperimentSpec build_spec(const Args& a) {
  ipc::ExperimentSpec spec;
  if (a.has("profile")) ipc::apply_profile(spec, a.profile);
  if (a.has("problem")) spec.problem = ipc::problem_kind_from_string(a.problem);
  if (a.has("n")) spec.n = static_cast<int>(a.n);
  if (a.has("seed")) spec.seed = static_cast<std::uint64_t>(a.seed);
  if (a.has("cond")) spec.cond = a.cond;
  if (a.has("problem-file")) spec.problem_file = a.problem_file;
  if (a.has("algorithm")) spec.config.algorithm = ipc::algorithm_from_string(a.algorithm);
  if (a.has("beta")) spec.config.beta = a.beta;
  if (a.has("eta")) spec.config.eta = a.eta;
  if (a.has("h")) spec.config.h_const = a.h;
  if (a.has("epsilon")) spec.config.epsilon = a.epsilon;
  if (a.has("max-iters")) spec.config.max_iters = a.max_iters;
  if (a.has("mu")) spec.config.line_search.mu = a.mu;
  if (a.has("nu")) spec.config.line_search.nu = a.nu;
  if (a.has("theta")) spec.config.line_search.theta = a.theta;
  if (a.has("tau")) spec.config.line_search.tau = a.tau;
  if (a.has("gamma0")) spec.config.line_search.gamma0_init = a.gamma0;
  if (a.has("h-lo")) spec.config.line_search.h_lo = a.h_lo;
  if (a.has("h-hi")) spec.config.line_search.h_hi = a.h_hi;
  if (a.has("ls-max-evals"))
    spec.config.line_search.max_evals = static_cast<int>(a.ls_max_evals);
  if (a.has("trapezoid-mode")) spec.config.trapezoid_mode = a.trapezoid_mode;
  if (a.has("out")) spec.output_path = a.out;
  if (a.has("betas")) spec.beta_list = parse_double_list(a.betas, "betas");
  return spec;
}

void print_verification(const ipc::VerificationReport& v) {
  std::printf("verification: fejer=%d ergodic=%d h_floor=%d", v.fejer_ok ? 1 : 0,
              v.ergodic_ok ? 1 : 0, v.h_floor_ok ? 1 : 0);
  if (v.alpha_floor_ok) std::printf(" alpha_floor=%d", *v.alpha_floor_ok ? 1 : 0);
  std::printf("\n");
  if (!v.detail.empty()) std::printf("verification detail: %s\n", v.detail.c_str());
}

int cmd_solve(const Args& args) {
  const ipc::ExperimentSpec spec = build_spec(args);
  const ipc::RunResult result = ipc::run_single(spec);
  const ipc::RunTrace& tr = result.trace;
  std::printf("status: %s\n", ipc::to_string(tr.status).c_str());
  std::printf("iterations: %ld\n", tr.iterations);
  std::printf("grad_evals: %ld\n", tr.total_grad_evals);
  if (!tr.records.empty())
    std::printf("final_grad_norm: %s\n",
                ipc::format_double(tr.records.back().grad_norm).c_str());
  if (tr.eta_fallbacks > 0) std::printf("eta_fallbacks: %d\n", tr.eta_fallbacks);
  if (!tr.message.empty()) std::printf("note: %s\n", tr.message.c_str());
  if (result.verification) print_verification(*result.verification);
  if (!spec.output_path.empty()) std::printf("trace: %s\n", spec.output_path.c_str());
  return tr.status == ipc::RunStatus::Converged ? kExitOk : kExitNoConvergence;
}

int cmd_sweep(const Args& args) {
  const ipc::ExperimentSpec spec = build_spec(args);
  if (spec.beta_list.empty())
    throw ipc::ValidationError("sweep requires --betas");
  const ipc::SweepReport report = ipc::run_sweep(spec);
  if (!spec.output_path.empty())
    std::printf("sweep report: %s\n", spec.output_path.c_str());

  std::printf("%-8s %-12s %-12s %-14s %s\n", "beta", "iterations", "grad_evals",
              "final_grad", "status");
  for (const auto& row : report.rows)
    std::printf("%-8.4g %-12ld %-12ld %-14.6g %s%s%s\n", row.beta, row.iterations,
                row.grad_evals, row.final_grad_norm,
                ipc::to_string(row.status).c_str(), row.error.empty() ? "" : "  ",
                row.error.c_str());
  if (report.argmin_beta) std::printf("argmin beta: %g\n", *report.argmin_beta);

  bool all_ok = true;
  for (const auto& row : report.rows)
    if (row.status != ipc::RunStatus::Converged) all_ok = false;
  return all_ok ? kExitOk : kExitNoConvergence;
}

int cmd_ode_order(const Args& args) {
  std::vector<ipc::FlowScheme> schemes;
  if (args.has("schemes"))
    for (const auto& name : [&] {
           std::vector<std::string> names;
           std::stringstream ss(args.schemes);
           std::string item;
           while (std::getline(ss, item, ',')) names.push_back(item);
           return names;
         }())
      schemes.push_back(ipc::flow_scheme_from_string(name));
  else
    schemes = ipc::all_flow_schemes();

  const int n = args.has("n") ? static_cast<int>(args.n) : 1;
  const double cond = args.has("cond") ? args.cond : 1.0;
  const std::uint64_t seed = args.has("seed") ? static_cast<std::uint64_t>(args.seed) : 1;
  const double T = args.has("T") ? args.T : 1.0;
  const std::vector<double> h_list =
      args.has("h-list") ? parse_double_list(args.h_list, "h-list")
                         : std::vector<double>{0.1, 0.05, 0.025, 0.0125};

  const auto problem = ipc::QuadraticProblem::generate(n, cond, seed);
  const auto rows = ipc::run_order_study(schemes, problem, T, h_list);
  for (const auto& row : rows)
    std::printf("%-22s slope %.4f\n", ipc::to_string(row.scheme).c_str(), row.slope);
  if (args.has("out")) {
    ipc::atomic_write_file(args.out, ipc::format_order_csv(rows));
    std::printf("order study: %s\n", args.out.c_str());
  }
  return kExitOk;
}

int cmd_gen_problem(const Args& args) {
  if (!args.has("out")) throw ipc::ValidationError("gen-problem requires --out");
  const ipc::ExperimentSpec spec = build_spec(args);
  ipc::AnyProblem problem = [&]() -> ipc::AnyProblem {
    switch (spec.problem) {
      case ipc::ProblemKind::Fractional:
        return ipc::FractionalProblem::generate(spec.n, spec.seed);
      case ipc::ProblemKind::ArctanQuadratic:
        return ipc::ArctanQuadraticProblem::generate(spec.n, spec.seed);
      case ipc::ProblemKind::Quadratic:
        return ipc::QuadraticProblem::generate(spec.n, spec.cond, spec.seed);
    }
    throw ipc::ValidationError("unknown problem kind");
  }();
  ipc::save_problem(args.out, problem);
  std::printf("problem file: %s (%s, n=%d, seed=%llu)\n", args.out.c_str(),
              ipc::to_string(spec.problem).c_str(), spec.n,
              static_cast<unsigned long long>(spec.seed));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prediction-correction first-order optimization benchmark"};
  app.require_subcommand(1);
  // --h is a real option (step size); help stays on --help only.
  app.set_help_flag("--help", "print help");

  Args solve_args, sweep_args, ode_args, gen_args;

  CLI::App* solve = app.add_subcommand("solve", "run one solver configuration");
  solve->set_help_flag("--help", "print help");
  ArgBinder solve_bind(solve, solve_args);
  bind_problem_options(solve_bind, solve_args);
  bind_solver_options(solve_bind, solve_args);
  solve_bind.bind("out", solve_args.out, "trace CSV path");
  solve_bind.bind("config", solve_args.config, "key=value config file");

  CLI::App* sweep = app.add_subcommand("sweep", "run one configuration per beta");
  sweep->set_help_flag("--help", "print help");
  ArgBinder sweep_bind(sweep, sweep_args);
  bind_problem_options(sweep_bind, sweep_args);
  bind_solver_options(sweep_bind, sweep_args);
  sweep_bind.bind("betas", sweep_args.betas, "comma-separated beta values");
  sweep_bind.bind("out", sweep_args.out, "sweep CSV path");
  sweep_bind.bind("config", sweep_args.config, "key=value config file");

  CLI::App* ode = app.add_subcommand("ode-order", "empirical discretization orders");
  ode->set_help_flag("--help", "print help");
  ArgBinder ode_bind(ode, ode_args);
  ode_bind.bind("schemes", ode_args.schemes, "comma-separated scheme names (default all)");
  ode_bind.bind("T", ode_args.T, "integration horizon");
  ode_bind.bind("h-list", ode_args.h_list, "comma-separated step sizes, decreasing");
  ode_bind.bind("n", ode_args.n, "quadratic dimension");
  ode_bind.bind("cond", ode_args.cond, "quadratic condition number");
  ode_bind.bind("seed", ode_args.seed, "generator seed");
  ode_bind.bind("out", ode_args.out, "slopes CSV path");
  ode_bind.bind("config", ode_args.config, "key=value config file");

  CLI::App* gen = app.add_subcommand("gen-problem", "write a problem file");
  gen->set_help_flag("--help", "print help");
  ArgBinder gen_bind(gen, gen_args);
  bind_problem_options(gen_bind, gen_args);
  gen_bind.bind("out", gen_args.out, "problem file path");
  gen_bind.bind("config", gen_args.config, "key=value config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (solve->parsed()) {
      solve_bind.finalize();
      return cmd_solve(solve_args);
    }
    if (sweep->parsed()) {
      sweep_bind.finalize();
      return cmd_sweep(sweep_args);
    }
    if (ode->parsed()) {
      ode_bind.finalize();
      return cmd_ode_order(ode_args);
    }
    if (gen->parsed()) {
      gen_bind.finalize();
      return cmd_gen_problem(gen_args);
    }
  } catch (const ipc::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const ipc::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const ipc::DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitValidation;
}
