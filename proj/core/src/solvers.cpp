#include "ipc/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "ipc/errors.hpp"

namespace ipc {

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::MaxIters: return "max-iters";
    case RunStatus::LineSearchStall: return "line-search-stall";
    case RunStatus::ValidationError: return "validation-error";
  }
  return "?";
}

RunStatus run_status_from_string(const std::string& s) {
  if (s == "converged") return RunStatus::Converged;
  if (s == "max-iters") return RunStatus::MaxIters;
  if (s == "line-search-stall") return RunStatus::LineSearchStall;
  if (s == "validation-error") return RunStatus::ValidationError;
  throw ValidationError("unknown run status '" + s + "'");
}

LineSearchOutcome line_search(const Eigen::VectorXd& x, const Eigen::VectorXd& grad_x,
                              double gamma0, const LineSearchParams& params,
                              const GradientOracle& oracle) {
  double gamma = gamma0;
  for (int evals = 1; evals <= params.max_evals; ++evals) {
    Eigen::VectorXd z = x - gamma * grad_x;
    Eigen::VectorXd grad_z = oracle.eval_grad(z);
    const double dist = (z - x).norm();
    if (dist == 0.0)
      throw InternalError("line search: trial point collapsed onto x (stop test missed?)");
    const double r = gamma * (grad_z - grad_x).norm() / dist;
    if (r <= params.nu) {
      LineSearchOutcome out;
      out.h_k = gamma;
      out.z = std::move(z);
      out.grad_z = std::move(grad_z);
      out.r_k = r;
      out.evals = evals;
      return out;
    }
    // A trial outside the oracle's domain can make r non-finite; back off
    // by a plain theta factor, the ratio carries no information there.
    gamma *= std::isfinite(r) ? params.theta * std::min(1.0, 1.0 / r) : params.theta;
  }
  std::ostringstream os;
  os << "line search did not accept within " << params.max_evals
     << " gradient evaluations; the oracle is likely not Lipschitz";
  throw LineSearchStallError(os.str());
}

double adaptive_initial_step(double h_k, double r_k, const LineSearchParams& params) {
  const double candidate = (r_k <= params.mu) ? params.tau * h_k : h_k;
  return std::clamp(candidate, params.h_lo, params.h_hi);
}

namespace {

IterationRecord begin_record(long k, double fx, double grad_norm,
                             const Eigen::VectorXd& x, const GradientOracle& oracle) {
  IterationRecord rec;
  rec.k = k;
  rec.f = fx;
  rec.grad_norm = grad_norm;
  if (oracle.known_solution)
    rec.dist_sq = (x - *oracle.known_solution).squaredNorm();
  return rec;
}

void check_dimensions(const GradientOracle& oracle, const Eigen::VectorXd& x0) {
  if (x0.size() != oracle.dim) {
    std::ostringstream os;
    os << "x0 has dimension " << x0.size() << ", oracle expects " << oracle.dim;
    throw ValidationError(os.str());
  }
}

// Accepted iterates must stay inside the oracle's domain; trial points are
// exempt (the ratio test rejects them).
void check_domain(const GradientOracle& oracle, const Eigen::VectorXd& x, long k) {
  if (oracle.domain_ok && !oracle.domain_ok(x)) {
    std::ostringstream os;
    os << "iterate k=" << k << " left the oracle's domain";
    throw DomainError(os.str());
  }
}

double realized_ratio(double h, const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                      const Eigen::VectorXd& grad_x, const Eigen::VectorXd& grad_z) {
  const double dist = (z - x).norm();
  return dist > 0.0 ? h * (grad_z - grad_x).norm() / dist : 0.0;
}

}  // namespace

RunTrace solve_ipc_constant(const GradientOracle& oracle, const SolverConfig& cfg,
                            const Eigen::VectorXd& x0, const IterateObserver& observer) {
  if (cfg.algorithm != Algorithm::IpcConstant)
    throw ValidationError("solve_ipc_constant called with a different algorithm configured");
  validate(cfg, oracle.lipschitz);
  check_dimensions(oracle, x0);

  RunTrace tr;
  const double h = cfg.h_const;
  Eigen::VectorXd x = x0;
  for (long k = 0;; ++k) {
    check_domain(oracle, x, k);
    const Eigen::VectorXd grad_x = oracle.eval_grad(x);
    ++tr.total_grad_evals;
    IterationRecord rec = begin_record(k, oracle.eval_f(x), grad_x.norm(), x, oracle);
    if (rec.grad_norm < cfg.epsilon) {
      tr.records.push_back(rec);
      tr.status = RunStatus::Converged;
      tr.iterations = k;
      break;
    }
    if (k >= cfg.max_iters) {
      tr.records.push_back(rec);
      tr.status = RunStatus::MaxIters;
      tr.iterations = k;
      tr.message = "max_iters reached before the gradient norm dropped below epsilon";
      break;
    }

    const Eigen::VectorXd z = x - h * grad_x;
    const Eigen::VectorXd grad_z = oracle.eval_grad(z);
    ++tr.total_grad_evals;
    rec.h_k = h;
    rec.r_k = realized_ratio(h, x, z, grad_x, grad_z);
    tr.records.push_back(rec);

    x = ipc_step(x, grad_x, grad_z, h, cfg.beta, 1.0);
    if (observer) observer(k + 1, x);
  }
  tr.final_x = std::move(x);
  return tr;
}

RunTrace solve_ipc_adaptive(const GradientOracle& oracle, const SolverConfig& cfg,
                            const Eigen::VectorXd& x0, const IterateObserver& observer) {
  if (cfg.algorithm != Algorithm::IpcAdaptive)
    throw ValidationError("solve_ipc_adaptive called with a different algorithm configured");
  validate(cfg, oracle.lipschitz);
  check_dimensions(oracle, x0);

  RunTrace tr;
  const LineSearchParams& ls = cfg.line_search;
  double gamma0 = ls.gamma0_init;
  Eigen::VectorXd x = x0;
  for (long k = 0;; ++k) {
    check_domain(oracle, x, k);
    const Eigen::VectorXd grad_x = oracle.eval_grad(x);
    ++tr.total_grad_evals;
    IterationRecord rec = begin_record(k, oracle.eval_f(x), grad_x.norm(), x, oracle);
    if (rec.grad_norm < cfg.epsilon) {
      tr.records.push_back(rec);
      tr.status = RunStatus::Converged;
      tr.iterations = k;
      break;
    }
    if (k >= cfg.max_iters) {
      tr.records.push_back(rec);
      tr.status = RunStatus::MaxIters;
      tr.iterations = k;
      tr.message = "max_iters reached before the gradient norm dropped below epsilon";
      break;
    }

    LineSearchOutcome found;
    try {
      found = line_search(x, grad_x, gamma0, ls, oracle);
    } catch (const LineSearchStallError& err) {
      rec.ls_evals = ls.max_evals;  // burned without an accepted step
      tr.total_grad_evals += ls.max_evals;
      tr.records.push_back(rec);
      tr.status = RunStatus::LineSearchStall;
      tr.iterations = k;
      tr.message = err.what();
      break;
    }
    tr.total_grad_evals += found.evals;
    rec.h_k = found.h_k;
    rec.r_k = found.r_k;
    rec.ls_evals = found.evals - 1;
    tr.records.push_back(rec);

    x = ipc_step(x, grad_x, found.grad_z, found.h_k, cfg.beta, 1.0);
    if (observer) observer(k + 1, x);
    gamma0 = adaptive_initial_step(found.h_k, found.r_k, ls);
  }
  tr.final_x = std::move(x);
  return tr;
}

RunTrace solve_convex_ipc(const GradientOracle& oracle, const SolverConfig& cfg,
                          const Eigen::VectorXd& x0, const IterateObserver& observer) {
  if (cfg.algorithm != Algorithm::ConvexIpc)
    throw ValidationError("solve_convex_ipc called with a different algorithm configured");
  validate(cfg, oracle.lipschitz);
  check_dimensions(oracle, x0);
  if (oracle.convexity_class != ConvexityClass::Convex)
    std::cerr << "warning: convex-ipc applied to an oracle not declared convex ("
              << (oracle.name.empty() ? "unnamed" : oracle.name)
              << "); guarantees may not hold\n";

  RunTrace tr;
  const LineSearchParams& ls = cfg.line_search;
  const double L = *oracle.lipschitz;
  const bool fixed_step = cfg.h_const > 0.0;
  double gamma0 = ls.gamma0_init;
  Eigen::VectorXd x = x0;
  for (long k = 0;; ++k) {
    check_domain(oracle, x, k);
    const Eigen::VectorXd grad_x = oracle.eval_grad(x);
    ++tr.total_grad_evals;
    IterationRecord rec = begin_record(k, oracle.eval_f(x), grad_x.norm(), x, oracle);
    if (rec.grad_norm < cfg.epsilon) {
      tr.records.push_back(rec);
      tr.status = RunStatus::Converged;
      tr.iterations = k;
      break;
    }
    if (k >= cfg.max_iters) {
      tr.records.push_back(rec);
      tr.status = RunStatus::MaxIters;
      tr.iterations = k;
      tr.message = "max_iters reached before the gradient norm dropped below epsilon";
      break;
    }

    double h;
    Eigen::VectorXd z, grad_z;
    if (fixed_step) {
      h = cfg.h_const;
      z = x - h * grad_x;
      grad_z = oracle.eval_grad(z);
      ++tr.total_grad_evals;
      rec.r_k = realized_ratio(h, x, z, grad_x, grad_z);
      rec.ls_evals = 0;
    } else {
      LineSearchOutcome found;
      try {
        found = line_search(x, grad_x, gamma0, ls, oracle);
      } catch (const LineSearchStallError& err) {
        rec.ls_evals = ls.max_evals;
        tr.total_grad_evals += ls.max_evals;
        tr.records.push_back(rec);
        tr.status = RunStatus::LineSearchStall;
        tr.iterations = k;
        tr.message = err.what();
        break;
      }
      tr.total_grad_evals += found.evals;
      h = found.h_k;
      z = std::move(found.z);
      grad_z = std::move(found.grad_z);
      rec.r_k = found.r_k;
      rec.ls_evals = found.evals - 1;
    }

    const double alpha = alpha_k(x, z, grad_x, grad_z, h, cfg.beta, L);
    if (!(alpha > 0.0)) {
      std::ostringstream os;
      os << "alpha_k = " << alpha << " at iteration " << k
         << "; a convex Lipschitz oracle cannot produce this";
      throw InternalError(os.str());
    }

    double eta_eff = cfg.eta;
    if (cfg.trapezoid_mode) {
      const double inv = 1.0 / alpha;
      if (inv < 2.0) {
        eta_eff = inv;  // makes eta*alpha = 1, the unscaled correction
      } else {
        rec.eta_fallback = true;
        ++tr.eta_fallbacks;
      }
    }

    rec.h_k = h;
    rec.alpha_k = alpha;
    tr.records.push_back(rec);

    x = ipc_step(x, grad_x, grad_z, h, cfg.beta, eta_eff * alpha);
    if (observer) observer(k + 1, x);
    if (!fixed_step) gamma0 = adaptive_initial_step(h, *rec.r_k, ls);
  }
  tr.final_x = std::move(x);
  return tr;
}

RunTrace solve(const GradientOracle& oracle, const SolverConfig& cfg,
               const Eigen::VectorXd& x0, const IterateObserver& observer) {
  switch (cfg.algorithm) {
    case Algorithm::IpcConstant: return solve_ipc_constant(oracle, cfg, x0, observer);
    case Algorithm::IpcAdaptive: return solve_ipc_adaptive(oracle, cfg, x0, observer);
    case Algorithm::ConvexIpc: return solve_convex_ipc(oracle, cfg, x0, observer);
  }
  throw ValidationError("solve: unknown algorithm");
}

namespace {

std::string violation(const char* flag, long k, const std::string& why) {
  std::ostringstream os;
  os << flag << " violated at k=" << k << ": " << why;
  return os.str();
}

}  // namespace

VerificationReport verify_trace(const RunTrace& trace, const GradientOracle& oracle,
                                const SolverConfig& cfg) {
  if (!oracle.known_solution)
    throw MissingSolutionError("verify_trace requires an oracle with a known solution");
  for (const auto& rec : trace.records)
    if (!rec.dist_sq)
      throw MissingSolutionError("trace records carry no distance to x*");

  const ContractionConstants cc = contraction_constants(cfg, oracle);
  VerificationReport rep;
  rep.fejer_ok = rep.ergodic_ok = rep.h_floor_ok = true;
  if (cfg.algorithm == Algorithm::ConvexIpc) rep.alpha_floor_ok = true;
  if (trace.records.empty()) return rep;

  const double dist0 = *trace.records.front().dist_sq;
  const double slack = 1e-10 * dist0;

  // Per-step contraction coefficient. For ConvexIpc the relaxation actually
  // applied can vary in trapezoid mode, so it is reconstructed per record.
  auto kappa_at = [&](const IterationRecord& rec) {
    if (cfg.algorithm != Algorithm::ConvexIpc) return cc.active_kappa(cfg.algorithm);
    double eta = cfg.eta;
    if (cfg.trapezoid_mode && !rec.eta_fallback && rec.alpha_k) {
      const double inv = 1.0 / *rec.alpha_k;
      if (inv < 2.0) eta = inv;
    }
    return eta * (2.0 - eta) * cc.alpha_min * cc.kappa3;
  };

  double kappa_min = cc.active_kappa(cfg.algorithm);
  for (std::size_t i = 0; i + 1 < trace.records.size(); ++i) {
    const IterationRecord& rec = trace.records[i];
    if (!rec.h_k) continue;  // no step taken
    const double step_sq = (*rec.h_k * rec.grad_norm) * (*rec.h_k * rec.grad_norm);
    const double kappa = kappa_at(rec);
    kappa_min = std::min(kappa_min, kappa);
    const double bound = *rec.dist_sq - kappa * step_sq;
    const double next = *trace.records[i + 1].dist_sq;
    if (next > bound + slack && rep.fejer_ok) {
      rep.fejer_ok = false;
      std::ostringstream os;
      os << "dist_sq " << next << " > " << bound << " (kappa=" << kappa << ")";
      rep.detail = violation("fejer", rec.k, os.str());
    }
  }

  const double h_for_rate =
      (cfg.algorithm == Algorithm::IpcConstant) ? cfg.h_const : cc.h_min;
  double grad_sq_sum = 0.0;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    grad_sq_sum += trace.records[i].grad_norm * trace.records[i].grad_norm;
    const double K = static_cast<double>(i + 1);
    const double bound = dist0 / (K * kappa_min * h_for_rate * h_for_rate);
    if (grad_sq_sum / K > bound * (1.0 + 1e-10) && rep.ergodic_ok) {
      rep.ergodic_ok = false;
      std::ostringstream os;
      os << "running mean " << grad_sq_sum / K << " > " << bound;
      if (rep.detail.empty()) rep.detail = violation("ergodic", trace.records[i].k, os.str());
    }
  }

  for (const auto& rec : trace.records) {
    if (rec.h_k && *rec.h_k < cc.h_min && rep.h_floor_ok) {
      rep.h_floor_ok = false;
      std::ostringstream os;
      os << "h_k " << *rec.h_k << " < h_min " << cc.h_min;
      if (rep.detail.empty()) rep.detail = violation("h_floor", rec.k, os.str());
    }
    if (cfg.algorithm == Algorithm::ConvexIpc && rec.alpha_k &&
        *rec.alpha_k < cc.alpha_min * (1.0 - 1e-12) && *rep.alpha_floor_ok) {
      rep.alpha_floor_ok = false;
      std::ostringstream os;
      os << "alpha_k " << *rec.alpha_k << " < alpha_min " << cc.alpha_min;
      if (rep.detail.empty()) rep.detail = violation("alpha_floor", rec.k, os.str());
    }
  }

  return rep;
}

}  // namespace ipc
