#include "ipc/config.hpp"

#include <cmath>
#include <sstream>

#include "ipc/errors.hpp"
#include "ipc/numerics.hpp"

namespace ipc {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::IpcConstant: return "ipc-constant";
    case Algorithm::IpcAdaptive: return "ipc-adaptive";
    case Algorithm::ConvexIpc: return "convex-ipc";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "ipc-constant") return Algorithm::IpcConstant;
  if (s == "ipc-adaptive") return Algorithm::IpcAdaptive;
  if (s == "convex-ipc") return Algorithm::ConvexIpc;
  throw ValidationError("unknown algorithm '" + s +
                        "' (expected ipc-constant, ipc-adaptive or convex-ipc)");
}

double max_step_for(const SolverConfig& cfg, double lipschitz) {
  return (cfg.algorithm == Algorithm::ConvexIpc ? 4.0 : 1.0) / lipschitz;
}

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ValidationError(msg); }

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

void validate(const LineSearchParams& p) {
  if (!(0.0 < p.mu && p.mu < p.nu && p.nu < 1.0))
    fail("line search requires 0 < mu < nu < 1; got mu=" + num(p.mu) + ", nu=" + num(p.nu));
  if (!(0.0 < p.theta && p.theta < 1.0))
    fail("line search requires theta in (0,1); got theta=" + num(p.theta));
  if (!(p.tau > 1.0)) fail("line search requires tau > 1; got tau=" + num(p.tau));
  if (!(0.0 < p.h_lo && p.h_lo < 1.0))
    fail("line search requires 0 < h_lo < 1; got h_lo=" + num(p.h_lo));
  if (!(p.h_lo <= p.gamma0_init && p.gamma0_init <= p.h_hi))
    fail("line search requires h_lo <= gamma0_init <= h_hi; got gamma0_init=" +
         num(p.gamma0_init) + ", h_lo=" + num(p.h_lo) + ", h_hi=" + num(p.h_hi));
  if (p.max_evals < 1) fail("line search evaluation cap must be >= 1");
}

void validate(const SolverConfig& cfg, std::optional<double> lipschitz) {
  if (!(cfg.epsilon > 0.0)) fail("epsilon must be > 0; got " + num(cfg.epsilon));
  if (cfg.max_iters < 1) fail("max_iters must be >= 1");
  if (!std::isfinite(cfg.beta)) fail("beta must be finite");

  switch (cfg.algorithm) {
    case Algorithm::IpcConstant: {
      if (!lipschitz)
        fail("ipc-constant requires a known Lipschitz constant");
      const double L = *lipschitz;
      if (!(cfg.h_const > 0.0 && cfg.h_const * L < 1.0))
        fail("ipc-constant requires 0 < h < 1/L; got h=" + num(cfg.h_const) +
             ", 1/L=" + num(1.0 / L));
      const double lo = beta_lower_bound_constant(cfg.h_const, L);
      if (!(cfg.beta > lo && cfg.beta <= 1.0))
        fail("ipc-constant requires beta in (" + num(lo) + ", 1]; got beta=" + num(cfg.beta));
      break;
    }
    case Algorithm::IpcAdaptive: {
      validate(cfg.line_search);
      const double lo = beta_lower_bound_adaptive(cfg.line_search.nu);
      if (!(cfg.beta > lo && cfg.beta <= 1.0))
        fail("ipc-adaptive requires beta in (" + num(lo) + ", 1]; got beta=" + num(cfg.beta));
      break;
    }
    case Algorithm::ConvexIpc: {
      if (!lipschitz)
        fail("convex-ipc requires a known Lipschitz constant");
      const double L = *lipschitz;
      if (!(0.0 <= cfg.beta && cfg.beta <= 1.0))
        fail("convex-ipc requires beta in [0, 1]; got beta=" + num(cfg.beta));
      if (!(0.0 < cfg.eta && cfg.eta < 2.0))
        fail("convex-ipc requires eta in (0, 2); got eta=" + num(cfg.eta));
      if (cfg.h_const > 0.0) {
        // Fixed-step mode: h_const plays the role of the worst-case step.
        if (!(cfg.h_const * L < 4.0))
          fail("convex-ipc requires h < 4/L; got h=" + num(cfg.h_const) +
               ", 4/L=" + num(4.0 / L));
      } else {
        validate(cfg.line_search);
        if (!(cfg.line_search.h_hi * L < 4.0))
          fail("convex-ipc requires h_hi < 4/L; got h_hi=" + num(cfg.line_search.h_hi) +
               ", 4/L=" + num(4.0 / L));
      }
      break;
    }
  }
}

}  // namespace ipc
