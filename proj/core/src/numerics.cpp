#include "ipc/numerics.hpp"

#include <cmath>
#include <sstream>

#include "ipc/errors.hpp"

namespace ipc {

namespace {

double bound_from_squared(double s) {
  return 1.0 / (1.0 + std::sqrt(1.0 - s));
}

}  // namespace

double beta_lower_bound_constant(double h, double L) {
  const double hl = h * L;
  if (!(hl > 0.0) || !(hl < 1.0)) {
    std::ostringstream os;
    os << "beta lower bound requires 0 < h*L < 1; got h*L = " << hl;
    throw DomainError(os.str());
  }
  return bound_from_squared(hl * hl);
}

double beta_lower_bound_adaptive(double nu) {
  if (!(nu > 0.0) || !(nu < 1.0)) {
    std::ostringstream os;
    os << "beta lower bound requires 0 < nu < 1; got nu = " << nu;
    throw DomainError(os.str());
  }
  return bound_from_squared(nu * nu);
}

double ContractionConstants::active_kappa(Algorithm a) const {
  switch (a) {
    case Algorithm::IpcConstant: return kappa1;
    case Algorithm::IpcAdaptive: return kappa2;
    case Algorithm::ConvexIpc: return kappa4;
  }
  return 0.0;
}

ContractionConstants contraction_constants(const SolverConfig& cfg,
                                           const GradientOracle& oracle) {
  const LineSearchParams& ls = cfg.line_search;
  const double beta = cfg.beta;
  const double L = oracle.lipschitz.value_or(1.0);
  const double L1 = std::max(L, 1.0);
  const bool fixed_step = cfg.h_const > 0.0;
  const double h_bar = (cfg.algorithm == Algorithm::ConvexIpc && fixed_step)
                           ? cfg.h_const
                           : ls.h_hi;

  ContractionConstants out;
  // With a constant step the accepted ratio is bounded by hL; otherwise by
  // the acceptance threshold nu.
  const double ratio = (cfg.algorithm == Algorithm::IpcConstant) ? cfg.h_const * L : ls.nu;
  out.kappa1 = 2.0 * beta - 1.0 - beta * beta * ratio * ratio;
  out.kappa2 = 2.0 * beta - 1.0 - beta * beta * ls.nu * ls.nu;
  out.kappa3 = (1.0 - beta) * (1.0 - L * h_bar / 4.0) + beta * (1.0 - ls.nu);
  out.alpha_min = out.kappa3 / (2.0 + 2.0 * beta * beta * ls.nu * ls.nu);
  out.kappa4 = cfg.eta * (2.0 - cfg.eta) * out.alpha_min * out.kappa3;
  out.h_min = std::min(ls.h_lo, ls.nu * ls.theta / (ls.h_hi * L1 * L1));

  switch (cfg.algorithm) {
    case Algorithm::IpcConstant:
      out.beta_lo = beta_lower_bound_constant(cfg.h_const, L);
      break;
    case Algorithm::IpcAdaptive:
      out.beta_lo = beta_lower_bound_adaptive(ls.nu);
      break;
    case Algorithm::ConvexIpc:
      out.beta_lo = 0.0;
      break;
  }
  out.beta_hi = 1.0;

  const double kappa = out.active_kappa(cfg.algorithm);
  if (!(kappa > 0.0)) {
    std::ostringstream os;
    os << "contraction constant of " << to_string(cfg.algorithm)
       << " must be positive; got " << kappa << " (beta=" << beta << ")";
    throw ValidationError(os.str());
  }
  return out;
}

Eigen::VectorXd correction_direction(const Eigen::VectorXd& grad_x,
                                     const Eigen::VectorXd& grad_z, double beta) {
  if (grad_x.size() != grad_z.size())
    throw ValidationError("correction_direction: gradient dimensions differ");
  if (beta == 0.0) return grad_x;
  if (beta == 1.0) return grad_z;
  return grad_x - beta * (grad_x - grad_z);
}

Eigen::VectorXd ipc_step(const Eigen::VectorXd& x, const Eigen::VectorXd& grad_x,
                         const Eigen::VectorXd& grad_z, double h, double beta,
                         double scale) {
  if (x.size() != grad_x.size() || x.size() != grad_z.size())
    throw ValidationError("ipc_step: dimension mismatch");
  if (!(h > 0.0)) throw ValidationError("ipc_step: h must be > 0");
  if (!(scale > 0.0)) throw ValidationError("ipc_step: scale must be > 0");
  return x - (scale * h) * correction_direction(grad_x, grad_z, beta);
}

double alpha_k(const Eigen::VectorXd& x, const Eigen::VectorXd& z,
               const Eigen::VectorXd& grad_x, const Eigen::VectorXd& grad_z,
               double h, double beta, double L) {
  const Eigen::VectorXd dx = x - z;
  const double dx_sq = dx.squaredNorm();
  if (dx_sq == 0.0)
    throw StationaryPointError("alpha_k: x == z, the iterate is stationary");

  const double numerator = (1.0 - beta) * (1.0 - L * h / 4.0) * dx_sq +
                           beta * dx.dot(h * grad_z);
  const double denominator =
      h * h * correction_direction(grad_x, grad_z, beta).squaredNorm();
  if (denominator == 0.0)
    throw InternalError("alpha_k: zero correction direction at a non-stationary point");
  return numerator / denominator;
}

Eigen::VectorXd finite_difference_grad(const GradientOracle& oracle,
                                       const Eigen::VectorXd& x, double step) {
  if (!(step > 0.0)) throw ValidationError("finite_difference_grad: step must be > 0");
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double fp = oracle.eval_f(probe);
    probe[i] = x[i] - step;
    const double fm = oracle.eval_f(probe);
    probe[i] = x[i];
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

}  // namespace ipc
