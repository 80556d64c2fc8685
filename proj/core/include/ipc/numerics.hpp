#pragma once

#include <Eigen/Core>

#include "ipc/config.hpp"
#include "ipc/oracle.hpp"

namespace ipc {

// Greatest lower bound of the admissible adjustment coefficient under a
// constant step h with Lipschitz constant L. Evaluated as
// 1/(1 + sqrt(1 - h^2 L^2)), which is algebraically identical to
// (1 - sqrt(1 - h^2 L^2))/(h^2 L^2) but free of cancellation for small hL.
// Lies in (1/2, 1) and increases with hL. Throws DomainError unless
// 0 < hL < 1.
double beta_lower_bound_constant(double h, double L);

// Same bound with the line-search acceptance threshold nu in place of hL.
// Throws DomainError unless 0 < nu < 1.
double beta_lower_bound_adaptive(double nu);

// Contraction and floor constants implied by a configuration. kappa1/2/3/4
// are the per-iteration contraction coefficients of the three algorithms
// (kappa3 is the descent coefficient behind alpha_min and kappa4);
// alpha_min and h_min are the run-independent floors on alpha_k and on the
// accepted line-search step. All are computed from worst-case parameters
// (h_hi, or h_const in fixed-step mode), never per-iteration values, so a
// single instance bounds an entire run.
struct ContractionConstants {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double kappa3 = 0.0;
  double kappa4 = 0.0;
  double alpha_min = 0.0;
  double h_min = 0.0;
  double beta_lo = 0.0;  // admissible beta range of the configured algorithm;
  double beta_hi = 1.0;  // open at beta_lo except for ConvexIpc

  // The contraction coefficient of the configured algorithm.
  double active_kappa(Algorithm a) const;
};

// Computes every constant that is well defined for the configuration.
// Where the Lipschitz constant is unavailable (allowed only for
// ipc-adaptive) it enters the formulas as 1; kappa2 and the beta range,
// the only constants that algorithm relies on, never need it. Throws
// ValidationError naming the violated inequality when the constant the
// configured algorithm depends on fails to be positive.
ContractionConstants contraction_constants(const SolverConfig& cfg,
                                           const GradientOracle& oracle);

// grad_x - beta*(grad_x - grad_z). The endpoints reduce exactly:
// beta = 0 yields grad_x and beta = 1 yields grad_z, bitwise, so runs at
// the endpoints reproduce plain gradient descent and the extra-gradient
// correction without rounding residue.
Eigen::VectorXd correction_direction(const Eigen::VectorXd& grad_x,
                                     const Eigen::VectorXd& grad_z, double beta);

// x - scale*h*(grad_x - beta*(grad_x - grad_z)). scale is 1 for the
// unscaled algorithms and eta*alpha_k for the scaled one.
Eigen::VectorXd ipc_step(const Eigen::VectorXd& x, const Eigen::VectorXd& grad_x,
                         const Eigen::VectorXd& grad_z, double h, double beta,
                         double scale);

// Optimal length of the scaled correction step:
//
//   alpha = [(1-beta)(1 - L h/4)||x-z||^2 + beta <x-z, h grad_z>]
//           / (h^2 ||grad_x - beta (grad_x - grad_z)||^2).
//
// Throws StationaryPointError if x == z (the caller's stopping test should
// have fired) and InternalError if the denominator vanishes with x != z.
double alpha_k(const Eigen::VectorXd& x, const Eigen::VectorXd& z,
               const Eigen::VectorXd& grad_x, const Eigen::VectorXd& grad_z,
               double h, double beta, double L);

// Central-difference gradient estimate, one f-pair per coordinate.
Eigen::VectorXd finite_difference_grad(const GradientOracle& oracle,
                                       const Eigen::VectorXd& x, double step);

}  // namespace ipc
