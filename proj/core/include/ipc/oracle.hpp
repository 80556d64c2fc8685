#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>

namespace ipc {

enum class ConvexityClass { Convex, PseudoConvex, Unknown };

// First-order oracle: f and grad f at a point, plus the metadata the
// solvers and verifiers consume. Oracles are immutable after construction
// and safe to evaluate from multiple threads.
struct GradientOracle {
  int dim = 0;
  std::function<double(const Eigen::VectorXd&)> eval_f;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eval_grad;
  std::optional<double> lipschitz;                // L of grad f, when known
  std::optional<Eigen::VectorXd> known_solution;  // a stationary point, when known
  ConvexityClass convexity_class = ConvexityClass::Unknown;
  Eigen::VectorXd default_x0;  // generator's reference starting point
  std::string name;            // generator name, recorded in trace headers

  // Region the iterates must stay inside (empty = everywhere). Evaluations
  // outside it return formula values, not errors: line-search trial points
  // may cross it transiently and are rejected by the ratio test, but a
  // solver aborts if an accepted iterate lands outside.
  std::function<bool(const Eigen::VectorXd&)> domain_ok;
};

}  // namespace ipc
