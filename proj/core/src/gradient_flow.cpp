#include "ipc/gradient_flow.hpp"

#include <cmath>
#include <sstream>

#include "ipc/errors.hpp"
#include "ipc/numerics.hpp"

namespace ipc {

std::string to_string(FlowScheme s) {
  switch (s) {
    case FlowScheme::ExplicitEuler: return "explicit-euler";
    case FlowScheme::ImplicitEuler: return "implicit-euler";
    case FlowScheme::Midpoint: return "midpoint";
    case FlowScheme::Trapezoidal: return "trapezoidal";
    case FlowScheme::ExplicitTrapezoidal: return "explicit-trapezoidal";
  }
  return "?";
}

FlowScheme flow_scheme_from_string(const std::string& s) {
  for (FlowScheme scheme : all_flow_schemes())
    if (to_string(scheme) == s) return scheme;
  throw ValidationError("unknown flow scheme '" + s + "'");
}

std::vector<FlowScheme> all_flow_schemes() {
  return {FlowScheme::ExplicitEuler, FlowScheme::ImplicitEuler, FlowScheme::Midpoint,
          FlowScheme::Trapezoidal, FlowScheme::ExplicitTrapezoidal};
}

namespace {

// Solves y = map(y) by fixed-point iteration from y = start.
Eigen::VectorXd fixed_point(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& map,
                            const Eigen::VectorXd& start, const FixedPointOptions& fp,
                            const char* what) {
  Eigen::VectorXd y = start;
  for (int it = 0; it < fp.max_iters; ++it) {
    Eigen::VectorXd next = map(y);
    const double delta = (next - y).norm();
    y = std::move(next);
    if (!std::isfinite(delta)) {
      std::ostringstream os;
      os << what << ": fixed-point iteration diverged (h*L too large?)";
      throw NoConvergenceError(os.str());
    }
    if (delta <= fp.tol * std::max(1.0, y.norm())) return y;
  }
  std::ostringstream os;
  os << what << ": fixed-point iteration missed tolerance " << fp.tol << " in "
     << fp.max_iters << " steps";
  throw NoConvergenceError(os.str());
}

}  // namespace

Eigen::VectorXd flow_step(FlowScheme scheme, const GradientOracle& oracle,
                          const Eigen::VectorXd& x, double h,
                          const FixedPointOptions& fp) {
  if (!(h > 0.0)) throw ValidationError("flow_step requires h > 0");
  const bool implicit = scheme == FlowScheme::ImplicitEuler ||
                        scheme == FlowScheme::Midpoint ||
                        scheme == FlowScheme::Trapezoidal;
  // The inner fixed-point solve contracts only for small h*L; the explicit
  // schemes carry no such restriction.
  if (implicit && oracle.lipschitz && !(h * *oracle.lipschitz <= 0.5)) {
    std::ostringstream os;
    os << "implicit flow_step requires h*L <= 0.5; got " << h * *oracle.lipschitz;
    throw ValidationError(os.str());
  }

  switch (scheme) {
    case FlowScheme::ExplicitEuler:
      return x - h * oracle.eval_grad(x);

    case FlowScheme::ImplicitEuler:
      return fixed_point(
          [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
            return x - h * oracle.eval_grad(y);
          },
          x, fp, "implicit Euler");

    case FlowScheme::Midpoint: {
      const Eigen::VectorXd z = fixed_point(
          [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
            return x - 0.5 * h * oracle.eval_grad(y);
          },
          x, fp, "midpoint");
      return 2.0 * z - x;
    }

    case FlowScheme::Trapezoidal: {
      const Eigen::VectorXd gx = oracle.eval_grad(x);
      return fixed_point(
          [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
            return x - 0.5 * h * (gx + oracle.eval_grad(y));
          },
          x, fp, "trapezoidal");
    }

    case FlowScheme::ExplicitTrapezoidal: {
      const Eigen::VectorXd gx = oracle.eval_grad(x);
      const Eigen::VectorXd z = x - h * gx;
      return ipc_step(x, gx, oracle.eval_grad(z), h, 0.5, 1.0);
    }
  }
  throw InternalError("flow_step: unhandled scheme");
}

double estimate_order(FlowScheme scheme, const QuadraticProblem& problem, double T,
                      const std::vector<double>& h_list, const FixedPointOptions& fp) {
  if (h_list.size() < 3)
    throw ValidationError("estimate_order requires at least 3 step sizes");
  for (std::size_t i = 0; i + 1 < h_list.size(); ++i)
    if (!(h_list[i] > h_list[i + 1]))
      throw ValidationError("estimate_order requires strictly decreasing step sizes");
  if (!(T > 0.0)) throw ValidationError("estimate_order requires T > 0");

  const GradientOracle oracle = problem.oracle();
  const double L = problem.cond;
  for (double h : h_list)
    if (!(h > 0.0 && h * L <= 0.5)) {
      std::ostringstream os;
      os << "estimate_order requires 0 < h <= 0.5/L; got h = " << h << " with L = " << L;
      throw ValidationError(os.str());
    }

  std::vector<double> log_h, log_err;
  log_h.reserve(h_list.size());
  log_err.reserve(h_list.size());
  for (double h : h_list) {
    const auto steps = static_cast<long>(std::llround(T / h));
    Eigen::VectorXd x = problem.x0;
    double max_err = 0.0;
    for (long k = 1; k <= steps; ++k) {
      x = flow_step(scheme, oracle, x, h, fp);
      max_err = std::max(max_err, (x - problem.flow_at(double(k) * h)).norm());
    }
    if (!(max_err > 0.0))
      throw InternalError("estimate_order: zero grid error, slope undefined");
    log_h.push_back(std::log(h));
    log_err.push_back(std::log(max_err));
  }

  const double n = static_cast<double>(log_h.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < log_h.size(); ++i) {
    mx += log_h[i];
    my += log_err[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < log_h.size(); ++i) {
    sxy += (log_h[i] - mx) * (log_err[i] - my);
    sxx += (log_h[i] - mx) * (log_h[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace ipc
