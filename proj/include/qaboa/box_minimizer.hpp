#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace qaboa {

/// Objective returning f(x) and writing the gradient into `grad`. A non-finite
/// return value marks x as infeasible; the line search then backs off.
using GradientObjective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct BoxMinimizerOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-6;
  double function_tolerance = 1e-10;
  int max_backtracks = 40;
};

struct BoxMinimizerResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Projected BFGS with Armijo backtracking on the box [lower, upper]. Variables
/// pinned at a bound with the gradient pointing outward are held fixed for the step.
BoxMinimizerResult minimize_in_box(const GradientObjective& objective, Eigen::VectorXd x0,
                                   const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                   const BoxMinimizerOptions& options = {});

}  // namespace qaboa
