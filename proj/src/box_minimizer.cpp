#include "qaboa/box_minimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace qaboa {

namespace {

Eigen::VectorXd clamp(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

// Zero the components of d that would leave the box from an active bound.
Eigen::VectorXd project_direction(Eigen::VectorXd d, const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                                  const Eigen::VectorXd& hi) {
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    if ((x[k] <= lo[k] && d[k] < 0.0) || (x[k] >= hi[k] && d[k] > 0.0)) d[k] = 0.0;
  }
  return d;
}

}  // namespace

BoxMinimizerResult minimize_in_box(const GradientObjective& objective, Eigen::VectorXd x0,
                                   const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                   const BoxMinimizerOptions& options) {
  const Eigen::Index n = x0.size();
  if (lower.size() != n || upper.size() != n) throw std::invalid_argument("box dimension mismatch");
  if ((lower.array() > upper.array()).any()) throw std::invalid_argument("box lower bound exceeds upper bound");

  BoxMinimizerResult result;
  Eigen::VectorXd x = clamp(x0, lower, upper);
  Eigen::VectorXd grad(n);
  double f = objective(x, grad);
  if (!std::isfinite(f)) {
    result.x = x;
    result.value = f;
    return result;
  }
  Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(n, n);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    const Eigen::VectorXd steepest = project_direction(-grad, x, lower, upper);
    if (steepest.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
      result.converged = true;
      break;
    }
    Eigen::VectorXd dir = project_direction(-inv_hessian * grad, x, lower, upper);
    if (dir.dot(grad) >= 0.0) {
      inv_hessian.setIdentity();
      dir = steepest;
    }

    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd x_new, grad_new(n);
    double f_new = f;
    for (int bt = 0; bt < options.max_backtracks; ++bt, step *= 0.5) {
      x_new = clamp(x + step * dir, lower, upper);
      f_new = objective(x_new, grad_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * grad.dot(x_new - x)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (dir != steepest) {
        inv_hessian.setIdentity();
        continue;
      }
      result.converged = true;
      break;
    }

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd yv = grad_new - grad;
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
      inv_hessian = (eye - rho * s * yv.transpose()) * inv_hessian * (eye - rho * yv * s.transpose()) +
                    rho * s * s.transpose();
    }
    const double change = f - f_new;
    x = x_new;
    grad = grad_new;
    f = f_new;
    if (change < options.function_tolerance * (1.0 + std::abs(f))) {
      result.converged = true;
      break;
    }
  }
  result.x = x;
  result.value = f;
  return result;
}

}  // namespace qaboa
