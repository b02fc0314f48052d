#include "qaboa/gpr.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "qaboa/box_minimizer.hpp"

namespace qaboa {

const char* to_string(KernelVariant variant) {
  return variant == KernelVariant::Matern ? "matern" : "quantum-matern";
}

void KernelConfig::validate() const {
  if (nu != 0.5 && nu != 1.5 && nu != 2.5) {
    throw std::invalid_argument("Matern smoothness must be 0.5, 1.5 or 2.5, got " + std::to_string(nu));
  }
  if (!(length_scale > 0.0)) throw std::invalid_argument("length scale must be positive");
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(length_scale_bounds.lower > 0.0 && length_scale_bounds.lower <= length_scale_bounds.upper)) {
    throw std::invalid_argument("invalid length scale bounds");
  }
  if (!(omega_bounds.lower > 0.0 && omega_bounds.lower <= omega_bounds.upper)) {
    throw std::invalid_argument("invalid omega bounds");
  }
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
}

KurtosisEstimate kurtosis(const MeasurementHistogram& hist) {
  std::int64_t total = 0;
  for (const auto& [z, c] : hist.counts) total += c;
  if (total < 1) throw std::invalid_argument("kurtosis of an empty histogram");
  const double n = static_cast<double>(total);
  double mean = 0.0;
  for (const auto& [z, c] : hist.counts) mean += static_cast<double>(c) / n * z;
  double m2 = 0.0;
  double m4 = 0.0;
  for (const auto& [z, c] : hist.counts) {
    const double p = static_cast<double>(c) / n;
    const double d2 = (z - mean) * (z - mean);
    m2 += p * d2;
    m4 += p * d2 * d2;
  }
  if (m2 < 1e-12) return {0.0, true};
  return {m4 / (m2 * m2), false};
}

double matern_from_distance(double distance, double nu, double length_scale) {
  const double r = distance / length_scale;
  if (nu == 0.5) return std::exp(-r);
  if (nu == 1.5) {
    const double a = std::numbers::sqrt3 * r;
    return (1.0 + a) * std::exp(-a);
  }
  if (nu == 2.5) {
    const double a = std::sqrt(5.0) * r;
    return (1.0 + a + a * a / 3.0) * std::exp(-a);
  }
  throw std::invalid_argument("unsupported Matern smoothness " + std::to_string(nu));
}

double matern(std::span<const double> x, std::span<const double> x_prime, const KernelConfig& config) {
  if (x.size() != x_prime.size()) throw std::invalid_argument("matern: dimension mismatch");
  double sq = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) sq += (x[k] - x_prime[k]) * (x[k] - x_prime[k]);
  return matern_from_distance(std::sqrt(sq), config.nu, config.length_scale);
}

double kurtosis_kernel(const KurtosisEstimate& kappa, const KernelConfig& config) {
  if (kappa.degenerate) return 0.0;
  const double denom = kappa.kappa + config.epsilon;
  return config.omega / (denom * denom);
}

double qm_kernel(std::span<const double> x, std::span<const double> x_prime,
                 const std::optional<KurtosisEstimate>& same_sample, const KernelConfig& config) {
  const double base = matern(x, x_prime, config);
  return same_sample ? base + kurtosis_kernel(*same_sample, config) : base;
}

namespace {

// d K / d log(l) for the Matern closed forms.
double matern_log_length_derivative(double distance, double nu, double length_scale) {
  const double r = distance / length_scale;
  if (nu == 0.5) return r * std::exp(-r);
  if (nu == 1.5) {
    const double a = std::numbers::sqrt3 * r;
    return a * a * std::exp(-a);
  }
  const double a = std::sqrt(5.0) * r;
  return a * a * (1.0 + a) / 3.0 * std::exp(-a);
}

struct Factorization {
  Eigen::MatrixXd chol;
  double jitter = 0.0;
  bool ok = false;
};

Factorization factorize(const Eigen::MatrixXd& k) {
  const Eigen::Index n = k.rows();
  for (double jitter = kInitialJitter; jitter <= kMaxJitter; jitter *= 2.0) {
    Eigen::LLT<Eigen::MatrixXd> llt(k + jitter * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() != Eigen::Success) continue;
    Eigen::MatrixXd l = llt.matrixL();
    if (!l.diagonal().allFinite() || (l.diagonal().array() <= 0.0).any()) continue;
    return {std::move(l), jitter, true};
  }
  return {};
}

struct Problem {
  Eigen::MatrixXd distances;
  Eigen::VectorXd noise_shape;  // (kappa + eps)^-2 per sample, 0 when degenerate
  Eigen::VectorXd y;
  double nu = 0.5;
  bool quantum = false;

  Eigen::MatrixXd covariance(double length_scale, double omega) const {
    const Eigen::Index n = distances.rows();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) k(i, j) = matern_from_distance(distances(i, j), nu, length_scale);
    }
    if (quantum) k.diagonal() += omega * noise_shape;
    return k;
  }

  // Negative log marginal likelihood and its gradient in (log l[, log omega]).
  double negative_lml(const Eigen::VectorXd& params, Eigen::VectorXd& grad) const {
    const double length_scale = std::exp(params[0]);
    const double omega = quantum ? std::exp(params[1]) : 0.0;
    const Eigen::MatrixXd k = covariance(length_scale, omega);
    const auto fact = factorize(k);
    if (!fact.ok) return std::numeric_limits<double>::infinity();
    const Eigen::Index n = k.rows();
    const auto lower = fact.chol.triangularView<Eigen::Lower>();
    Eigen::VectorXd alpha = lower.solve(y);
    lower.transpose().solveInPlace(alpha);
    const double value = 0.5 * y.dot(alpha) + fact.chol.diagonal().array().log().sum() +
                         0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);

    Eigen::MatrixXd k_inv = lower.solve(Eigen::MatrixXd::Identity(n, n));
    k_inv = lower.transpose().solve(k_inv);
    const Eigen::MatrixXd inner = alpha * alpha.transpose() - k_inv;

    Eigen::MatrixXd dk(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        dk(i, j) = matern_log_length_derivative(distances(i, j), nu, length_scale);
      }
    }
    grad.resize(params.size());
    grad[0] = -0.5 * (inner.cwiseProduct(dk)).sum();
    if (quantum) grad[1] = -0.5 * (inner.diagonal().cwiseProduct(omega * noise_shape)).sum();
    return value;
  }
};

}  // namespace

GprModel GprModel::fit(std::vector<std::vector<double>> X, std::vector<double> y,
                       std::vector<KurtosisEstimate> kappas, KernelConfig config, std::uint64_t seed) {
  config.validate();
  if (X.empty()) throw std::invalid_argument("GPR fit needs at least one sample");
  if (X.size() != y.size() || X.size() != kappas.size()) {
    throw std::invalid_argument("GPR fit: X, y and kappas differ in length");
  }
  const std::size_t dim = X.front().size();
  const auto n = static_cast<Eigen::Index>(X.size());
  GprModel model;
  model.X_.resize(static_cast<Eigen::Index>(dim), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = X[static_cast<std::size_t>(i)];
    if (row.size() != dim) throw std::invalid_argument("GPR fit: inconsistent input dimension");
    for (std::size_t k = 0; k < dim; ++k) {
      if (!std::isfinite(row[k])) throw std::invalid_argument("GPR fit: non-finite input");
      model.X_(static_cast<Eigen::Index>(k), i) = row[k];
    }
    if (!std::isfinite(y[static_cast<std::size_t>(i)])) throw std::invalid_argument("GPR fit: non-finite target");
    const auto& kap = kappas[static_cast<std::size_t>(i)];
    if (!kap.degenerate && !std::isfinite(kap.kappa)) throw std::invalid_argument("GPR fit: non-finite kurtosis");
  }

  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  model.y_mean_ = mean;
  model.y_scale_ = var > 0.0 ? std::sqrt(var) : 1.0;
  model.y_std_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) model.y_std_[i] = model.standardize(y[static_cast<std::size_t>(i)]);

  Problem problem;
  problem.nu = config.nu;
  problem.quantum = config.variant == KernelVariant::QuantumMatern;
  problem.y = model.y_std_;
  problem.distances.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) problem.distances(i, j) = (model.X_.col(i) - model.X_.col(j)).norm();
  }
  problem.noise_shape.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& kap = kappas[static_cast<std::size_t>(i)];
    KernelConfig unit = config;
    unit.omega = 1.0;
    problem.noise_shape[i] = kurtosis_kernel(kap, unit);
  }

  if (config.tune) {
    const Eigen::Index n_params = problem.quantum ? 2 : 1;
    Eigen::VectorXd lo(n_params), hi(n_params);
    lo[0] = std::log(config.length_scale_bounds.lower);
    hi[0] = std::log(config.length_scale_bounds.upper);
    if (problem.quantum) {
      lo[1] = std::log(config.omega_bounds.lower);
      hi[1] = std::log(config.omega_bounds.upper);
    }
    std::mt19937_64 rng(seed);
    const GradientObjective objective = [&problem](const Eigen::VectorXd& p, Eigen::VectorXd& g) {
      return problem.negative_lml(p, g);
    };
    double best_value = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best;
    for (int r = 0; r < config.restarts; ++r) {
      Eigen::VectorXd start(n_params);
      for (Eigen::Index k = 0; k < n_params; ++k) {
        start[k] = std::uniform_real_distribution<double>(lo[k], hi[k])(rng);
      }
      const auto result = minimize_in_box(objective, start, lo, hi);
      if (std::isfinite(result.value) && result.value < best_value) {
        best_value = result.value;
        best = result.x;
      }
    }
    if (best.size() == 0) {
      throw std::runtime_error("GPR fit: covariance not positive definite for any hyperparameter restart");
    }
    config.length_scale = std::exp(best[0]);
    if (problem.quantum) config.omega = std::exp(best[1]);
  }
  model.config_ = config;
  model.y_.assign(y.begin(), y.end());
  model.kappas_ = std::move(kappas);

  const Eigen::MatrixXd k = problem.covariance(config.length_scale, config.omega);
  auto fact = factorize(k);
  if (!fact.ok) {
    throw std::runtime_error("GPR fit: Cholesky failed even with jitter " + std::to_string(kMaxJitter));
  }
  model.chol_ = std::move(fact.chol);
  model.jitter_ = fact.jitter;
  model.alpha_ = model.chol_.triangularView<Eigen::Lower>().solve(model.y_std_);
  model.chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(model.alpha_);
  model.lml_ = -(0.5 * model.y_std_.dot(model.alpha_) + model.chol_.diagonal().array().log().sum() +
                 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi));
  return model;
}

Eigen::MatrixXd GprModel::training_covariance() const {
  const Eigen::Index n = X_.cols();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      k(i, j) = matern_from_distance((X_.col(i) - X_.col(j)).norm(), config_.nu, config_.length_scale);
    }
  }
  if (config_.variant == KernelVariant::QuantumMatern) {
    for (Eigen::Index i = 0; i < n; ++i) k(i, i) += kurtosis_kernel(kappas_[static_cast<std::size_t>(i)], config_);
  }
  return k;
}

Prediction GprModel::predict_standardized(std::span<const double> x) const {
  if (x.size() != dimension()) throw std::invalid_argument("predict: dimension mismatch");
  const Eigen::Index n = X_.cols();
  const Eigen::Map<const Eigen::VectorXd> xs(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::VectorXd kstar(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    kstar[i] = matern_from_distance((X_.col(i) - xs).norm(), config_.nu, config_.length_scale);
  }
  const double mu = kstar.dot(alpha_);
  chol_.triangularView<Eigen::Lower>().solveInPlace(kstar);
  // Test-point self covariance is the plain Matern value 1; the kurtosis term
  // only models measurement noise at evaluated samples.
  const double var = 1.0 - kstar.squaredNorm();
  return {mu, var > 0.0 ? std::sqrt(var) : 0.0};
}

Prediction GprModel::predict(std::span<const double> x) const {
  const auto p = predict_standardized(x);
  return {unstandardize(p.mu), p.sigma * y_scale_};
}

}  // namespace qaboa
