#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qaboa/problems.hpp"
#include "qaboa/statevector.hpp"

namespace qaboa {

enum class KernelVariant { Matern, QuantumMatern };

const char* to_string(KernelVariant variant);

struct KernelConfig {
  double nu = 0.5;  // closed forms for 0.5, 1.5, 2.5
  double length_scale = 1.0;
  KernelVariant variant = KernelVariant::Matern;
  double omega = 1.0;     // scale of the kurtosis term
  double epsilon = 1e-6;  // keeps (kappa + epsilon) away from zero
  Bounds length_scale_bounds{1e-2, 1e2};
  Bounds omega_bounds{1e-4, 1e4};
  bool tune = true;
  int restarts = 5;

  void validate() const;
};

/// Pearson kurtosis of the measured basis-index distribution.
struct KurtosisEstimate {
  double kappa = 0.0;
  bool degenerate = false;  // zero sample variance; kappa is meaningless
};

KurtosisEstimate kurtosis(const MeasurementHistogram& hist);

double matern(std::span<const double> x, std::span<const double> x_prime, const KernelConfig& config);
double matern_from_distance(double distance, double nu, double length_scale);

/// omega (kappa + epsilon)^-2, or 0 for a degenerate estimate.
double kurtosis_kernel(const KurtosisEstimate& kappa, const KernelConfig& config);

/// Quantum-Matern kernel. `same_sample` carries the kurtosis when x and x' are
/// the same training sample; pass nullopt for distinct samples.
double qm_kernel(std::span<const double> x, std::span<const double> x_prime,
                 const std::optional<KurtosisEstimate>& same_sample, const KernelConfig& config);

struct Prediction {
  double mu = 0.0;
  double sigma = 0.0;
};

class GprModel {
 public:
  /// Fits on standardized targets. With config.tune the length scale (and omega
  /// for the quantum-Matern kernel) maximize the log marginal likelihood over
  /// log-uniform restarts drawn from `seed`.
  static GprModel fit(std::vector<std::vector<double>> X, std::vector<double> y,
                      std::vector<KurtosisEstimate> kappas, KernelConfig config, std::uint64_t seed = 0);

  Prediction predict(std::span<const double> x) const;
  /// Posterior on the standardized scale (prior mean 0, prior stddev 1).
  Prediction predict_standardized(std::span<const double> x) const;

  const KernelConfig& kernel() const { return config_; }
  std::size_t size() const { return y_.size(); }
  std::size_t dimension() const { return static_cast<std::size_t>(X_.rows()); }
  double jitter() const { return jitter_; }
  double log_marginal_likelihood() const { return lml_; }
  double y_mean() const { return y_mean_; }
  double y_scale() const { return y_scale_; }
  double standardize(double y) const { return (y - y_mean_) / y_scale_; }
  double unstandardize(double s) const { return s * y_scale_ + y_mean_; }
  const Eigen::MatrixXd& cholesky_factor() const { return chol_; }
  const Eigen::VectorXd& weights() const { return alpha_; }

  /// Training covariance K(X, X) including the kurtosis diagonal, without jitter.
  Eigen::MatrixXd training_covariance() const;

 private:
  GprModel() = default;

  Eigen::MatrixXd X_;  // one column per sample
  std::vector<double> y_;
  std::vector<KurtosisEstimate> kappas_;
  KernelConfig config_;
  Eigen::VectorXd y_std_;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd alpha_;
  double jitter_ = 0.0;
  double lml_ = 0.0;
};

inline constexpr double kInitialJitter = 1e-10;
inline constexpr double kMaxJitter = 1e-4;

}  // namespace qaboa
