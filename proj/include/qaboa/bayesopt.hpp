#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qaboa/gpr.hpp"
#include "qaboa/problems.hpp"
#include "qaboa/statevector.hpp"

namespace qaboa {

enum class MixerKind { X, XY, GM, TM, UTM };

std::string to_string(MixerKind kind);
MixerKind parse_mixer_kind(std::string_view name);

struct AlgorithmVariant {
  MixerKind kind = MixerKind::TM;
  int depth = 1;

  /// Two angles (gamma, mixer) for single-mixer circuits, three (gamma, beta, theta) otherwise.
  int angles_per_layer() const;
  int angle_count() const { return depth * angles_per_layer(); }
  bool two_mixer() const { return kind == MixerKind::TM || kind == MixerKind::UTM; }
  KernelVariant kernel_variant() const;
  std::string name() const { return to_string(kind); }
  void validate() const;
};

/// Rotation angles in [0, 2 pi] followed by the continuous design variables.
struct SearchPoint {
  std::vector<double> angles;
  std::vector<double> x_c;
};

/// Box [0, 2 pi]^angles x bounds(x_c), mapped to the unit cube for the surrogate.
struct SearchSpace {
  int n_angles = 0;
  std::vector<Bounds> continuous;

  int dimension() const { return n_angles + static_cast<int>(continuous.size()); }
  std::vector<double> to_unit(const SearchPoint& p) const;
  SearchPoint from_unit(std::span<const double> u) const;
};

/// Basis states strictly better than f_star in the given sense.
std::vector<std::uint32_t> grover_target_set(std::span<const double> values, double f_star, Sense sense);

/// Final state of the layered circuit. Per layer: phase separator, then the
/// variant's mixer(s): X -> Pauli-X, XY -> ring XY, GM -> Grover only,
/// TM/uTM -> Pauli-X followed by Grover.
QuantumState build_circuit_state(const AlgorithmVariant& variant, std::span<const double> angles,
                                 const PhaseHamiltonian& h, double f_star, Sense sense);

MeasurementHistogram build_and_run_circuit(const AlgorithmVariant& variant, std::span<const double> angles,
                                           const PhaseHamiltonian& h, double f_star, Sense sense,
                                           std::int64_t shots, std::uint64_t seed);

struct ModeObjective {
  std::uint32_t psi_m = 0;
  double f = 0.0;
};

/// Most frequent basis state (ties toward the smaller index) and <psi_m|C|psi_m>.
ModeObjective objective_from_histogram(const MeasurementHistogram& hist, const PhaseHamiltonian& h);

/// Upper confidence bound for minimization: alpha * sigma - mu.
double ucb(double mu, double sigma, double alpha);

struct AnnealerConfig {
  int steps = 50;
  double initial_temperature = 1.0;
  double final_temperature = 1e-3;
  double proposal_stddev = 0.1;  // fraction of each dimension's range

  double cooling_rate() const;
  double temperature(int step) const;
  void validate() const;
};

struct AcquisitionResult {
  std::vector<double> unit_point;
  double value = 0.0;
  bool feasible = true;
};

using AcquisitionFn = std::function<double(std::span<const double> unit_point)>;
using FeasibilityFn = std::function<bool(std::span<const double> unit_point)>;

/// Simulated annealing over the unit cube: Gaussian proposals clipped to the
/// box, Metropolis acceptance, geometric cooling. Infeasible points score
/// `penalty_value`. Returns the best point visited, deterministic in `seed`.
AcquisitionResult anneal(const AcquisitionFn& acquisition, int dimension, const FeasibilityFn& feasible,
                         double penalty_value, const AnnealerConfig& annealer, std::uint64_t seed);

/// UCB maximization on a fitted model over the search space of `spec`.
SearchPoint maximize_acquisition(const GprModel& model, const SearchSpace& space, const ObjectiveSpec& spec,
                                 double alpha, const AnnealerConfig& annealer, std::uint64_t seed);

struct RunConfig {
  int iterations = 10;
  std::int64_t shots = 1024;
  int n_initial = 3;
  double alpha = 1.0;
  AnnealerConfig annealer;
  KernelConfig kernel;
  std::uint64_t seed = 0;
  /// Single-mixer layers at or beyond this index start from zero angles in the
  /// initial design (0 disables padding).
  int pad_initial_from_layer = 0;

  void validate() const;
};

struct IterationRecord {
  int index = 0;
  bool initial = false;
  SearchPoint point;
  MeasurementHistogram histogram;
  std::uint32_t psi_m = 0;
  double f = 0.0;
  KurtosisEstimate kappa;
  bool feasible = true;
  double best_so_far = 0.0;
};

struct RunTrace {
  std::string problem_id;
  std::string variant;
  int depth = 1;
  Sense sense = Sense::Minimize;
  std::uint64_t seed = 0;
  std::vector<IterationRecord> records;
};

/// Thrown when a surrogate refit fails; carries the trace up to the failure.
class RunAborted : public std::runtime_error {
 public:
  RunAborted(const std::string& what, RunTrace partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const RunTrace& partial_trace() const { return partial_; }

 private:
  RunTrace partial_;
};

/// Initial design for one seed; identical across variants for equal seeds
/// (layer i receives the same draws whatever the variant's depth).
std::vector<SearchPoint> initial_design(const AlgorithmVariant& variant, const ObjectiveSpec& spec,
                                        const RunConfig& config);

RunTrace run(const AlgorithmVariant& variant, const ObjectiveSpec& spec, const RunConfig& config);

/// Deterministic stream splitting for (seed, stream, index) triples.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

}  // namespace qaboa
