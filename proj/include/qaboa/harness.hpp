#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qaboa/bayesopt.hpp"
#include "qaboa/problems.hpp"

namespace qaboa {

/// Problem ids: maxcut-k6, wmaxcut-k5-{1,2,3}, lattice-protein, heh-plus,
/// welded-beam, speed-reducer, pressure-vessel.
std::vector<std::string> problem_ids();
ObjectiveSpec problem_by_id(const std::string& id);

struct ExperimentConfig {
  std::string problem;
  std::vector<AlgorithmVariant> variants;
  int iterations = 10;
  int repetitions = 1;
  std::int64_t shots = 1024;
  int n_initial = 3;
  double alpha = 1.0;
  AnnealerConfig annealer;
  KernelConfig kernel;
  std::uint64_t base_seed = 0;
  /// -1 pads single-mixer layers past the two-mixer depth (when both kinds are present).
  int pad_initial_from_layer = -1;
  /// When > 0, every variant must use exactly this many rotation angles.
  int angle_budget = 0;
  std::filesystem::path output_dir = "results";

  void validate() const;
  RunConfig run_config(int repetition) const;
};

ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig parse_experiment_config(const std::string& yaml_text);

struct AggregatePoint {
  int iteration = 0;
  double mean_best = 0.0;
  double std_best = 0.0;
  int n_runs = 0;
};

/// Mean and population standard deviation of best-so-far per record index.
struct AggregateCurve {
  std::string variant;
  std::vector<AggregatePoint> points;
};

AggregateCurve aggregate(const std::string& variant, const std::vector<RunTrace>& runs);

void write_aggregate_csv(std::ostream& out, const AggregateCurve& curve);
std::string aggregate_csv(const AggregateCurve& curve);

/// Line-delimited JSON: one header record, then one record per evaluation.
void write_trace(std::ostream& out, const RunTrace& trace);
RunTrace read_trace(std::istream& in);
void save_trace(const std::filesystem::path& path, const RunTrace& trace);
RunTrace load_trace(const std::filesystem::path& path);

std::string trace_file_name(const RunTrace& trace);
std::string aggregate_file_name(const std::string& variant);

struct ExperimentResult {
  std::vector<RunTrace> traces;  // variant-major, repetition-minor
  std::vector<AggregateCurve> curves;
};

/// Runs repetitions x variants on a bounded worker pool, then writes one trace
/// per run under <output_dir>/traces and one aggregate CSV per variant.
ExperimentResult run_experiment(const ExperimentConfig& config, int jobs = 1, bool write_files = true);

/// Rebuilds aggregate CSVs from every trace file in `trace_dir`.
std::vector<AggregateCurve> aggregate_directory(const std::filesystem::path& trace_dir,
                                                const std::filesystem::path& output_dir);

struct VerifyReport {
  std::string problem;
  std::vector<double> x_c;
  Optimum optimum;
  std::vector<std::uint32_t> optimizers;
  bool has_selector_check = false;
  int selector_patterns = 0;
  int selector_samples = 0;
  double selector_max_relative_error = 0.0;
  bool selector_pass = true;
};

/// Brute-force optimum at the midpoint of the continuous bounds, plus the
/// selector-expansion check for the mixed-integer problems.
VerifyReport verify(const std::string& problem_id, int selector_samples = 100, std::uint64_t seed = 7);
void print_verify_report(std::ostream& out, const VerifyReport& report);

}  // namespace qaboa
