// Command-line front end: run experiments, verify problem encodings, list
// problems and rebuild aggregate CSVs from traces.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qaboa/harness.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& out, std::optional<std::uint64_t> seed, int jobs) {
  auto config = qaboa::load_experiment_config(config_path);
  if (!out.empty()) config.output_dir = out;
  if (seed) config.base_seed = *seed;
  std::cerr << "running " << config.problem << ": " << config.variants.size() << " variants x "
            << config.repetitions << " repetitions, " << config.iterations << " iterations\n";
  const auto result = qaboa::run_experiment(config, jobs, true);
  for (const auto& curve : result.curves) {
    const auto& last = curve.points.back();
    std::cout << curve.variant << ": final mean best " << last.mean_best << " (std " << last.std_best << ", "
              << last.n_runs << " runs)\n";
  }
  std::cout << "wrote " << result.traces.size() << " traces to " << (config.output_dir / "traces").string()
            << '\n';
  return 0;
}

int cmd_verify(const std::string& id) {
  const auto report = qaboa::verify(id);
  qaboa::print_verify_report(std::cout, report);
  return report.selector_pass ? 0 : 1;
}

int cmd_list() {
  for (const auto& id : qaboa::problem_ids()) {
    const auto spec = qaboa::problem_by_id(id);
    std::cout << id << "\t" << spec.n_binary << " qubits\t" << spec.continuous_bounds.size() << " continuous\t"
              << qaboa::to_string(spec.sense) << '\n';
  }
  return 0;
}

int cmd_aggregate(const std::string& trace_dir, const std::string& out) {
  const auto dir = out.empty() ? std::filesystem::path(trace_dir) : std::filesystem::path(out);
  const auto curves = qaboa::aggregate_directory(trace_dir, dir);
  for (const auto& c : curves) {
    std::cout << (dir / qaboa::aggregate_file_name(c.variant)).string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian-optimized QAOA experiment runner"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment from a YAML config");
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int jobs = 1;
  run->add_option("--config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  auto* seed_opt = run->add_option("--seed", seed, "Base seed (overrides the config)");
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Brute-force optimum and encoding checks for a problem");
  std::string problem;
  verify->add_option("problem-id", problem)->required();

  app.add_subcommand("list-problems", "List the registered problems");

  auto* agg = app.add_subcommand("aggregate", "Rebuild aggregate CSVs from trace files");
  std::string trace_dir;
  std::string agg_out;
  agg->add_option("trace-dir", trace_dir)->required()->check(CLI::ExistingDirectory);
  agg->add_option("--out", agg_out, "Directory for the CSVs (default: the trace directory)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      return cmd_run(config_path, out_dir, *seed_opt ? std::optional<std::uint64_t>(seed) : std::nullopt, jobs);
    }
    if (*verify) return cmd_verify(problem);
    if (app.got_subcommand("list-problems")) return cmd_list();
    if (*agg) return cmd_aggregate(trace_dir, agg_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
