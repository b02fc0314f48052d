#include "qaboa/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include <yaml-cpp/yaml.h>

#include "qaboa/pauli.hpp"

namespace qaboa {

using nlohmann::json;

std::vector<std::string> problem_ids() {
  return {"maxcut-k6",       "wmaxcut-k5-1", "wmaxcut-k5-2",  "wmaxcut-k5-3",   "lattice-protein",
          "heh-plus",        "welded-beam",  "speed-reducer", "pressure-vessel"};
}

ObjectiveSpec problem_by_id(const std::string& id) {
  if (id == "maxcut-k6") return maxcut(complete_graph(6), false, id);
  if (id.rfind("wmaxcut-k5-", 0) == 0) {
    const std::string suffix = id.substr(11);
    if (suffix == "1" || suffix == "2" || suffix == "3") {
      return maxcut(random_weighted_k5(std::stoull(suffix)), true, id);
    }
  }
  if (id == "lattice-protein") return lattice_protein();
  if (id == "heh-plus") return heh_plus();
  if (id == "welded-beam") return welded_beam();
  if (id == "speed-reducer") return speed_reducer();
  if (id == "pressure-vessel") return pressure_vessel();
  throw std::invalid_argument("unknown problem id '" + id + "'");
}

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
  problem_by_id(problem);
  if (variants.empty()) throw std::invalid_argument("experiment needs at least one variant");
  std::set<MixerKind> kinds;
  for (const auto& v : variants) {
    v.validate();
    if (!kinds.insert(v.kind).second) throw std::invalid_argument("duplicate variant " + v.name());
    if (angle_budget > 0 && v.angle_count() != angle_budget) {
      throw std::invalid_argument("variant " + v.name() + " uses " + std::to_string(v.angle_count()) +
                                  " angles, budget is " + std::to_string(angle_budget));
    }
  }
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  run_config(0).validate();
}

RunConfig ExperimentConfig::run_config(int repetition) const {
  RunConfig rc;
  rc.iterations = iterations;
  rc.shots = shots;
  rc.n_initial = n_initial;
  rc.alpha = alpha;
  rc.annealer = annealer;
  rc.kernel = kernel;
  rc.seed = base_seed + static_cast<std::uint64_t>(repetition);
  if (pad_initial_from_layer >= 0) {
    rc.pad_initial_from_layer = pad_initial_from_layer;
  } else {
    int two_mixer_depth = 0;
    for (const auto& v : variants) {
      if (v.two_mixer()) two_mixer_depth = std::max(two_mixer_depth, v.depth);
    }
    rc.pad_initial_from_layer = two_mixer_depth;
  }
  return rc;
}

namespace {

template <typename T>
void read_if(const YAML::Node& node, const char* key, T& out) {
  if (node[key]) out = node[key].as<T>();
}

Bounds read_bounds(const YAML::Node& node, const char* key, Bounds fallback) {
  if (!node[key]) return fallback;
  const auto seq = node[key];
  if (!seq.IsSequence() || seq.size() != 2) {
    throw std::invalid_argument(std::string("config: '") + key + "' must be a [lo, hi] pair");
  }
  return {seq[0].as<double>(), seq[1].as<double>()};
}

ExperimentConfig from_yaml(const YAML::Node& root) {
  ExperimentConfig c;
  if (!root["problem"]) throw std::invalid_argument("config: missing 'problem'");
  c.problem = root["problem"].as<std::string>();
  if (!root["variants"] || !root["variants"].IsSequence()) {
    throw std::invalid_argument("config: 'variants' must be a list");
  }
  for (const auto& v : root["variants"]) {
    AlgorithmVariant variant;
    if (v.IsScalar()) {
      variant.kind = parse_mixer_kind(v.as<std::string>());
      variant.depth = variant.two_mixer() ? 2 : 3;
    } else {
      variant.kind = parse_mixer_kind(v["kind"].as<std::string>());
      variant.depth = v["depth"].as<int>();
    }
    c.variants.push_back(variant);
  }
  read_if(root, "iterations", c.iterations);
  read_if(root, "repetitions", c.repetitions);
  read_if(root, "shots", c.shots);
  read_if(root, "n_initial", c.n_initial);
  read_if(root, "alpha", c.alpha);
  read_if(root, "base_seed", c.base_seed);
  read_if(root, "pad_initial_from_layer", c.pad_initial_from_layer);
  read_if(root, "angle_budget", c.angle_budget);
  if (root["output"]) c.output_dir = root["output"].as<std::string>();
  if (const auto a = root["annealer"]) {
    read_if(a, "steps", c.annealer.steps);
    read_if(a, "initial_temperature", c.annealer.initial_temperature);
    read_if(a, "final_temperature", c.annealer.final_temperature);
    read_if(a, "proposal_stddev", c.annealer.proposal_stddev);
  }
  if (const auto k = root["kernel"]) {
    read_if(k, "nu", c.kernel.nu);
    read_if(k, "length_scale", c.kernel.length_scale);
    read_if(k, "omega", c.kernel.omega);
    read_if(k, "epsilon", c.kernel.epsilon);
    read_if(k, "tune", c.kernel.tune);
    read_if(k, "restarts", c.kernel.restarts);
    c.kernel.length_scale_bounds = read_bounds(k, "length_scale_bounds", c.kernel.length_scale_bounds);
    c.kernel.omega_bounds = read_bounds(k, "omega_bounds", c.kernel.omega_bounds);
  }
  c.validate();
  return c;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& yaml_text) {
  try {
    return from_yaml(YAML::Load(yaml_text));
  } catch (const YAML::Exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str());
}

// ---------------------------------------------------------------------------
// Aggregation

AggregateCurve aggregate(const std::string& variant, const std::vector<RunTrace>& runs) {
  AggregateCurve curve{variant, {}};
  if (runs.empty()) return curve;
  const std::size_t length = runs.front().records.size();
  for (const auto& r : runs) {
    if (r.records.size() != length) throw std::invalid_argument("aggregate: traces differ in length");
  }
  const double n = static_cast<double>(runs.size());
  for (std::size_t t = 0; t < length; ++t) {
    double sum = 0.0;
    for (const auto& r : runs) sum += r.records[t].best_so_far;
    const double mean = sum / n;
    double sq = 0.0;
    for (const auto& r : runs) {
      const double d = r.records[t].best_so_far - mean;
      sq += d * d;
    }
    curve.points.push_back({static_cast<int>(t), mean, std::sqrt(sq / n), static_cast<int>(runs.size())});
  }
  return curve;
}

void write_aggregate_csv(std::ostream& out, const AggregateCurve& curve) {
  out << "iteration,variant,mean_best,std_best,n_runs\n";
  char buf[64];
  for (const auto& p : curve.points) {
    out << p.iteration << ',' << curve.variant << ',';
    std::snprintf(buf, sizeof buf, "%.17g", p.mean_best);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", p.std_best);
    out << buf << ',' << p.n_runs << '\n';
  }
}

std::string aggregate_csv(const AggregateCurve& curve) {
  std::ostringstream out;
  write_aggregate_csv(out, curve);
  return out.str();
}

// ---------------------------------------------------------------------------
// Trace files

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or(const json& j, double fallback) { return j.is_null() ? fallback : j.get<double>(); }

Sense parse_sense(const std::string& s) {
  if (s == "minimize") return Sense::Minimize;
  if (s == "maximize") return Sense::Maximize;
  throw std::invalid_argument("unknown sense '" + s + "'");
}

}  // namespace

void write_trace(std::ostream& out, const RunTrace& trace) {
  const json header = {{"type", "header"},
                       {"problem", trace.problem_id},
                       {"variant", trace.variant},
                       {"depth", trace.depth},
                       {"sense", to_string(trace.sense)},
                       {"seed", trace.seed},
                       {"records", trace.records.size()}};
  out << header.dump() << '\n';
  for (const auto& r : trace.records) {
    json counts = json::array();
    for (const auto& [z, c] : r.histogram.counts) counts.push_back({z, c});
    const json rec = {{"type", "iteration"},
                      {"index", r.index},
                      {"initial", r.initial},
                      {"angles", r.point.angles},
                      {"x_c", r.point.x_c},
                      {"shots", r.histogram.shots},
                      {"counts", counts},
                      {"psi_m", r.psi_m},
                      {"f", r.f},
                      {"kappa", r.kappa.kappa},
                      {"kappa_degenerate", r.kappa.degenerate},
                      {"feasible", r.feasible},
                      {"best_so_far", number_or_null(r.best_so_far)}};
    out << rec.dump() << '\n';
  }
}

RunTrace read_trace(std::istream& in) {
  RunTrace trace;
  std::string line;
  bool header_seen = false;
  std::size_t expected = 0;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error("trace line " + std::to_string(line_no) + ": " + e.what());
    }
    const auto type = j.at("type").get<std::string>();
    if (type == "header") {
      trace.problem_id = j.at("problem").get<std::string>();
      trace.variant = j.at("variant").get<std::string>();
      trace.depth = j.at("depth").get<int>();
      trace.sense = parse_sense(j.at("sense").get<std::string>());
      trace.seed = j.at("seed").get<std::uint64_t>();
      expected = j.at("records").get<std::size_t>();
      header_seen = true;
      continue;
    }
    if (!header_seen) throw std::runtime_error("trace: record before header");
    IterationRecord r;
    r.index = j.at("index").get<int>();
    r.initial = j.at("initial").get<bool>();
    r.point.angles = j.at("angles").get<std::vector<double>>();
    r.point.x_c = j.at("x_c").get<std::vector<double>>();
    r.histogram.shots = j.at("shots").get<std::int64_t>();
    for (const auto& pair : j.at("counts")) {
      r.histogram.counts[pair.at(0).get<std::uint32_t>()] = pair.at(1).get<std::int64_t>();
    }
    r.psi_m = j.at("psi_m").get<std::uint32_t>();
    r.f = j.at("f").get<double>();
    r.kappa = {j.at("kappa").get<double>(), j.at("kappa_degenerate").get<bool>()};
    r.feasible = j.at("feasible").get<bool>();
    r.best_so_far = number_or(j.at("best_so_far"), worst_value(trace.sense));
    trace.records.push_back(std::move(r));
  }
  if (!header_seen) throw std::runtime_error("trace: missing header");
  if (trace.records.size() != expected) throw std::runtime_error("trace: record count does not match header");
  return trace;
}

void save_trace(const std::filesystem::path& path, const RunTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace " + path.string());
  write_trace(out, trace);
}

RunTrace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read trace " + path.string());
  return read_trace(in);
}

std::string trace_file_name(const RunTrace& trace) {
  return trace.problem_id + "_" + trace.variant + "_seed" + std::to_string(trace.seed) + ".jsonl";
}

std::string aggregate_file_name(const std::string& variant) { return "aggregate_" + variant + ".csv"; }

// ---------------------------------------------------------------------------
// Experiment runner

namespace {

void write_outputs(const std::filesystem::path& dir, const std::vector<RunTrace>& traces,
                   const std::vector<AggregateCurve>& curves) {
  const auto trace_dir = dir / "traces";
  std::filesystem::create_directories(trace_dir);
  for (const auto& t : traces) save_trace(trace_dir / trace_file_name(t), t);
  for (const auto& c : curves) {
    std::ofstream out(dir / aggregate_file_name(c.variant), std::ios::binary);
    if (!out) throw std::runtime_error("cannot write aggregate CSV in " + dir.string());
    write_aggregate_csv(out, c);
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, int jobs, bool write_files) {
  config.validate();
  if (write_files) {
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec || !std::filesystem::is_directory(config.output_dir)) {
      throw std::runtime_error("output directory " + config.output_dir.string() + " is not writable");
    }
  }
  const ObjectiveSpec spec = problem_by_id(config.problem);
  const std::size_t n_tasks = config.variants.size() * static_cast<std::size_t>(config.repetitions);
  std::vector<RunTrace> traces(n_tasks);
  std::vector<std::exception_ptr> errors(n_tasks);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t task = next++; task < n_tasks; task = next++) {
      const auto& variant = config.variants[task / static_cast<std::size_t>(config.repetitions)];
      const int rep = static_cast<int>(task % static_cast<std::size_t>(config.repetitions));
      try {
        traces[task] = run(variant, spec, config.run_config(rep));
      } catch (...) {
        errors[task] = std::current_exception();
      }
    }
  };
  const int n_workers = std::max(1, std::min<int>(jobs, static_cast<int>(n_tasks)));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentResult result;
  for (std::size_t v = 0; v < config.variants.size(); ++v) {
    const auto first = traces.begin() + static_cast<std::ptrdiff_t>(v * static_cast<std::size_t>(config.repetitions));
    std::vector<RunTrace> runs(first, first + config.repetitions);
    result.curves.push_back(aggregate(config.variants[v].name(), runs));
  }
  result.traces = std::move(traces);
  if (write_files) write_outputs(config.output_dir, result.traces, result.curves);
  return result;
}

std::vector<AggregateCurve> aggregate_directory(const std::filesystem::path& trace_dir,
                                                const std::filesystem::path& output_dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(trace_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  if (files.empty()) throw std::runtime_error("no trace files in " + trace_dir.string());
  std::sort(files.begin(), files.end());
  std::map<std::string, std::vector<RunTrace>> by_variant;
  for (const auto& f : files) {
    auto t = load_trace(f);
    by_variant[t.variant].push_back(std::move(t));
  }
  std::vector<AggregateCurve> curves;
  std::filesystem::create_directories(output_dir);
  for (auto& [variant, runs] : by_variant) {
    std::sort(runs.begin(), runs.end(), [](const RunTrace& a, const RunTrace& b) { return a.seed < b.seed; });
    curves.push_back(aggregate(variant, runs));
    std::ofstream out(output_dir / aggregate_file_name(variant), std::ios::binary);
    if (!out) throw std::runtime_error("cannot write aggregate CSV in " + output_dir.string());
    write_aggregate_csv(out, curves.back());
  }
  return curves;
}

// ---------------------------------------------------------------------------
// verify

namespace {

// The base objectives evaluated at decoded discrete levels, bypassing the selector expansion.
std::optional<std::function<double(std::span<const int>, std::span<const double>)>> direct_objective(
    const std::string& id) {
  if (id == "welded-beam") {
    return [](std::span<const int> q, std::span<const double> x) {
      return welded_beam_cost(q[0], 1 + 2 * q[1] + q[2], x[0], x[1], x[2], x[3]);
    };
  }
  if (id == "speed-reducer") {
    return [](std::span<const int> q, std::span<const double> x) {
      const double x3 = 15 + 8 * q[0] + 4 * q[1] + 2 * q[2] + q[3];
      return speed_reducer_weight(x[0], x[1], x3, x[2], x[3], x[4], x[5]);
    };
  }
  if (id == "pressure-vessel") {
    return [](std::span<const int> q, std::span<const double> x) {
      return pressure_vessel_cost(3 + 2 * q[0] + q[1], 3 + 2 * q[2] + q[3], x[0], x[1]);
    };
  }
  return std::nullopt;
}

}  // namespace

VerifyReport verify(const std::string& problem_id, int selector_samples, std::uint64_t seed) {
  const auto spec = problem_by_id(problem_id);
  VerifyReport report;
  report.problem = problem_id;
  for (const auto& b : spec.continuous_bounds) report.x_c.push_back(0.5 * (b.lower + b.upper));
  report.optimum = brute_force_optimum(spec, report.x_c);
  report.optimizers = optimal_states(spec, report.x_c);

  if (const auto direct = direct_objective(problem_id)) {
    report.has_selector_check = true;
    report.selector_patterns = 1 << spec.n_binary;
    report.selector_samples = selector_samples;
    std::mt19937_64 rng(seed);
    for (int s = 0; s < selector_samples; ++s) {
      std::vector<double> x;
      for (const auto& b : spec.continuous_bounds) x.push_back(std::uniform_real_distribution<double>(b.lower, b.upper)(rng));
      for (std::uint32_t z = 0; z < (1u << spec.n_binary); ++z) {
        const auto bits = bits_of(z, spec.n_binary);
        const double expanded = spec.evaluate(bits, x);
        const double base = (*direct)(bits, x);
        const double rel = std::abs(expanded - base) / std::max(1.0, std::abs(base));
        report.selector_max_relative_error = std::max(report.selector_max_relative_error, rel);
      }
    }
    report.selector_pass = report.selector_max_relative_error <= 1e-12;
  }
  return report;
}

void print_verify_report(std::ostream& out, const VerifyReport& report) {
  const auto spec = problem_by_id(report.problem);
  out << "problem: " << report.problem << " (" << to_string(spec.sense) << ", " << spec.n_binary
      << " qubits)\n";
  if (!report.x_c.empty()) {
    out << "x_c (bounds midpoint):";
    for (double v : report.x_c) out << ' ' << v;
    out << '\n';
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", report.optimum.best_value);
  out << "optimum: " << buf << '\n';
  out << "optimizers:";
  for (auto z : report.optimizers) {
    out << ' ';
    for (int b : bits_of(z, spec.n_binary)) out << b;
  }
  out << '\n';
  if (report.has_selector_check) {
    std::snprintf(buf, sizeof buf, "%.3g", report.selector_max_relative_error);
    out << "selector equivalence: " << (report.selector_pass ? "PASS" : "FAIL") << " over "
        << report.selector_patterns << " patterns x " << report.selector_samples
        << " x_c draws (max relative error " << buf << ")\n";
  }
}

}  // namespace qaboa
