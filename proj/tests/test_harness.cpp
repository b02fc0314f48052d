#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "qaboa/harness.hpp"

using namespace qaboa;

namespace {

const char* kSmallConfig = R"(
problem: lattice-protein
variants:
  - {kind: GM, depth: 3}
  - {kind: uTM, depth: 2}
angle_budget: 6
repetitions: 3
iterations: 4
n_initial: 3
shots: 128
base_seed: 40
annealer:
  steps: 100
kernel:
  nu: 0.5
  restarts: 2
)";

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("qaboa_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Parse an aggregate CSV back into rows of fields.
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    rows.push_back(fields);
  }
  return rows;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_experiment_config(kSmallConfig);
  CHECK(c.problem == "lattice-protein");
  REQUIRE(c.variants.size() == 2);
  CHECK(c.variants[1].kind == MixerKind::UTM);
  CHECK(c.repetitions == 3);
  CHECK(c.annealer.steps == 100);
  CHECK(c.kernel.restarts == 2);
  CHECK(c.run_config(2).seed == 42);
  CHECK(c.run_config(0).pad_initial_from_layer == 2);

  CHECK_THROWS_WITH(parse_experiment_config("problem: nope\nvariants: [GM]\n"), doctest::Contains("nope"));
  CHECK_THROWS_WITH(parse_experiment_config("problem: maxcut-k6\nvariants:\n  - {kind: GM, depth: 2}\nangle_budget: 6\n"),
                    doctest::Contains("budget"));
  CHECK_THROWS(parse_experiment_config("problem: maxcut-k6\nvariants: [GM]\nrepetitions: 0\n"));
  CHECK_THROWS(parse_experiment_config("problem: maxcut-k6\nvariants: [GM]\niterations: -1\n"));
  CHECK_THROWS(parse_experiment_config("problem: maxcut-k6\n"));
  CHECK_THROWS(parse_experiment_config("problem: [unclosed\n"));
}

TEST_CASE("bundled configs load and respect the angle budget") {
  const std::filesystem::path dir = QABOA_CONFIG_DIR;
  int count = 0;
  for (const auto& id : problem_ids()) {
    const auto c = load_experiment_config(dir / (id + ".yaml"));
    CHECK(c.problem == id);
    CHECK(c.variants.size() == 5);
    for (const auto& v : c.variants) CHECK(v.angle_count() == 6);
    ++count;
  }
  CHECK(count == 9);
}

TEST_CASE("trace files round-trip") {
  auto config = parse_experiment_config(kSmallConfig);
  config.problem = "pressure-vessel";
  config.repetitions = 1;
  const auto result = run_experiment(config, 1, false);
  for (const auto& t : result.traces) {
    std::stringstream buf;
    write_trace(buf, t);
    const auto back = read_trace(buf);
    CHECK(back.problem_id == t.problem_id);
    CHECK(back.variant == t.variant);
    CHECK(back.depth == t.depth);
    CHECK(back.sense == t.sense);
    CHECK(back.seed == t.seed);
    REQUIRE(back.records.size() == t.records.size());
    for (std::size_t i = 0; i < t.records.size(); ++i) {
      const auto& a = t.records[i];
      const auto& b = back.records[i];
      CHECK(a.index == b.index);
      CHECK(a.initial == b.initial);
      CHECK(a.point.angles == b.point.angles);
      CHECK(a.point.x_c == b.point.x_c);
      CHECK(a.histogram.counts == b.histogram.counts);
      CHECK(a.histogram.shots == b.histogram.shots);
      CHECK(a.psi_m == b.psi_m);
      CHECK(a.f == b.f);
      CHECK(a.kappa.kappa == b.kappa.kappa);
      CHECK(a.kappa.degenerate == b.kappa.degenerate);
      CHECK(a.feasible == b.feasible);
      CHECK((a.best_so_far == b.best_so_far || (std::isinf(a.best_so_far) && std::isinf(b.best_so_far))));
    }
  }
  std::stringstream bad("{\"type\":\"iteration\"}\n");
  CHECK_THROWS(read_trace(bad));
}

TEST_CASE("experiment outputs and aggregation") {
  auto config = parse_experiment_config(kSmallConfig);
  const auto dir = fresh_dir("experiment");
  config.output_dir = dir;
  const auto result = run_experiment(config, 2, true);
  REQUIRE(result.traces.size() == 6);
  REQUIRE(result.curves.size() == 2);

  for (const auto& curve : result.curves) {
    CHECK(curve.points.size() == 7);  // n_initial + iterations
    const auto text = slurp(dir / aggregate_file_name(curve.variant));
    CHECK(text == aggregate_csv(curve));
    const auto rows = csv_rows(text);
    CHECK(rows[0] == std::vector<std::string>{"iteration", "variant", "mean_best", "std_best", "n_runs"});

    // Independent recomputation from the trace files on disk.
    std::vector<RunTrace> runs;
    for (int rep = 0; rep < 3; ++rep) {
      RunTrace key;
      key.problem_id = config.problem;
      key.variant = curve.variant;
      key.seed = config.base_seed + static_cast<std::uint64_t>(rep);
      runs.push_back(load_trace(dir / "traces" / trace_file_name(key)));
    }
    for (std::size_t t = 0; t < curve.points.size(); ++t) {
      double mean = 0.0;
      for (const auto& r : runs) mean += r.records[t].best_so_far / 3.0;
      double var = 0.0;
      for (const auto& r : runs) var += (r.records[t].best_so_far - mean) * (r.records[t].best_so_far - mean) / 3.0;
      CHECK(std::abs(curve.points[t].mean_best - mean) < 1e-12);
      CHECK(std::abs(curve.points[t].std_best - std::sqrt(var)) < 1e-12);
      CHECK(curve.points[t].std_best >= 0.0);
      CHECK(curve.points[t].n_runs == 3);
      CHECK(std::stod(rows[t + 1][2]) == curve.points[t].mean_best);
    }
  }

  const auto out = fresh_dir("reaggregate");
  const auto rebuilt = aggregate_directory(dir / "traces", out);
  REQUIRE(rebuilt.size() == 2);
  for (const auto& c : result.curves) CHECK(slurp(out / aggregate_file_name(c.variant)) == aggregate_csv(c));
}

TEST_CASE("single repetition has zero spread") {
  auto config = parse_experiment_config(kSmallConfig);
  config.repetitions = 1;
  const auto result = run_experiment(config, 1, false);
  for (std::size_t v = 0; v < result.curves.size(); ++v) {
    for (std::size_t t = 0; t < result.curves[v].points.size(); ++t) {
      CHECK(result.curves[v].points[t].std_best == 0.0);
      CHECK(result.curves[v].points[t].mean_best == result.traces[v].records[t].best_so_far);
    }
  }
}

TEST_CASE("reruns and thread counts give byte-identical aggregates") {
  auto config = parse_experiment_config(kSmallConfig);
  const auto a = run_experiment(config, 1, false);
  const auto b = run_experiment(config, 3, false);
  for (std::size_t v = 0; v < a.curves.size(); ++v) CHECK(aggregate_csv(a.curves[v]) == aggregate_csv(b.curves[v]));
}

TEST_CASE("unwritable output is reported") {
  auto config = parse_experiment_config(kSmallConfig);
  const auto dir = fresh_dir("blocked");
  const auto file = dir / "file";
  std::ofstream(file) << "x";
  config.output_dir = file / "sub";
  CHECK_THROWS(run_experiment(config, 1, true));
}

TEST_CASE("verify") {
  const auto k6 = verify("maxcut-k6");
  CHECK(k6.optimum.best_value == 9.0);
  CHECK_FALSE(k6.has_selector_check);
  const auto lattice = verify("lattice-protein");
  CHECK(lattice.optimum.best_value == -6.0);
  CHECK(lattice.optimizers == std::vector<std::uint32_t>{11});

  const auto beam = verify("welded-beam");
  CHECK(beam.has_selector_check);
  CHECK(beam.selector_patterns == 8);
  CHECK(beam.selector_samples == 100);
  CHECK(beam.selector_pass);
  std::ostringstream out;
  print_verify_report(out, beam);
  CHECK(out.str().find("PASS over 8 patterns x 100") != std::string::npos);

  for (const auto& id : {"speed-reducer", "pressure-vessel"}) {
    const auto r = verify(id);
    CHECK(r.selector_patterns == 16);
    CHECK(r.selector_pass);
  }
}
