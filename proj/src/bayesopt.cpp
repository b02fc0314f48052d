#include "qaboa/bayesopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace qaboa {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum Stream : std::uint64_t {
  kInitialAngles = 1,
  kInitialContinuous = 2,
  kMeasurement = 3,
  kAnnealer = 4,
  kHyperparameters = 5,
};

constexpr int kMaxRejectionDraws = 100000;

// Circuit Hamiltonian for the internal minimization problem: maximization
// objectives are negated so that every run minimizes.
PhaseHamiltonian internal_hamiltonian(const ObjectiveSpec& spec, std::span<const double> x_c) {
  auto h = compile_hamiltonian(spec, x_c);
  if (spec.sense == Sense::Minimize) return h;
  if (auto* diag = std::get_if<DiagonalHamiltonian>(&h)) {
    for (double& v : diag->values) v = -v;
    return h;
  }
  return DenseHamiltonian(-std::get<DenseHamiltonian>(h).matrix());
}

double internal_value(double f, Sense sense) { return sense == Sense::Minimize ? f : -f; }

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  // splitmix64 finalizer over a mixed key.
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ stream) ^ index);
}

std::string to_string(MixerKind kind) {
  switch (kind) {
    case MixerKind::X: return "X";
    case MixerKind::XY: return "XY";
    case MixerKind::GM: return "GM";
    case MixerKind::TM: return "TM";
    case MixerKind::UTM: return "uTM";
  }
  return "?";
}

MixerKind parse_mixer_kind(std::string_view name) {
  std::string lowered(name);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const char* suffix : {"-qaboa", "_qaboa"}) {
    const std::string s(suffix);
    if (lowered.size() > s.size() && lowered.ends_with(s)) lowered.resize(lowered.size() - s.size());
  }
  if (lowered == "x") return MixerKind::X;
  if (lowered == "xy") return MixerKind::XY;
  if (lowered == "gm") return MixerKind::GM;
  if (lowered == "tm") return MixerKind::TM;
  if (lowered == "utm") return MixerKind::UTM;
  throw std::invalid_argument("unknown algorithm variant '" + std::string(name) + "'");
}

int AlgorithmVariant::angles_per_layer() const { return two_mixer() ? 3 : 2; }

KernelVariant AlgorithmVariant::kernel_variant() const {
  return kind == MixerKind::UTM ? KernelVariant::QuantumMatern : KernelVariant::Matern;
}

void AlgorithmVariant::validate() const {
  if (depth < 1) throw std::invalid_argument("circuit depth must be >= 1");
}

std::vector<double> SearchSpace::to_unit(const SearchPoint& p) const {
  if (static_cast<int>(p.angles.size()) != n_angles || p.x_c.size() != continuous.size()) {
    throw std::invalid_argument("search point does not match the search space");
  }
  std::vector<double> u;
  u.reserve(static_cast<std::size_t>(dimension()));
  for (double a : p.angles) u.push_back(a / kTwoPi);
  for (std::size_t k = 0; k < continuous.size(); ++k) {
    u.push_back((p.x_c[k] - continuous[k].lower) / continuous[k].span());
  }
  return u;
}

SearchPoint SearchSpace::from_unit(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != dimension()) throw std::invalid_argument("unit point dimension mismatch");
  SearchPoint p;
  p.angles.reserve(static_cast<std::size_t>(n_angles));
  for (int k = 0; k < n_angles; ++k) p.angles.push_back(u[static_cast<std::size_t>(k)] * kTwoPi);
  for (std::size_t k = 0; k < continuous.size(); ++k) {
    const auto& b = continuous[k];
    const double v = b.lower + u[static_cast<std::size_t>(n_angles) + k] * b.span();
    p.x_c.push_back(std::clamp(v, b.lower, b.upper));
  }
  return p;
}

std::vector<std::uint32_t> grover_target_set(std::span<const double> values, double f_star, Sense sense) {
  std::vector<std::uint32_t> targets;
  for (std::size_t z = 0; z < values.size(); ++z) {
    if (strictly_better(values[z], f_star, sense)) targets.push_back(static_cast<std::uint32_t>(z));
  }
  return targets;
}

QuantumState build_circuit_state(const AlgorithmVariant& variant, std::span<const double> angles,
                                 const PhaseHamiltonian& h, double f_star, Sense sense) {
  variant.validate();
  if (static_cast<int>(angles.size()) != variant.angle_count()) {
    throw std::invalid_argument("circuit expects " + std::to_string(variant.angle_count()) + " angles, got " +
                                std::to_string(angles.size()));
  }
  const auto values = basis_values(h);
  const auto dim = values.size();
  int n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  if ((std::size_t{1} << n) != dim) throw std::invalid_argument("Hamiltonian dimension is not a power of two");

  const bool needs_targets = variant.kind == MixerKind::GM || variant.two_mixer();
  const auto targets = needs_targets ? grover_target_set(values, f_star, sense) : std::vector<std::uint32_t>{};

  QuantumState state = init_uniform(n);
  const int stride = variant.angles_per_layer();
  for (int layer = 0; layer < variant.depth; ++layer) {
    const auto* a = angles.data() + static_cast<std::ptrdiff_t>(layer) * stride;
    state = apply_phase(std::move(state), h, a[0]);
    switch (variant.kind) {
      case MixerKind::X: state = apply_x_mixer(std::move(state), a[1]); break;
      case MixerKind::XY: state = apply_xy_mixer(std::move(state), a[1]); break;
      case MixerKind::GM: state = apply_grover_mixer(std::move(state), targets, a[1]); break;
      case MixerKind::TM:
      case MixerKind::UTM:
        state = apply_x_mixer(std::move(state), a[1]);
        state = apply_grover_mixer(std::move(state), targets, a[2]);
        break;
    }
  }
  return state;
}

MeasurementHistogram build_and_run_circuit(const AlgorithmVariant& variant, std::span<const double> angles,
                                           const PhaseHamiltonian& h, double f_star, Sense sense,
                                           std::int64_t shots, std::uint64_t seed) {
  return sample(build_circuit_state(variant, angles, h, f_star, sense), shots, seed);
}

ModeObjective objective_from_histogram(const MeasurementHistogram& hist, const PhaseHamiltonian& h) {
  if (hist.counts.empty()) throw std::invalid_argument("objective_from_histogram: empty histogram");
  // std::map iterates in ascending index order, so strict '>' keeps the smaller index on ties.
  ModeObjective mode{hist.counts.begin()->first, 0.0};
  std::int64_t best_count = hist.counts.begin()->second;
  for (const auto& [z, c] : hist.counts) {
    if (c > best_count) {
      best_count = c;
      mode.psi_m = z;
    }
  }
  const auto values = basis_values(h);
  if (mode.psi_m >= values.size()) throw std::out_of_range("measured state outside the Hamiltonian dimension");
  mode.f = values[mode.psi_m];
  return mode;
}

double ucb(double mu, double sigma, double alpha) { return alpha * sigma - mu; }

double AnnealerConfig::cooling_rate() const {
  if (steps <= 1) return 1.0;
  return std::pow(final_temperature / initial_temperature, 1.0 / static_cast<double>(steps - 1));
}

double AnnealerConfig::temperature(int step) const {
  return initial_temperature * std::pow(cooling_rate(), static_cast<double>(step));
}

void AnnealerConfig::validate() const {
  if (steps < 1) throw std::invalid_argument("annealer steps must be >= 1");
  if (!(initial_temperature > 0.0) || !(final_temperature > 0.0) || final_temperature > initial_temperature) {
    throw std::invalid_argument("annealer temperatures must satisfy 0 < final <= initial");
  }
  if (!(proposal_stddev > 0.0)) throw std::invalid_argument("annealer proposal stddev must be positive");
}

AcquisitionResult anneal(const AcquisitionFn& acquisition, int dimension, const FeasibilityFn& feasible,
                         double penalty_value, const AnnealerConfig& annealer, std::uint64_t seed) {
  annealer.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> step(0.0, annealer.proposal_stddev);

  auto score = [&](std::span<const double> u, bool& ok) {
    ok = !feasible || feasible(u);
    return ok ? acquisition(u) : penalty_value;
  };

  std::vector<double> current(static_cast<std::size_t>(dimension));
  for (double& v : current) v = unit(rng);
  bool current_ok = true;
  double current_value = score(current, current_ok);
  AcquisitionResult best{current, current_value, current_ok};

  const double rate = annealer.cooling_rate();
  double temperature = annealer.initial_temperature;
  std::vector<double> proposal(current.size());
  for (int k = 0; k < annealer.steps; ++k) {
    for (std::size_t d = 0; d < current.size(); ++d) proposal[d] = std::clamp(current[d] + step(rng), 0.0, 1.0);
    bool ok = true;
    const double value = score(proposal, ok);
    const double delta = value - current_value;
    const double u = unit(rng);
    if (delta >= 0.0 || u < std::exp(delta / temperature)) {
      current.swap(proposal);
      current_value = value;
      if (value > best.value) best = {current, value, ok};
    }
    temperature *= rate;
  }
  return best;
}

SearchPoint maximize_acquisition(const GprModel& model, const SearchSpace& space, const ObjectiveSpec& spec,
                                 double alpha, const AnnealerConfig& annealer, std::uint64_t seed) {
  const AcquisitionFn acquisition = [&](std::span<const double> u) {
    const auto p = model.predict_standardized(u);
    return ucb(p.mu, p.sigma, alpha);
  };
  FeasibilityFn feasible;
  if (!spec.constraints.empty()) {
    const std::vector<int> zeros(static_cast<std::size_t>(spec.n_binary), 0);
    feasible = [&space, &spec, zeros](std::span<const double> u) {
      const auto p = space.from_unit(u);
      return spec.feasible(zeros, p.x_c);
    };
  }
  const double penalty = spec.penalty_value.value_or(-std::numeric_limits<double>::max());
  const auto best = anneal(acquisition, space.dimension(), feasible, penalty, annealer, seed);
  return space.from_unit(best.unit_point);
}

void RunConfig::validate() const {
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  if (n_initial < 1) throw std::invalid_argument("n_initial must be >= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (pad_initial_from_layer < 0) throw std::invalid_argument("pad_initial_from_layer must be >= 0");
  annealer.validate();
  kernel.validate();
}

std::vector<SearchPoint> initial_design(const AlgorithmVariant& variant, const ObjectiveSpec& spec,
                                        const RunConfig& config) {
  std::vector<SearchPoint> points;
  const std::vector<int> zeros(static_cast<std::size_t>(spec.n_binary), 0);
  for (int i = 0; i < config.n_initial; ++i) {
    SearchPoint p;
    std::mt19937_64 angle_rng(derive_seed(config.seed, kInitialAngles, static_cast<std::uint64_t>(i)));
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    for (int layer = 0; layer < variant.depth; ++layer) {
      // Every layer consumes a full (gamma, beta, theta) triple so layer i is the
      // same for all variants.
      const double gamma = angle(angle_rng);
      const double beta = angle(angle_rng);
      const double theta = angle(angle_rng);
      const bool padded = !variant.two_mixer() && config.pad_initial_from_layer > 0 &&
                          layer >= config.pad_initial_from_layer;
      if (padded) {
        p.angles.insert(p.angles.end(), {0.0, 0.0});
      } else if (variant.two_mixer()) {
        p.angles.insert(p.angles.end(), {gamma, beta, theta});
      } else {
        p.angles.insert(p.angles.end(), {gamma, beta});
      }
    }

    std::mt19937_64 xc_rng(derive_seed(config.seed, kInitialContinuous, static_cast<std::uint64_t>(i)));
    for (int attempt = 0; attempt < kMaxRejectionDraws; ++attempt) {
      p.x_c.clear();
      for (const auto& b : spec.continuous_bounds) {
        p.x_c.push_back(std::uniform_real_distribution<double>(b.lower, b.upper)(xc_rng));
      }
      if (spec.feasible(zeros, p.x_c)) break;
    }
    points.push_back(std::move(p));
  }
  return points;
}

RunTrace run(const AlgorithmVariant& variant, const ObjectiveSpec& spec, const RunConfig& config) {
  variant.validate();
  config.validate();
  RunTrace trace;
  trace.problem_id = spec.id;
  trace.variant = variant.name();
  trace.depth = variant.depth;
  trace.sense = spec.sense;
  trace.seed = config.seed;

  const SearchSpace space{variant.angle_count(), spec.continuous_bounds};
  KernelConfig kernel = config.kernel;
  kernel.variant = variant.kernel_variant();

  double best_internal = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  std::vector<KurtosisEstimate> kappas;

  auto evaluate = [&](const SearchPoint& point, bool initial) {
    const int index = static_cast<int>(trace.records.size());
    const auto h = internal_hamiltonian(spec, point.x_c);
    // The initial design runs against the sentinel; later circuits target the incumbent.
    const double f_star = initial ? std::numeric_limits<double>::infinity() : best_internal;
    IterationRecord rec;
    rec.index = index;
    rec.initial = initial;
    rec.point = point;
    rec.histogram = build_and_run_circuit(variant, point.angles, h, f_star, Sense::Minimize, config.shots,
                                          derive_seed(config.seed, kMeasurement, static_cast<std::uint64_t>(index)));
    const auto mode = objective_from_histogram(rec.histogram, h);
    rec.psi_m = mode.psi_m;
    rec.f = internal_value(mode.f, spec.sense);
    rec.kappa = kurtosis(rec.histogram);
    rec.feasible = spec.feasible(bits_of(mode.psi_m, spec.n_binary), point.x_c);
    if (rec.feasible && mode.f < best_internal) best_internal = mode.f;
    rec.best_so_far = internal_value(best_internal, spec.sense);

    xs.push_back(space.to_unit(point));
    ys.push_back(mode.f);
    kappas.push_back(rec.kappa);
    trace.records.push_back(std::move(rec));
  };

  auto refit = [&](int step) {
    try {
      return GprModel::fit(xs, ys, kappas, kernel,
                           derive_seed(config.seed, kHyperparameters, static_cast<std::uint64_t>(step)));
    } catch (const std::exception& e) {
      throw RunAborted(std::string("surrogate refit failed at record ") + std::to_string(trace.records.size()) +
                           ": " + e.what(),
                       trace);
    }
  };

  for (const auto& p : initial_design(variant, spec, config)) evaluate(p, true);
  if (config.iterations == 0) return trace;

  GprModel model = refit(0);
  for (int it = 0; it < config.iterations; ++it) {
    const auto next = maximize_acquisition(model, space, spec, config.alpha, config.annealer,
                                           derive_seed(config.seed, kAnnealer, static_cast<std::uint64_t>(it)));
    evaluate(next, false);
    if (it + 1 < config.iterations) model = refit(it + 1);
  }
  return trace;
}

}  // namespace qaboa
