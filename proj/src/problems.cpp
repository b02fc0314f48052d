#include "qaboa/problems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

namespace qaboa {

const char* to_string(Sense sense) { return sense == Sense::Minimize ? "minimize" : "maximize"; }

bool strictly_better(double a, double b, Sense sense) {
  return sense == Sense::Minimize ? a < b : a > b;
}

double worst_value(Sense sense) {
  return sense == Sense::Minimize ? std::numeric_limits<double>::infinity()
                                  : -std::numeric_limits<double>::infinity();
}

bool ObjectiveSpec::feasible(std::span<const int> bits, std::span<const double> x_c) const {
  return std::all_of(constraints.begin(), constraints.end(),
                     [&](const ConstraintFn& g) { return !(g(bits, x_c) > 0.0); });
}

void ObjectiveSpec::check_bounds(std::span<const double> x_c) const {
  if (x_c.size() != continuous_bounds.size()) {
    throw std::invalid_argument(id + ": expected " + std::to_string(continuous_bounds.size()) +
                                " continuous variables, got " + std::to_string(x_c.size()));
  }
  for (std::size_t k = 0; k < x_c.size(); ++k) {
    const auto& b = continuous_bounds[k];
    if (!(x_c[k] >= b.lower && x_c[k] <= b.upper)) {
      throw std::out_of_range(id + ": continuous variable " + std::to_string(k) + " = " +
                              std::to_string(x_c[k]) + " outside [" + std::to_string(b.lower) +
                              ", " + std::to_string(b.upper) + "]");
    }
  }
}

void WeightedGraph::validate() const {
  std::set<std::pair<int, int>> seen;
  for (const auto& e : edges) {
    if (e.i == e.j) throw std::invalid_argument("graph has a self loop");
    if (e.i < 0 || e.j < 0 || e.i >= n_vertices || e.j >= n_vertices) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (!std::isfinite(e.weight)) throw std::invalid_argument("edge weight must be finite");
    if (!seen.insert(std::minmax(e.i, e.j)).second) throw std::invalid_argument("duplicate edge");
  }
}

WeightedGraph complete_graph(int n_vertices) {
  WeightedGraph g{n_vertices, {}};
  for (int i = 0; i < n_vertices; ++i) {
    for (int j = i + 1; j < n_vertices; ++j) g.edges.push_back({i, j, 1.0});
  }
  return g;
}

ObjectiveSpec maxcut(const WeightedGraph& graph, bool weighted, std::string id) {
  graph.validate();
  if (graph.n_vertices < 1 || graph.n_vertices > kMaxQubits) {
    throw std::invalid_argument("maxcut: vertex count must be in [1, 10]");
  }
  ObjectiveSpec spec;
  spec.id = std::move(id);
  spec.n_binary = graph.n_vertices;
  spec.sense = Sense::Maximize;
  spec.evaluate = [edges = graph.edges, weighted](std::span<const int> q, std::span<const double>) {
    double cut = 0.0;
    for (const auto& e : edges) {
      const double w = weighted ? e.weight : 1.0;
      const int qi = q[static_cast<std::size_t>(e.i)];
      const int qj = q[static_cast<std::size_t>(e.j)];
      cut += w * (qi + qj - 2 * qi * qj);
    }
    return cut;
  };
  return spec;
}

WeightedGraph random_weighted_k5(std::uint64_t seed) {
  WeightedGraph g = complete_graph(5);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(0.1, 10.0);
  for (auto& e : g.edges) e.weight = weight(rng);
  return g;
}

namespace {

struct Monomial {
  int coefficient;
  std::uint8_t mask;  // bit k set <=> q_{k+1} present
};

constexpr std::uint8_t m(std::initializer_list<int> vars) {
  std::uint8_t mask = 0;
  for (int v : vars) mask |= static_cast<std::uint8_t>(1u << (v - 1));
  return mask;
}

// PSVKMA lattice protein energy (PSVK sub-sequence, six free folding bits).
const std::array<Monomial, 47> kLatticeTerms = {{
    {-1, m({1})},          {15, m({1, 2})},          {4, m({2, 3})},
    {-6, m({1, 2, 3})},    {4, m({1, 4})},           {-15, m({1, 2, 4})},
    {15, m({3, 4})},       {-6, m({1, 3, 4})},       {-15, m({2, 3, 4})},
    {28, m({1, 2, 3, 4})}, {-4, m({2, 5})},          {2, m({1, 2, 5})},
    {2, m({2, 3, 5})},     {4, m({1, 2, 3, 5})},     {7, m({4, 5})},
    {7, m({5, 6})},        {2, m({1, 4, 5})},        {4, m({2, 4, 5})},
    {9, m({1, 2, 4, 5})},  {-20, m({3, 4, 5})},      {4, m({1, 3, 4, 5})},
    {9, m({2, 3, 4, 5})},  {-37, m({1, 2, 3, 4, 5})}, {-4, m({1, 6})},
    {4, m({1, 2, 6})},     {7, m({3, 6})},           {2, m({1, 3, 6})},
    {4, m({2, 3, 6})},     {9, m({1, 2, 3, 6})},     {4, m({1, 4, 6})},
    {-18, m({3, 4, 6})},   {9, m({1, 3, 4, 6})},     {-33, m({1, 2, 3, 4, 6})},
    {2, m({1, 5, 6})},     {4, m({2, 5, 6})},        {-20, m({3, 5, 6})},
    {9, m({1, 2, 5, 6})},  {4, m({1, 3, 5, 6})},     {9, m({2, 3, 5, 6})},
    {-37, m({1, 2, 3, 5, 6})}, {-18, m({4, 5, 6})},  {9, m({1, 4, 5, 6})},
    {-33, m({1, 2, 4, 5, 6})}, {53, m({3, 4, 5, 6})}, {-37, m({1, 3, 4, 5, 6})},
    {-33, m({2, 3, 4, 5, 6})}, {99, m({1, 2, 3, 4, 5, 6})},
}};

// Welding material (C1 weld cost, C2 bar cost) per cubic inch for m = 1..4.
constexpr std::array<std::array<double, 2>, 4> kMaterialCost = {{
    {0.1047, 0.0481},  // steel
    {0.0489, 0.0224},  // cast iron
    {0.5235, 0.2405},  // aluminum
    {0.5584, 0.2566},  // brass
}};

constexpr double kBeamLength = 14.0;

}  // namespace

ObjectiveSpec lattice_protein() {
  ObjectiveSpec spec;
  spec.id = "lattice-protein";
  spec.n_binary = 6;
  spec.sense = Sense::Minimize;
  spec.evaluate = [](std::span<const int> q, std::span<const double>) {
    std::uint8_t present = 0;
    for (std::size_t k = 0; k < 6; ++k) {
      if (q[k]) present |= static_cast<std::uint8_t>(1u << k);
    }
    int energy = 0;
    for (const auto& term : kLatticeTerms) {
      if ((term.mask & present) == term.mask) energy += term.coefficient;
    }
    return static_cast<double>(energy);
  };
  return spec;
}

double selector_expansion(std::span<const int> bits,
                          const std::function<double(std::uint32_t pattern)>& base) {
  const std::size_t n = bits.size();
  double total = 0.0;
  for (std::uint32_t pattern = 0; pattern < (1u << n); ++pattern) {
    double weight = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      const int want = static_cast<int>((pattern >> (n - 1 - k)) & 1u);
      weight *= want ? bits[k] : (1 - bits[k]);
    }
    if (weight != 0.0) total += weight * base(pattern);
  }
  return total;
}

double welded_beam_cost(int w, int m, double h, double l, double t, double b) {
  if (m < 1 || m > 4 || (w != 0 && w != 1)) throw std::invalid_argument("welded beam: bad discrete choice");
  const auto& [c1, c2] = kMaterialCost[static_cast<std::size_t>(m - 1)];
  return (1.0 + c1) * (w * t + l) * h * h + c2 * t * b * (kBeamLength + l);
}

ObjectiveSpec welded_beam() {
  ObjectiveSpec spec;
  spec.id = "welded-beam";
  spec.n_binary = 3;
  spec.sense = Sense::Minimize;
  spec.continuous_bounds = {{0.0625, 2.0}, {0.1, 10.0}, {2.0, 20.0}, {0.0625, 2.0}};
  // q1 selects the weld type, q2 q3 the material (m = 1 + 2 q2 + q3).
  spec.evaluate = [](std::span<const int> q, std::span<const double> x) {
    return selector_expansion(q, [&](std::uint32_t pattern) {
      const int w = static_cast<int>(pattern >> 2);
      const int material = 1 + static_cast<int>(pattern & 3u);
      return welded_beam_cost(w, material, x[0], x[1], x[2], x[3]);
    });
  };
  // Buckling: b - h >= 0.
  spec.constraints.push_back([](std::span<const int>, std::span<const double> x) { return x[0] - x[3]; });
  spec.penalty_value = -100000.0;
  return spec;
}

double speed_reducer_weight(double x1, double x2, double x3, double x4, double x5, double x6, double x7) {
  return 0.7854 * x1 * x2 * x2 * (3.3333 * x3 * x3 + 14.9334 * x3 - 43.0934) -
         1.508 * x1 * (x6 * x6 + x7 * x7) + 7.4777 * (x6 * x6 * x6 + x7 * x7 * x7) +
         0.7854 * (x4 * x6 * x6 + x5 * x7 * x7);
}

ObjectiveSpec speed_reducer() {
  ObjectiveSpec spec;
  spec.id = "speed-reducer";
  spec.n_binary = 4;
  spec.sense = Sense::Minimize;
  // x_c = (x1, x2, x4, x5, x6, x7); x3 = 15 + q1q2q3q4 read as a binary number.
  spec.continuous_bounds = {{2.6, 3.6}, {0.7, 0.8}, {7.3, 8.3}, {7.8, 8.3}, {2.9, 3.9}, {5.0, 5.5}};
  spec.evaluate = [](std::span<const int> q, std::span<const double> x) {
    return selector_expansion(q, [&](std::uint32_t pattern) {
      return speed_reducer_weight(x[0], x[1], 15.0 + pattern, x[2], x[3], x[4], x[5]);
    });
  };
  return spec;
}

double pressure_vessel_cost(double x1, double x2, double x3, double x4) {
  return 0.6224 * x1 * x3 * x4 + 1.7781 * x2 * x3 * x3 + 3.1661 * x1 * x1 * x4 + 19.84 * x1 * x1 * x3;
}

double pressure_vessel_volume_constraint(double x3, double x4) {
  return -std::numbers::pi * x3 * x3 * x4 * x4 - (4.0 / 3.0) * x3 * x3 * x3 + 1296000.0;
}

ObjectiveSpec pressure_vessel() {
  ObjectiveSpec spec;
  spec.id = "pressure-vessel";
  spec.n_binary = 4;
  spec.sense = Sense::Minimize;
  spec.continuous_bounds = {{10.0, 150.0}, {10.0, 150.0}};
  // x1 = 3 + (q1 q2), x2 = 3 + (q3 q4), each pair read as a binary number.
  spec.evaluate = [](std::span<const int> q, std::span<const double> x) {
    return selector_expansion(q, [&](std::uint32_t pattern) {
      const double x1 = 3.0 + static_cast<double>(pattern >> 2);
      const double x2 = 3.0 + static_cast<double>(pattern & 3u);
      return pressure_vessel_cost(x1, x2, x[0], x[1]);
    });
  };
  spec.constraints.push_back([](std::span<const int>, std::span<const double> x) {
    return pressure_vessel_volume_constraint(x[0], x[1]);
  });
  spec.penalty_value = -10000000.0;
  return spec;
}

DiagonalHamiltonian compile_diagonal(const ObjectiveSpec& spec, std::span<const double> x_c) {
  if (!spec.is_classical()) {
    throw std::invalid_argument(spec.id + ": objective is defined by a dense Hamiltonian");
  }
  spec.check_bounds(x_c);
  const std::uint32_t dim = 1u << spec.n_binary;
  std::vector<double> values(dim);
  for (std::uint32_t z = 0; z < dim; ++z) {
    const auto bits = bits_of(z, spec.n_binary);
    values[z] = spec.evaluate(bits, x_c);
  }
  return DiagonalHamiltonian(std::move(values));
}

PhaseHamiltonian compile_hamiltonian(const ObjectiveSpec& spec, std::span<const double> x_c) {
  if (spec.is_classical()) return compile_diagonal(spec, x_c);
  spec.check_bounds(x_c);
  return spec.dense_hamiltonian(x_c);
}

std::vector<double> basis_values(const PhaseHamiltonian& h) {
  if (const auto* diag = std::get_if<DiagonalHamiltonian>(&h)) return diag->values;
  return std::get<DenseHamiltonian>(h).diagonal();
}

Optimum brute_force_optimum(const ObjectiveSpec& spec, std::span<const double> x_c) {
  if (spec.n_binary > kMaxQubits) throw std::invalid_argument("brute force limited to 10 binary variables");
  spec.check_bounds(x_c);
  const std::uint32_t dim = 1u << spec.n_binary;
  Optimum best{0, spec.evaluate(bits_of(0, spec.n_binary), x_c)};
  for (std::uint32_t z = 1; z < dim; ++z) {
    const double v = spec.evaluate(bits_of(z, spec.n_binary), x_c);
    if (strictly_better(v, best.best_value, spec.sense)) best = {z, v};
  }
  return best;
}

std::vector<std::uint32_t> optimal_states(const ObjectiveSpec& spec, std::span<const double> x_c) {
  const auto best = brute_force_optimum(spec, x_c);
  std::vector<std::uint32_t> states;
  for (std::uint32_t z = 0; z < (1u << spec.n_binary); ++z) {
    if (spec.evaluate(bits_of(z, spec.n_binary), x_c) == best.best_value) states.push_back(z);
  }
  return states;
}

}  // namespace qaboa
