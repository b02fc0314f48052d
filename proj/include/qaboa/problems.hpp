#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qaboa/statevector.hpp"

namespace qaboa {

enum class Sense { Minimize, Maximize };

const char* to_string(Sense sense);

/// True when `a` is strictly better than `b` in the given sense.
bool strictly_better(double a, double b, Sense sense);

/// Worst representable value in the given sense (+inf for minimization).
double worst_value(Sense sense);

struct Bounds {
  double lower = 0.0;
  double upper = 1.0;
  double span() const { return upper - lower; }
};

using ObjectiveFn = std::function<double(std::span<const int> bits, std::span<const double> x_c)>;
/// Constraint convention: a point is feasible iff the value is <= 0.
using ConstraintFn = std::function<double(std::span<const int> bits, std::span<const double> x_c)>;
/// Hamiltonian that is not diagonal in the computational basis, parameterized by x_c.
using DenseHamiltonianFn = std::function<DenseHamiltonian(std::span<const double> x_c)>;

struct ObjectiveSpec {
  std::string id;
  int n_binary = 0;
  std::vector<Bounds> continuous_bounds;
  Sense sense = Sense::Minimize;
  ObjectiveFn evaluate;
  std::vector<ConstraintFn> constraints;
  /// Acquisition value assigned to points violating any constraint.
  std::optional<double> penalty_value;
  /// Set only for problems whose phase separator is a dense operator (HeH+).
  DenseHamiltonianFn dense_hamiltonian;

  bool is_classical() const { return !dense_hamiltonian; }
  bool feasible(std::span<const int> bits, std::span<const double> x_c) const;
  void check_bounds(std::span<const double> x_c) const;
};

struct WeightedEdge {
  int i = 0;
  int j = 0;
  double weight = 1.0;
};

struct WeightedGraph {
  int n_vertices = 0;
  std::vector<WeightedEdge> edges;

  void validate() const;
};

WeightedGraph complete_graph(int n_vertices);

ObjectiveSpec maxcut(const WeightedGraph& graph, bool weighted, std::string id = "maxcut");

/// Complete 5-vertex graph with weights drawn uniformly from [0.1, 10.0].
WeightedGraph random_weighted_k5(std::uint64_t seed);

ObjectiveSpec lattice_protein();

/// Welding cost for weld type w in {0,1} and material m in {1..4}.
double welded_beam_cost(int w, int m, double h, double l, double t, double b);
ObjectiveSpec welded_beam();

/// Speed reducer weight with x3 the number of pinion teeth.
double speed_reducer_weight(double x1, double x2, double x3, double x4, double x5, double x6, double x7);
ObjectiveSpec speed_reducer();

double pressure_vessel_cost(double x1, double x2, double x3, double x4);
double pressure_vessel_volume_constraint(double x3, double x4);
ObjectiveSpec pressure_vessel();

/// Sum over all 2^n bit patterns of prod_i (q_i or 1 - q_i) * base(pattern), i.e.
/// the multilinear selector expansion that picks base(bits) for binary inputs.
double selector_expansion(std::span<const int> bits,
                          const std::function<double(std::uint32_t pattern)>& base);

DiagonalHamiltonian compile_diagonal(const ObjectiveSpec& spec, std::span<const double> x_c);

/// Phase separator for any problem: diagonal for classical objectives, dense otherwise.
PhaseHamiltonian compile_hamiltonian(const ObjectiveSpec& spec, std::span<const double> x_c);

/// Objective values per basis state as seen by the circuit (diagonal entries for dense problems).
std::vector<double> basis_values(const PhaseHamiltonian& h);

struct Optimum {
  std::uint32_t best_z = 0;
  double best_value = 0.0;
};

/// Exhaustive scan at fixed x_c; ties go to the smaller basis index.
Optimum brute_force_optimum(const ObjectiveSpec& spec, std::span<const double> x_c);

/// All basis indices attaining the optimum value exactly.
std::vector<std::uint32_t> optimal_states(const ObjectiveSpec& spec, std::span<const double> x_c);

}  // namespace qaboa
