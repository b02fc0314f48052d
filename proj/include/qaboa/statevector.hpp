#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace qaboa {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr int kMaxQubits = 10;

// Basis index z maps to the bitstring q1...qn with q1 the most significant bit.
int bit_of(std::uint32_t z, int qubit, int n_qubits);
std::vector<int> bits_of(std::uint32_t z, int n_qubits);
std::uint32_t index_of(std::span<const int> bits);

/// Statevector of an n-qubit register, 1 <= n <= 10.
class QuantumState {
 public:
  QuantumState(int n_qubits, ComplexVector amplitudes);

  static QuantumState basis(int n_qubits, std::uint32_t z);

  int n_qubits() const { return n_qubits_; }
  std::size_t dimension() const { return static_cast<std::size_t>(amplitudes_.size()); }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  ComplexVector& mutable_amplitudes() { return amplitudes_; }

  double norm() const { return amplitudes_.norm(); }
  double probability(std::uint32_t z) const { return std::norm(amplitudes_[z]); }
  std::vector<double> probabilities() const;

 private:
  int n_qubits_;
  ComplexVector amplitudes_;
};

/// Phase-separating operator for classical objectives; entry z is the objective at basis state z.
struct DiagonalHamiltonian {
  std::vector<double> values;

  explicit DiagonalHamiltonian(std::vector<double> v);
  std::size_t dimension() const { return values.size(); }
};

/// Hermitian operator with a cached eigendecomposition, used for matrix exponentials.
class DenseHamiltonian {
 public:
  explicit DenseHamiltonian(ComplexMatrix matrix);

  std::size_t dimension() const { return static_cast<std::size_t>(matrix_.rows()); }
  const ComplexMatrix& matrix() const { return matrix_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const ComplexMatrix& eigenvectors() const { return eigenvectors_; }

  /// exp(-i * t * H) as a dense matrix.
  ComplexMatrix evolution(double t) const;
  std::vector<double> diagonal() const;

 private:
  ComplexMatrix matrix_;
  Eigen::VectorXd eigenvalues_;
  ComplexMatrix eigenvectors_;
};

using PhaseHamiltonian = std::variant<DiagonalHamiltonian, DenseHamiltonian>;

struct MeasurementHistogram {
  std::map<std::uint32_t, std::int64_t> counts;
  std::int64_t shots = 0;
};

QuantumState init_uniform(int n_qubits);

QuantumState apply_phase_diagonal(QuantumState state, const DiagonalHamiltonian& h, double gamma);
QuantumState apply_phase_dense(QuantumState state, const DenseHamiltonian& h, double gamma);
QuantumState apply_phase(QuantumState state, const PhaseHamiltonian& h, double gamma);

/// Product of Rx(2 beta) on every qubit, i.e. exp(-i beta sum_i X_i).
QuantumState apply_x_mixer(QuantumState state, double beta);

using Edge = std::pair<int, int>;

std::vector<Edge> ring_edges(int n_qubits);

/// 1/2 sum_{(i,j)} (X_i X_j + Y_i Y_j) over the given qubit pairs.
ComplexMatrix xy_hamiltonian(int n_qubits, std::span<const Edge> edges);

/// exp(-i beta B_XY) with B_XY on the cyclic ring. The eigendecomposition is
/// built once per qubit count and shared across threads.
QuantumState apply_xy_mixer(QuantumState state, double beta);
QuantumState apply_xy_mixer(QuantumState state, const DenseHamiltonian& mixer, double beta);

/// Generalized Grover mixer: phase e^{i theta} on target_set, then reflection
/// I - 2|s><s| about the uniform superposition.
QuantumState apply_grover_mixer(QuantumState state, std::span<const std::uint32_t> target_set,
                                double theta);

MeasurementHistogram sample(const QuantumState& state, std::int64_t shots, std::uint64_t seed);

double expectation(const QuantumState& state, const DiagonalHamiltonian& h);
double expectation(const QuantumState& state, const DenseHamiltonian& h);
double expectation(const QuantumState& state, const PhaseHamiltonian& h);

}  // namespace qaboa
