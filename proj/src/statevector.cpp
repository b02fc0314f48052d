#include "qaboa/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>

namespace qaboa {

namespace {

void require_qubits(int n) {
  if (n < 1 || n > kMaxQubits) {
    throw std::invalid_argument("qubit count must be in [1, " + std::to_string(kMaxQubits) +
                                "], got " + std::to_string(n));
  }
}

void require_dimension(std::size_t state_dim, std::size_t op_dim, const char* what) {
  if (state_dim != op_dim) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (state " +
                                std::to_string(state_dim) + ", operator " +
                                std::to_string(op_dim) + ")");
  }
}

}  // namespace

int bit_of(std::uint32_t z, int qubit, int n_qubits) {
  return static_cast<int>((z >> (n_qubits - 1 - qubit)) & 1u);
}

std::vector<int> bits_of(std::uint32_t z, int n_qubits) {
  std::vector<int> bits(static_cast<std::size_t>(n_qubits));
  for (int i = 0; i < n_qubits; ++i) bits[static_cast<std::size_t>(i)] = bit_of(z, i, n_qubits);
  return bits;
}

std::uint32_t index_of(std::span<const int> bits) {
  std::uint32_t z = 0;
  for (int b : bits) z = (z << 1) | static_cast<std::uint32_t>(b & 1);
  return z;
}

QuantumState::QuantumState(int n_qubits, ComplexVector amplitudes)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
  require_qubits(n_qubits);
  if (amplitudes_.size() != (Eigen::Index{1} << n_qubits)) {
    throw std::invalid_argument("amplitude vector length does not match 2^n");
  }
}

QuantumState QuantumState::basis(int n_qubits, std::uint32_t z) {
  require_qubits(n_qubits);
  ComplexVector amps = ComplexVector::Zero(Eigen::Index{1} << n_qubits);
  if (z >= static_cast<std::uint32_t>(amps.size())) throw std::out_of_range("basis index out of range");
  amps[z] = 1.0;
  return QuantumState(n_qubits, std::move(amps));
}

std::vector<double> QuantumState::probabilities() const {
  std::vector<double> p(dimension());
  for (std::size_t z = 0; z < p.size(); ++z) p[z] = std::norm(amplitudes_[static_cast<Eigen::Index>(z)]);
  return p;
}

DiagonalHamiltonian::DiagonalHamiltonian(std::vector<double> v) : values(std::move(v)) {
  for (double x : values) {
    if (!std::isfinite(x)) throw std::invalid_argument("diagonal Hamiltonian entries must be finite");
  }
}

DenseHamiltonian::DenseHamiltonian(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
    throw std::invalid_argument("dense Hamiltonian must be a non-empty square matrix");
  }
  const double asym = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (!(asym < 1e-10)) throw std::invalid_argument("dense Hamiltonian is not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(matrix_);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

ComplexMatrix DenseHamiltonian::evolution(double t) const {
  ComplexVector phases(eigenvalues_.size());
  for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k) {
    phases[k] = std::polar(1.0, -t * eigenvalues_[k]);
  }
  return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
}

std::vector<double> DenseHamiltonian::diagonal() const {
  std::vector<double> d(dimension());
  for (std::size_t z = 0; z < d.size(); ++z) {
    d[z] = matrix_(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(z)).real();
  }
  return d;
}

QuantumState init_uniform(int n_qubits) {
  require_qubits(n_qubits);
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  return QuantumState(n_qubits, ComplexVector::Constant(dim, Complex(std::pow(2.0, -0.5 * n_qubits), 0.0)));
}

QuantumState apply_phase_diagonal(QuantumState state, const DiagonalHamiltonian& h, double gamma) {
  require_dimension(state.dimension(), h.dimension(), "apply_phase_diagonal");
  auto& amps = state.mutable_amplitudes();
  for (std::size_t z = 0; z < h.values.size(); ++z) {
    amps[static_cast<Eigen::Index>(z)] *= std::polar(1.0, -gamma * h.values[z]);
  }
  return state;
}

QuantumState apply_phase_dense(QuantumState state, const DenseHamiltonian& h, double gamma) {
  require_dimension(state.dimension(), h.dimension(), "apply_phase_dense");
  const auto& v = h.eigenvectors();
  ComplexVector coeffs = v.adjoint() * state.amplitudes();
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
    coeffs[k] *= std::polar(1.0, -gamma * h.eigenvalues()[k]);
  }
  state.mutable_amplitudes() = v * coeffs;
  return state;
}

QuantumState apply_phase(QuantumState state, const PhaseHamiltonian& h, double gamma) {
  return std::visit(
      [&](const auto& op) -> QuantumState {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, DiagonalHamiltonian>) {
          return apply_phase_diagonal(std::move(state), op, gamma);
        } else {
          return apply_phase_dense(std::move(state), op, gamma);
        }
      },
      h);
}

QuantumState apply_x_mixer(QuantumState state, double beta) {
  const Complex c(std::cos(beta), 0.0);
  const Complex s(0.0, -std::sin(beta));
  auto& amps = state.mutable_amplitudes();
  const std::size_t dim = state.dimension();
  const int n = state.n_qubits();
  for (int q = 0; q < n; ++q) {
    const std::size_t stride = std::size_t{1} << (n - 1 - q);
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
      for (std::size_t off = 0; off < stride; ++off) {
        const auto i0 = static_cast<Eigen::Index>(base + off);
        const auto i1 = static_cast<Eigen::Index>(base + off + stride);
        const Complex a0 = amps[i0];
        const Complex a1 = amps[i1];
        amps[i0] = c * a0 + s * a1;
        amps[i1] = s * a0 + c * a1;
      }
    }
  }
  return state;
}

std::vector<Edge> ring_edges(int n_qubits) {
  if (n_qubits < 2) throw std::invalid_argument("XY mixer needs at least two qubits");
  if (n_qubits == 2) return {{0, 1}};
  std::vector<Edge> edges;
  for (int i = 0; i < n_qubits; ++i) edges.emplace_back(i, (i + 1) % n_qubits);
  return edges;
}

ComplexMatrix xy_hamiltonian(int n_qubits, std::span<const Edge> edges) {
  require_qubits(n_qubits);
  const std::size_t dim = std::size_t{1} << n_qubits;
  ComplexMatrix h = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  // (XX + YY)/2 swaps |01> <-> |10> on the pair and annihilates |00>, |11>.
  for (const auto& [i, j] : edges) {
    if (i == j || i < 0 || j < 0 || i >= n_qubits || j >= n_qubits) {
      throw std::invalid_argument("invalid XY edge");
    }
    const std::uint32_t mi = 1u << (n_qubits - 1 - i);
    const std::uint32_t mj = 1u << (n_qubits - 1 - j);
    for (std::uint32_t z = 0; z < dim; ++z) {
      const bool bi = (z & mi) != 0;
      const bool bj = (z & mj) != 0;
      if (bi != bj) {
        const std::uint32_t w = z ^ mi ^ mj;
        h(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(z)) += 1.0;
      }
    }
  }
  return h;
}

namespace {

const DenseHamiltonian& cached_ring_mixer(int n_qubits) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<const DenseHamiltonian>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n_qubits];
  if (!slot) {
    const auto edges = ring_edges(n_qubits);
    slot = std::make_unique<const DenseHamiltonian>(xy_hamiltonian(n_qubits, edges));
  }
  return *slot;
}

}  // namespace

QuantumState apply_xy_mixer(QuantumState state, double beta) {
  if (state.n_qubits() < 2) throw std::invalid_argument("XY mixer needs at least two qubits");
  return apply_xy_mixer(std::move(state), cached_ring_mixer(state.n_qubits()), beta);
}

QuantumState apply_xy_mixer(QuantumState state, const DenseHamiltonian& mixer, double beta) {
  return apply_phase_dense(std::move(state), mixer, beta);
}

QuantumState apply_grover_mixer(QuantumState state, std::span<const std::uint32_t> target_set,
                                double theta) {
  auto& amps = state.mutable_amplitudes();
  const std::size_t dim = state.dimension();
  const Complex phase = std::polar(1.0, theta);
  for (std::uint32_t u : target_set) {
    if (u >= dim) throw std::out_of_range("Grover target index out of range");
  }
  // Duplicates in target_set must not double-apply the phase.
  std::vector<bool> marked(dim, false);
  for (std::uint32_t u : target_set) {
    if (!marked[u]) {
      amps[static_cast<Eigen::Index>(u)] *= phase;
      marked[u] = true;
    }
  }
  // (I - 2|s><s|) psi = psi - 2 * mean(psi) on every component.
  const Complex shift = 2.0 * amps.mean();
  for (Eigen::Index z = 0; z < amps.size(); ++z) amps[z] -= shift;
  return state;
}

MeasurementHistogram sample(const QuantumState& state, std::int64_t shots, std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  const auto probs = state.probabilities();
  std::vector<double> cumulative(probs.size());
  double acc = 0.0;
  for (std::size_t z = 0; z < probs.size(); ++z) {
    acc += probs[z];
    cumulative[z] = acc;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  MeasurementHistogram hist;
  hist.shots = shots;
  for (std::int64_t s = 0; s < shots; ++s) {
    const double u = unit(rng) * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    auto z = static_cast<std::uint32_t>(it - cumulative.begin());
    if (it == cumulative.end()) {
      // Round-off at the top of the range: fall back to the last populated state.
      z = static_cast<std::uint32_t>(probs.size() - 1);
      while (z > 0 && probs[z] == 0.0) --z;
    }
    ++hist.counts[z];
  }
  return hist;
}

double expectation(const QuantumState& state, const DiagonalHamiltonian& h) {
  require_dimension(state.dimension(), h.dimension(), "expectation");
  double total = 0.0;
  for (std::size_t z = 0; z < h.values.size(); ++z) total += state.probability(static_cast<std::uint32_t>(z)) * h.values[z];
  return total;
}

double expectation(const QuantumState& state, const DenseHamiltonian& h) {
  require_dimension(state.dimension(), h.dimension(), "expectation");
  const Complex value = state.amplitudes().dot(h.matrix() * state.amplitudes());
  return value.real();
}

double expectation(const QuantumState& state, const PhaseHamiltonian& h) {
  return std::visit([&](const auto& op) { return expectation(state, op); }, h);
}

}  // namespace qaboa
