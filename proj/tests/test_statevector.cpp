#include <doctest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "qaboa/statevector.hpp"

using namespace qaboa;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex I1{0.0, 1.0};

QuantumState random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexVector v(1 << n);
  for (auto& a : v) a = {g(rng), g(rng)};
  v.normalize();
  return QuantumState(n, v);
}

ComplexMatrix pauli_x_on(int n, int qubit) {
  const int dim = 1 << n;
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (int z = 0; z < dim; ++z) m(z ^ (1 << (n - 1 - qubit)), z) = 1.0;
  return m;
}

int popcount(std::uint32_t z) { return std::popcount(z); }

}  // namespace

TEST_CASE("bit ordering puts q1 first") {
  CHECK(bits_of(11, 6) == std::vector<int>{0, 0, 1, 0, 1, 1});
  CHECK(bit_of(4, 0, 3) == 1);
  CHECK(bit_of(4, 2, 3) == 0);
  for (std::uint32_t z = 0; z < 64; ++z) CHECK(index_of(bits_of(z, 6)) == z);
}

TEST_CASE("uniform initialization") {
  for (int n : {1, 2, 6}) {
    const auto s = init_uniform(n);
    for (auto a : s.amplitudes()) CHECK(std::abs(a - Complex(std::pow(2.0, -n / 2.0))) < 1e-15);
  }
  CHECK(init_uniform(6).amplitudes()[17].real() == doctest::Approx(0.125).epsilon(1e-15));
  CHECK_THROWS(init_uniform(0));
  CHECK_THROWS(init_uniform(11));
}

TEST_CASE("diagonal phase separator") {
  const DiagonalHamiltonian h({0, 1, 2, 3});
  const auto out = apply_phase_diagonal(init_uniform(2), h, kPi / 2);
  const Complex expected[] = {1.0, -I1, -1.0, I1};
  for (int z = 0; z < 4; ++z) CHECK(std::abs(out.amplitudes()[z] - 0.5 * expected[z]) < 1e-12);

  std::mt19937_64 rng(3);
  const auto s = random_state(3, rng);
  const auto same = apply_phase_diagonal(s, DiagonalHamiltonian(std::vector<double>(8, 5.0)), 0.0);
  CHECK((same.amplitudes() - s.amplitudes()).norm() == 0.0);
  const auto global = apply_phase_diagonal(s, DiagonalHamiltonian(std::vector<double>(8, 1.0)), 0.7);
  CHECK((global.amplitudes() - std::exp(-0.7 * I1) * s.amplitudes()).norm() < 1e-12);
  CHECK_THROWS(apply_phase_diagonal(s, h, 0.1));
}

TEST_CASE("dense phase separator") {
  ComplexMatrix x(2, 2);
  x << 0, 1, 1, 0;
  const DenseHamiltonian hx(x);
  const auto out = apply_phase_dense(QuantumState::basis(1, 0), hx, kPi / 2);
  CHECK(std::abs(out.amplitudes()[1] - (-I1)) < 1e-12);
  CHECK(std::abs(out.amplitudes()[0]) < 1e-12);

  std::mt19937_64 rng(5);
  std::vector<double> d(8);
  for (auto& v : d) v = std::uniform_real_distribution<double>(-3, 3)(rng);
  ComplexMatrix dm = ComplexMatrix::Zero(8, 8);
  for (int z = 0; z < 8; ++z) dm(z, z) = d[z];
  const auto s = random_state(3, rng);
  const auto a = apply_phase_dense(s, DenseHamiltonian(dm), 1.3);
  const auto b = apply_phase_diagonal(s, DiagonalHamiltonian(d), 1.3);
  CHECK((a.amplitudes() - b.amplitudes()).norm() < 1e-10);
  CHECK((apply_phase_dense(s, DenseHamiltonian(dm), 0.0).amplitudes() - s.amplitudes()).norm() < 1e-12);

  ComplexMatrix bad = ComplexMatrix::Zero(2, 2);
  bad(0, 1) = 1.0;
  CHECK_THROWS(DenseHamiltonian{bad});
}

TEST_CASE("X mixer") {
  const auto flipped = apply_x_mixer(QuantumState::basis(4, 0), kPi / 2);
  CHECK(flipped.probability(15) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(flipped.amplitudes()[15] - std::pow(-I1, 4)) < 1e-12);

  std::mt19937_64 rng(11);
  for (int n = 1; n <= 4; ++n) {
    ComplexMatrix sum_x = ComplexMatrix::Zero(1 << n, 1 << n);
    for (int q = 0; q < n; ++q) sum_x += pauli_x_on(n, q);
    for (int trial = 0; trial < 5; ++trial) {
      const double beta = std::uniform_real_distribution<double>(0, 2 * kPi)(rng);
      const ComplexMatrix u = (Complex(0, -beta) * sum_x).exp();
      const auto s = random_state(n, rng);
      const auto out = apply_x_mixer(s, beta);
      CHECK((out.amplitudes() - u * s.amplitudes()).norm() < 1e-10);
    }
  }
  const auto s = random_state(3, rng);
  CHECK((apply_x_mixer(s, 0.0).amplitudes() - s.amplitudes()).norm() < 1e-14);
}

TEST_CASE("XY ring mixer") {
  CHECK(ring_edges(2).size() == 1);
  CHECK(ring_edges(5).size() == 5);

  // 1/2 (XX + YY) on two qubits swaps |01> and |10>.
  const auto h2 = xy_hamiltonian(2, ring_edges(2));
  CHECK(std::abs(h2(1, 2) - Complex(1.0)) < 1e-15);
  CHECK(std::abs(h2(0, 3)) < 1e-15);

  const auto zero = apply_xy_mixer(QuantumState::basis(4, 0), 1.234);
  CHECK(zero.probability(0) == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 rng(21);
  for (int n = 2; n <= 6; ++n) {
    for (int weight = 0; weight <= n; ++weight) {
      ComplexVector v = ComplexVector::Zero(1 << n);
      std::normal_distribution<double> g;
      for (std::uint32_t z = 0; z < v.size(); ++z) {
        if (popcount(z) == weight) v[z] = {g(rng), g(rng)};
      }
      v.normalize();
      const double beta = std::uniform_real_distribution<double>(0, 2 * kPi)(rng);
      const auto out = apply_xy_mixer(QuantumState(n, v), beta);
      double leak = 0.0;
      for (std::uint32_t z = 0; z < v.size(); ++z) {
        if (popcount(z) != weight) leak += out.probability(z);
      }
      CHECK(leak < 1e-10);
    }
  }

  const auto s = random_state(3, rng);
  const ComplexMatrix u = (Complex(0, -0.8) * xy_hamiltonian(3, ring_edges(3))).exp();
  CHECK((apply_xy_mixer(s, 0.8).amplitudes() - u * s.amplitudes()).norm() < 1e-10);
}

TEST_CASE("Grover mixer") {
  const auto uniform = init_uniform(3);
  const std::vector<std::uint32_t> target{5};
  const auto reflected = apply_grover_mixer(uniform, target, 0.0);
  CHECK((reflected.amplitudes() + uniform.amplitudes()).norm() < 1e-14);
  const auto empty = apply_grover_mixer(uniform, {}, 2.0);
  CHECK((empty.amplitudes() + uniform.amplitudes()).norm() < 1e-14);

  const auto once = apply_grover_mixer(uniform, target, kPi);
  CHECK(std::abs(once.probability(5) - 25.0 / 32.0) < 1e-9);
  const auto twice = apply_grover_mixer(once, target, kPi);
  const double theta0 = std::asin(1.0 / std::sqrt(8.0));
  CHECK(std::abs(twice.probability(5) - std::pow(std::sin(5 * theta0), 2)) < 1e-9);

  // Textbook trajectory sin^2((2k+1) theta0) for N=64, one marked state.
  QuantumState s = init_uniform(6);
  const double t64 = std::asin(1.0 / 8.0);
  for (int k = 1; k <= 3; ++k) {
    s = apply_grover_mixer(s, std::vector<std::uint32_t>{42}, kPi);
    CHECK(std::abs(s.probability(42) - std::pow(std::sin((2 * k + 1) * t64), 2)) < 1e-9);
  }

  // Dense reference: (I - 2|s><s|) diag(e^{i theta} on S).
  std::mt19937_64 rng(8);
  const auto in = random_state(4, rng);
  const std::vector<std::uint32_t> set{1, 7, 12};
  ComplexMatrix us = ComplexMatrix::Identity(16, 16);
  for (auto z : set) us(z, z) = std::exp(I1 * 0.9);
  const ComplexVector sv = ComplexVector::Constant(16, 0.25);
  const ComplexMatrix ur = ComplexMatrix::Identity(16, 16) - 2.0 * sv * sv.adjoint();
  CHECK((apply_grover_mixer(in, set, 0.9).amplitudes() - ur * us * in.amplitudes()).norm() < 1e-12);
  CHECK_THROWS(apply_grover_mixer(in, std::vector<std::uint32_t>{16}, 1.0));
}

TEST_CASE("norm is preserved under 1000 random operator applications") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> angle(0, 2 * kPi);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    auto s = random_state(n, rng);
    std::vector<double> values(1u << n);
    for (auto& v : values) v = std::uniform_real_distribution<double>(-10, 10)(rng);
    auto apply = [&](QuantumState x, int op, double a) {
      switch (op) {
        case 0: return apply_phase_diagonal(std::move(x), DiagonalHamiltonian(values), a);
        case 1: return apply_x_mixer(std::move(x), a);
        case 2: return n >= 2 ? apply_xy_mixer(std::move(x), a) : apply_x_mixer(std::move(x), a);
        default: {
          std::vector<std::uint32_t> set;
          for (std::uint32_t z = 0; z < (1u << n); ++z) {
            if (rng() % 3 == 0) set.push_back(z);
          }
          return apply_grover_mixer(std::move(x), set, a);
        }
      }
    };
    const int op = static_cast<int>(rng() % 4);
    const double a = angle(rng);
    s = apply(s, op, a);
    worst = std::max(worst, std::abs(s.norm() - 1.0));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("inner products are preserved") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const auto a = random_state(n, rng);
    const auto b = random_state(n, rng);
    const double beta = std::uniform_real_distribution<double>(0, 2 * kPi)(rng);
    const std::vector<std::uint32_t> set{0, 3};
    const Complex before = a.amplitudes().dot(b.amplitudes());
    const auto a1 = apply_grover_mixer(apply_xy_mixer(apply_x_mixer(a, beta), beta), set, beta);
    const auto b1 = apply_grover_mixer(apply_xy_mixer(apply_x_mixer(b, beta), beta), set, beta);
    CHECK(std::abs(a1.amplitudes().dot(b1.amplitudes()) - before) < 1e-10);
  }
}

TEST_CASE("sampling") {
  const auto h = sample(QuantumState::basis(3, 0), 100, 1);
  CHECK(h.counts.size() == 1);
  CHECK(h.counts.at(0) == 100);
  CHECK(h.shots == 100);

  const auto u = sample(init_uniform(2), 40000, 17);
  const double sigma = std::sqrt(40000 * 0.25 * 0.75);
  for (std::uint32_t z = 0; z < 4; ++z) CHECK(std::abs(u.counts.at(z) - 10000.0) < 3 * sigma);

  std::mt19937_64 rng(4);
  const auto s = random_state(3, rng);
  const auto p = s.probabilities();
  const std::int64_t shots = 200000;
  const auto hist = sample(s, shots, 77);
  double chi2 = 0.0;
  for (std::uint32_t z = 0; z < 8; ++z) {
    const double expected = p[z] * static_cast<double>(shots);
    const double observed = hist.counts.contains(z) ? static_cast<double>(hist.counts.at(z)) : 0.0;
    chi2 += (observed - expected) * (observed - expected) / expected;
  }
  CHECK(chi2 < 24.32);  // chi-square, 7 dof, p = 0.001

  const auto again = sample(s, shots, 77);
  CHECK(again.counts == hist.counts);
}

TEST_CASE("expectation values") {
  const DiagonalHamiltonian h({4, -1, 2, 7});
  CHECK(expectation(QuantumState::basis(2, 3), h) == 7.0);
  CHECK(expectation(init_uniform(2), h) == doctest::Approx(3.0).epsilon(1e-14));

  ComplexMatrix m(2, 2);
  m << 1, Complex(0, -2), Complex(0, 2), -1;
  const DenseHamiltonian dh(m);
  for (int k = 0; k < 2; ++k) {
    const QuantumState v(1, dh.eigenvectors().col(k));
    CHECK(expectation(v, dh) == doctest::Approx(dh.eigenvalues()[k]).epsilon(1e-12));
  }
}
