#include "qaboa/pauli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace qaboa {

extern const char* const kHehPlusGridText;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void fail(std::string_view source, int line, const std::string& what) {
  throw std::runtime_error(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return trim(hash == std::string::npos ? line : line.substr(0, hash));
}

// Parses "<coefficient> <pauli string>", enforcing a consistent width.
PauliTerm parse_term(const std::string& body, std::string_view source, int line_no, int& width) {
  std::istringstream fields(body);
  std::string coeff_text, pauli, extra;
  if (!(fields >> coeff_text >> pauli) || (fields >> extra)) {
    fail(source, line_no, "expected '<coefficient> <pauli string>', got '" + body + "'");
  }
  double coeff = 0.0;
  const auto* end = coeff_text.data() + coeff_text.size();
  auto [ptr, ec] = std::from_chars(coeff_text.data(), end, coeff);
  if (ec != std::errc() || ptr != end) {
    fail(source, line_no, "coefficient '" + coeff_text + "' is not a real decimal number");
  }
  if (!std::isfinite(coeff)) fail(source, line_no, "coefficient must be finite");
  for (char c : pauli) {
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
      fail(source, line_no, "invalid Pauli character '" + std::string(1, c) + "'");
    }
  }
  if (width == 0) {
    width = static_cast<int>(pauli.size());
  } else if (static_cast<int>(pauli.size()) != width) {
    fail(source, line_no, "Pauli string length " + std::to_string(pauli.size()) + " differs from " +
                              std::to_string(width));
  }
  return {coeff, pauli};
}

// Single-qubit Pauli action on basis bit b: returns (phase, flipped bit).
std::pair<Complex, int> pauli_action(char p, int b) {
  switch (p) {
    case 'X': return {1.0, 1 - b};
    case 'Y': return {b == 0 ? Complex(0, 1) : Complex(0, -1), 1 - b};
    case 'Z': return {b == 0 ? 1.0 : -1.0, b};
    default: return {1.0, b};
  }
}

}  // namespace

PauliHamiltonianFile parse_pauli_terms(std::istream& in, std::string_view source) {
  PauliHamiltonianFile h;
  int width = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = strip_comment(line);
    if (body.empty()) continue;
    h.terms.push_back(parse_term(body, source, line_no, width));
  }
  h.n_qubits = width;
  return h;
}

ComplexMatrix pauli_matrix(const PauliHamiltonianFile& h) {
  if (h.n_qubits < 1 || h.n_qubits > kMaxQubits) {
    throw std::invalid_argument("Pauli Hamiltonian qubit count out of range");
  }
  const Eigen::Index dim = Eigen::Index{1} << h.n_qubits;
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (const auto& term : h.terms) {
    if (static_cast<int>(term.pauli_string.size()) != h.n_qubits) {
      throw std::invalid_argument("Pauli string width mismatch");
    }
    for (std::uint32_t col = 0; col < static_cast<std::uint32_t>(dim); ++col) {
      Complex phase = term.coefficient;
      std::uint32_t row = 0;
      for (int q = 0; q < h.n_qubits; ++q) {
        const auto [ph, bit] = pauli_action(term.pauli_string[static_cast<std::size_t>(q)],
                                            bit_of(col, q, h.n_qubits));
        phase *= ph;
        row = (row << 1) | static_cast<std::uint32_t>(bit);
      }
      m(row, col) += phase;
    }
  }
  return m;
}

DenseHamiltonian to_dense_hamiltonian(const PauliHamiltonianFile& h) {
  if (h.terms.empty()) {
    throw std::invalid_argument("Pauli Hamiltonian has no terms; nothing to optimize");
  }
  return DenseHamiltonian(pauli_matrix(h));
}

DenseHamiltonian load_pauli_hamiltonian(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open Pauli Hamiltonian file " + path.string());
  return to_dense_hamiltonian(parse_pauli_terms(in, path.string()));
}

PauliCoefficientGrid PauliCoefficientGrid::parse(std::istream& in, std::string_view source) {
  PauliCoefficientGrid grid;
  int width = 0;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = strip_comment(line);
    if (body.empty()) continue;
    if (!header_seen) {
      if (body.rfind("n_qubits=", 0) != 0) fail(source, line_no, "expected header 'n_qubits=<int>'");
      try {
        grid.n_qubits_ = std::stoi(body.substr(9));
      } catch (const std::exception&) {
        fail(source, line_no, "bad qubit count in header");
      }
      if (grid.n_qubits_ < 1 || grid.n_qubits_ > kMaxQubits) fail(source, line_no, "qubit count out of range");
      width = grid.n_qubits_;
      header_seen = true;
      continue;
    }
    if (body.rfind("L=", 0) == 0) {
      double bond = 0.0;
      try {
        bond = std::stod(body.substr(2));
      } catch (const std::exception&) {
        fail(source, line_no, "bad bond length '" + body + "'");
      }
      if (!grid.nodes_.empty() && !(bond > grid.nodes_.back().bond_length)) {
        fail(source, line_no, "bond lengths must be strictly increasing");
      }
      grid.nodes_.push_back({bond, {grid.n_qubits_, {}}});
      continue;
    }
    if (grid.nodes_.empty()) fail(source, line_no, "term line before the first 'L=' block");
    grid.nodes_.back().hamiltonian.terms.push_back(parse_term(body, source, line_no, width));
  }
  if (!header_seen) throw std::runtime_error(std::string(source) + ": missing 'n_qubits=' header");
  if (grid.nodes_.empty()) throw std::runtime_error(std::string(source) + ": no 'L=' blocks");
  for (const auto& node : grid.nodes_) {
    if (node.hamiltonian.terms.empty()) {
      throw std::runtime_error(std::string(source) + ": empty block at L=" + std::to_string(node.bond_length));
    }
  }
  return grid;
}

PauliCoefficientGrid PauliCoefficientGrid::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open coefficient grid " + path.string());
  return parse(in, path.string());
}

PauliHamiltonianFile PauliCoefficientGrid::at(double bond_length) const {
  if (!(bond_length >= min_bond_length() && bond_length <= max_bond_length())) {
    throw std::out_of_range("bond length " + std::to_string(bond_length) + " outside the tabulated grid");
  }
  auto upper = std::lower_bound(nodes_.begin(), nodes_.end(), bond_length,
                                [](const Node& n, double v) { return n.bond_length < v; });
  if (upper == nodes_.begin()) return upper->hamiltonian;
  const auto lower = std::prev(upper);
  const double t = (bond_length - lower->bond_length) / (upper->bond_length - lower->bond_length);

  // Terms absent from a node have coefficient zero there.
  std::map<std::string, std::pair<double, double>> coeffs;
  for (const auto& term : lower->hamiltonian.terms) coeffs[term.pauli_string].first += term.coefficient;
  for (const auto& term : upper->hamiltonian.terms) coeffs[term.pauli_string].second += term.coefficient;
  PauliHamiltonianFile out{n_qubits_, {}};
  for (const auto& [label, ends] : coeffs) {
    out.terms.push_back({(1.0 - t) * ends.first + t * ends.second, label});
  }
  return out;
}

const PauliCoefficientGrid& heh_plus_grid() {
  static const PauliCoefficientGrid grid = [] {
    std::istringstream in(kHehPlusGridText);
    return PauliCoefficientGrid::parse(in, "heh_plus_grid.txt");
  }();
  return grid;
}

ObjectiveSpec heh_plus(PauliCoefficientGrid grid_in) {
  auto grid = std::make_shared<const PauliCoefficientGrid>(std::move(grid_in));
  ObjectiveSpec spec;
  spec.id = "heh-plus";
  spec.n_binary = grid->n_qubits();
  spec.sense = Sense::Minimize;
  spec.continuous_bounds = {{0.1, 3.0}};
  spec.dense_hamiltonian = [grid](std::span<const double> x) {
    return to_dense_hamiltonian(grid->at(x[0]));
  };
  // Energy of a basis state is the diagonal matrix element <z|H(L)|z>.
  spec.evaluate = [grid](std::span<const int> q, std::span<const double> x) {
    const auto z = static_cast<Eigen::Index>(index_of(q));
    return pauli_matrix(grid->at(x[0]))(z, z).real();
  };
  return spec;
}

}  // namespace qaboa
