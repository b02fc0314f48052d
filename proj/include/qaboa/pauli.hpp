#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "qaboa/problems.hpp"
#include "qaboa/statevector.hpp"

namespace qaboa {

struct PauliTerm {
  double coefficient = 0.0;
  std::string pauli_string;  // over {I,X,Y,Z}; character k acts on qubit k (q1 first)
};

struct PauliHamiltonianFile {
  int n_qubits = 0;
  std::vector<PauliTerm> terms;
};

/// Parse `<coefficient> <pauli string>` lines; `#` starts a comment, blank lines are skipped.
/// Errors carry the 1-based line number.
PauliHamiltonianFile parse_pauli_terms(std::istream& in, std::string_view source = "<stream>");

ComplexMatrix pauli_matrix(const PauliHamiltonianFile& h);

DenseHamiltonian load_pauli_hamiltonian(const std::filesystem::path& path);
DenseHamiltonian to_dense_hamiltonian(const PauliHamiltonianFile& h);

/// Pauli coefficients tabulated on a bond-length grid, linearly interpolated in between.
class PauliCoefficientGrid {
 public:
  struct Node {
    double bond_length = 0.0;
    PauliHamiltonianFile hamiltonian;
  };

  static PauliCoefficientGrid parse(std::istream& in, std::string_view source = "<stream>");
  static PauliCoefficientGrid load(const std::filesystem::path& path);

  int n_qubits() const { return n_qubits_; }
  double min_bond_length() const { return nodes_.front().bond_length; }
  double max_bond_length() const { return nodes_.back().bond_length; }
  const std::vector<Node>& nodes() const { return nodes_; }

  PauliHamiltonianFile at(double bond_length) const;

 private:
  int n_qubits_ = 0;
  std::vector<Node> nodes_;
};

/// Tapered STO-3G HeH+ Hamiltonian grid shipped with the library.
const PauliCoefficientGrid& heh_plus_grid();

/// Two-qubit HeH+ energy problem over bond length L in [0.1, 3] angstrom.
ObjectiveSpec heh_plus(PauliCoefficientGrid grid = heh_plus_grid());

}  // namespace qaboa
