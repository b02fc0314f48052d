#!/usr/bin/env python3
"""Regenerate data/heh_plus_grid.txt.

Builds the STO-3G HeH+ molecular Hamiltonian with PennyLane at each bond
length of the grid, tapers it from four qubits to two, and writes the
Pauli coefficients in the grid-file format read by the C++ library:

    n_qubits=2
    L=<angstrom>
    <coefficient> <pauli string>
    ...
"""
import argparse
import sys

import numpy
import pennylane as qml
from pennylane import numpy as pnp

BOHR_PER_ANGSTROM = 1.0 / 0.529177210903


def tapered_terms(bond_length):
    coords = pnp.array([0.0, 0.0, 0.0, 0.0, 0.0, bond_length * BOHR_PER_ANGSTROM],
                       requires_grad=False)
    mol = qml.qchem.Molecule(["He", "H"], coords, charge=1)
    hamiltonian, n_qubits = qml.qchem.molecular_hamiltonian(mol)
    generators = qml.symmetry_generators(hamiltonian)
    paulix = qml.paulix_ops(generators, n_qubits)
    sector = qml.qchem.optimal_sector(hamiltonian, generators, 2)
    tapered = qml.taper(hamiltonian, generators, paulix, sector)
    wires = sorted(tapered.wires)
    terms = {}
    for word, coeff in tapered.pauli_rep.items():
        label = "".join(word.get(w, "I") for w in wires)
        terms[label] = terms.get(label, 0.0) + float(numpy.real(coeff))
    return wires, terms


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="data/heh_plus_grid.txt")
    parser.add_argument("--lo", type=float, default=0.1)
    parser.add_argument("--hi", type=float, default=3.0)
    parser.add_argument("--step", type=float, default=0.05)
    args = parser.parse_args()

    count = int(round((args.hi - args.lo) / args.step)) + 1
    lines = ["# Qubit-tapered STO-3G HeH+ Hamiltonian, coefficients in Hartree.",
             "# Generated by tools/heh_grid.py (PennyLane %s)." % qml.__version__,
             "n_qubits=2"]
    for k in range(count):
        bond = round(args.lo + k * args.step, 10)
        wires, terms = tapered_terms(bond)
        if len(wires) != 2:
            sys.exit("unexpected tapered width %d at L=%g" % (len(wires), bond))
        lines.append("L=%.2f" % bond)
        for label in sorted(terms):
            lines.append("%.15e %s" % (terms[label], label))
        print("L=%.2f done" % bond, file=sys.stderr)
    with open(args.out, "w") as fh:
        fh.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
