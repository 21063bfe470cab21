#pragma once

#include <complex>
#include <string>

#include "gbitlab/tensor.hpp"

namespace gbitlab {

using CMatrix = Eigen::MatrixXcd;

/// Pauli matrix by label 0..3 = 1, x, y, z.
CMatrix pauli(int k);
/// Kronecker product of Paulis over qubits, wire 1 slowest.
CMatrix pauli_product(const std::vector<int>& labels);

struct HermitianOperator {
  int n = 0;
  CMatrix matrix;

  HermitianOperator(int qubits, CMatrix m);
  bool traceless(double eps = 1e-12) const {
    return std::abs(matrix.trace()) <= eps * (1.0 + matrix.norm());
  }
};

/// Generator of t -> transfer matrix of exp(-iHt) conjugation at t = 0, in
/// the Pauli product frame where single-qubit states coincide with lifted
/// Bloch vectors (d = 3). First row and column vanish.
OperatorTensor adjoint_generator(const HermitianOperator& h);

/// Transfer matrix of rho -> U rho U^dagger in the same frame.
OperatorTensor transfer_matrix(const CMatrix& u, int n);

/// Density matrix of a product of Bloch states.
CMatrix density_from_bloch(const std::vector<BlochVector>& preps);

/// Born-rule distribution over {+,-}^n for local measurements along meas,
/// lexicographic outcome order with + before -.
std::vector<double> density_probabilities(const CMatrix& rho,
                                          const std::vector<BlochVector>& meas);

/// Applies a 2^k x 2^k gate to the given wires of an n-qubit register.
CMatrix embed_unitary(const CMatrix& gate, const std::vector<int>& sites, int n);

/// Named gate library: x, y, z, h, s, rx, ry, rz (theta), cnot, cz, swap.
CMatrix gate_unitary(const std::string& name, double theta = 0.0);

/// Pauli products except the identity: a traceless Hermitian basis.
std::vector<HermitianOperator> traceless_basis(int n);

}  // namespace gbitlab
