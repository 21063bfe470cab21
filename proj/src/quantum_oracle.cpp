#include "gbitlab/quantum_oracle.hpp"

#include <cmath>

namespace gbitlab {

namespace {
using Complex = std::complex<double>;
const Complex kI(0.0, 1.0);

long pow2(int n) { return 1L << n; }

long pow4(int n) { return 1L << (2 * n); }
}  // namespace

CMatrix pauli(int k) {
  CMatrix m(2, 2);
  switch (k) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -kI, kI, 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli: label must be 0..3");
  }
  return m;
}

CMatrix pauli_product(const std::vector<int>& labels) {
  CMatrix m = pauli(labels.at(0));
  for (std::size_t i = 1; i < labels.size(); ++i) {
    const CMatrix b = pauli(labels[i]);
    CMatrix out(m.rows() * 2, m.cols() * 2);
    for (long r = 0; r < m.rows(); ++r)
      for (long c = 0; c < m.cols(); ++c)
        out.block(2 * r, 2 * c, 2, 2) = m(r, c) * b;
    m = std::move(out);
  }
  return m;
}

HermitianOperator::HermitianOperator(int qubits, CMatrix m)
    : n(qubits), matrix(std::move(m)) {
  if (n < 1) throw std::invalid_argument("HermitianOperator: n must be >= 1");
  if (matrix.rows() != pow2(n) || matrix.cols() != pow2(n))
    throw std::invalid_argument("HermitianOperator: matrix must be 2^n x 2^n");
  if ((matrix - matrix.adjoint()).norm() > 1e-12 * (1.0 + matrix.norm()))
    throw std::invalid_argument("HermitianOperator: H != H^dagger");
}

OperatorTensor adjoint_generator(const HermitianOperator& h) {
  if (!h.traceless())
    throw std::invalid_argument("adjoint_generator: H must be traceless");
  const int n = h.n;
  const long dim = pow4(n);
  const MultiIndex mi(3, n);
  Matrix x = Matrix::Zero(dim, dim);
  std::vector<CMatrix> basis(dim);
  for (long b = 0; b < dim; ++b) basis[b] = pauli_product(mi.decode(b));
  const double scale = 1.0 / double(pow2(n));
  for (long b = 0; b < dim; ++b) {
    const CMatrix comm = -kI * (h.matrix * basis[b] - basis[b] * h.matrix);
    for (long a = 0; a < dim; ++a)
      x(a, b) = scale * (basis[a] * comm).trace().real();
  }
  return OperatorTensor(3, n, std::move(x));
}

OperatorTensor transfer_matrix(const CMatrix& u, int n) {
  const long hdim = pow2(n);
  if (u.rows() != hdim || u.cols() != hdim)
    throw std::invalid_argument("transfer_matrix: U must be 2^n x 2^n");
  if ((u.adjoint() * u - CMatrix::Identity(hdim, hdim)).norm() > 1e-10)
    throw std::invalid_argument("transfer_matrix: U not unitary");
  const long dim = pow4(n);
  const MultiIndex mi(3, n);
  Matrix t = Matrix::Zero(dim, dim);
  std::vector<CMatrix> basis(dim);
  for (long b = 0; b < dim; ++b) basis[b] = pauli_product(mi.decode(b));
  const double scale = 1.0 / double(hdim);
  for (long b = 0; b < dim; ++b) {
    const CMatrix ub = u * basis[b] * u.adjoint();
    for (long a = 0; a < dim; ++a)
      t(a, b) = scale * (basis[a] * ub).trace().real();
  }
  return OperatorTensor(3, n, std::move(t));
}

CMatrix density_from_bloch(const std::vector<BlochVector>& preps) {
  if (preps.empty()) throw std::invalid_argument("density_from_bloch: empty");
  CMatrix rho;
  bool first = true;
  for (const BlochVector& a : preps) {
    if (a.d != 3)
      throw std::invalid_argument("density_from_bloch: d must be 3");
    CMatrix site = 0.5 * (pauli(0) + a.components(0) * pauli(1) +
                          a.components(1) * pauli(2) + a.components(2) * pauli(3));
    if (first) {
      rho = site;
      first = false;
    } else {
      CMatrix out(rho.rows() * 2, rho.cols() * 2);
      for (long r = 0; r < rho.rows(); ++r)
        for (long c = 0; c < rho.cols(); ++c)
          out.block(2 * r, 2 * c, 2, 2) = rho(r, c) * site;
      rho = std::move(out);
    }
  }
  return rho;
}

std::vector<double> density_probabilities(const CMatrix& rho,
                                          const std::vector<BlochVector>& meas) {
  const int n = static_cast<int>(meas.size());
  if (rho.rows() != pow2(n))
    throw std::invalid_argument("density_probabilities: size mismatch");
  std::vector<double> probs;
  probs.reserve(pow2(n));
  for (long outcome = 0; outcome < pow2(n); ++outcome) {
    CMatrix effect = CMatrix::Identity(1, 1);
    for (int i = 0; i < n; ++i) {
      meas[i].require_unit();
      const double s = ((outcome >> (n - 1 - i)) & 1) ? -1.0 : 1.0;
      CMatrix e = 0.5 * (pauli(0) + s * (meas[i].components(0) * pauli(1) +
                                         meas[i].components(1) * pauli(2) +
                                         meas[i].components(2) * pauli(3)));
      CMatrix out(effect.rows() * 2, effect.cols() * 2);
      for (long r = 0; r < effect.rows(); ++r)
        for (long c = 0; c < effect.cols(); ++c)
          out.block(2 * r, 2 * c, 2, 2) = effect(r, c) * e;
      effect = std::move(out);
    }
    probs.push_back((rho * effect).trace().real());
  }
  return probs;
}

CMatrix embed_unitary(const CMatrix& gate, const std::vector<int>& sites,
                      int n) {
  const int k = static_cast<int>(sites.size());
  if (gate.rows() != pow2(k) || gate.cols() != pow2(k))
    throw std::invalid_argument("embed_unitary: gate must be 2^k x 2^k");
  for (int s : sites)
    if (s < 0 || s >= n) throw std::invalid_argument("embed_unitary: bad site");
  const long dim = pow2(n);
  CMatrix u = CMatrix::Zero(dim, dim);
  for (long c = 0; c < dim; ++c) {
    long gc = 0;
    for (int i = 0; i < k; ++i)
      gc = (gc << 1) | ((c >> (n - 1 - sites[i])) & 1);
    for (long gr = 0; gr < pow2(k); ++gr) {
      long r = c;
      for (int i = 0; i < k; ++i) {
        const long bit = (gr >> (k - 1 - i)) & 1;
        const long mask = 1L << (n - 1 - sites[i]);
        r = (r & ~mask) | (bit ? mask : 0);
      }
      u(r, c) += gate(gr, gc);
    }
  }
  return u;
}

CMatrix gate_unitary(const std::string& name, double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  if (name == "x" || name == "y" || name == "z")
    return pauli(name == "x" ? 1 : name == "y" ? 2 : 3);
  if (name == "h") {
    CMatrix m(2, 2);
    m << 1, 1, 1, -1;
    return m / std::sqrt(2.0);
  }
  if (name == "s") {
    CMatrix m(2, 2);
    m << 1, 0, 0, kI;
    return m;
  }
  if (name == "rx") return c * pauli(0) - kI * s * pauli(1);
  if (name == "ry") return c * pauli(0) - kI * s * pauli(2);
  if (name == "rz") return c * pauli(0) - kI * s * pauli(3);
  if (name == "cnot") {
    CMatrix m = CMatrix::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
    return m;
  }
  if (name == "cz") {
    CMatrix m = CMatrix::Identity(4, 4);
    m(3, 3) = -1;
    return m;
  }
  if (name == "swap") {
    CMatrix m = CMatrix::Zero(4, 4);
    m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1;
    return m;
  }
  throw std::invalid_argument("gate_unitary: unknown gate '" + name + "'");
}

std::vector<HermitianOperator> traceless_basis(int n) {
  std::vector<HermitianOperator> out;
  const MultiIndex mi(3, n);
  for (long b = 1; b < pow4(n); ++b)
    out.emplace_back(n, pauli_product(mi.decode(b)));
  return out;
}

}  // namespace gbitlab
