#include "gbitlab/bloch.hpp"

#include <Eigen/QR>
#include <cmath>

namespace gbitlab {

BlochVector::BlochVector(int dim, Vector c) : d(dim), components(std::move(c)) {
  if (d < 1) throw std::invalid_argument("BlochVector: d must be >= 1");
  if (components.size() != d)
    throw std::invalid_argument("BlochVector: component count != d");
}

const BlochVector& BlochVector::require_unit(double eps) const {
  if (!is_unit(eps))
    throw std::invalid_argument("BlochVector: unit norm required, |a| = " +
                                std::to_string(norm()));
  return *this;
}

BlochVector BlochVector::axis(int d, int axis, double sign) {
  if (axis < 1 || axis > d) throw std::invalid_argument("axis out of range");
  Vector c = Vector::Zero(d);
  c(axis - 1) = sign;
  return BlochVector(d, std::move(c));
}

Rotation::Rotation(int dim, Matrix m) : d(dim), matrix(std::move(m)) {
  if (d < 1) throw std::invalid_argument("Rotation: d must be >= 1");
  if (matrix.rows() != d || matrix.cols() != d)
    throw std::invalid_argument("Rotation: matrix must be d x d");
  const double ortho = (matrix.transpose() * matrix - Matrix::Identity(d, d))
                           .cwiseAbs()
                           .maxCoeff();
  if (ortho > 1e-10)
    throw std::invalid_argument("Rotation: R^T R != 1, residual " +
                                std::to_string(ortho));
  const double det = matrix.determinant();
  if (d == 1) {
    if (std::abs(std::abs(det) - 1.0) > tol::kUnitNorm)
      throw std::invalid_argument("Rotation: |det| != 1");
  } else if (std::abs(det - 1.0) > 1e-10) {
    throw std::invalid_argument("Rotation: det != +1 for d >= 2, det = " +
                                std::to_string(det));
  }
}

Rotation Rotation::plane(int d, int i, int j, double theta) {
  if (i < 0 || j < 0 || i >= d || j >= d || i == j)
    throw std::invalid_argument("Rotation::plane: bad coordinate pair");
  Matrix m = Matrix::Identity(d, d);
  const double c = std::cos(theta), s = std::sin(theta);
  m(i, i) = c;
  m(j, j) = c;
  m(i, j) = s;
  m(j, i) = -s;
  return Rotation(d, std::move(m));
}

Vector lift(const BlochVector& a) {
  Vector v(a.d + 1);
  v(0) = 1.0;
  v.tail(a.d) = a.components;
  return v;
}

double outcome_probability(const BlochVector& a, const BlochVector& b) {
  if (a.d != b.d)
    throw std::invalid_argument("outcome_probability: dimension mismatch");
  b.require_unit();
  if (a.norm() > 1.0 + tol::kUnitNorm)
    throw std::invalid_argument("outcome_probability: |a| > 1");
  return 0.5 * (1.0 + a.components.dot(b.components));
}

Matrix lift_rotation(const Rotation& r) {
  Matrix m = Matrix::Zero(r.d + 1, r.d + 1);
  m(0, 0) = 1.0;
  m.block(1, 1, r.d, r.d) = r.matrix;
  return m;
}

Vector gaussian_vector(int d, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = gauss(rng);
  return v;
}

BlochVector random_unit_vector(int d, Rng& rng) {
  if (d < 1) throw std::invalid_argument("random_unit_vector: d must be >= 1");
  Vector v;
  do {
    v = gaussian_vector(d, rng);
  } while (v.norm() < 1e-8);
  v.normalize();
  return BlochVector(d, std::move(v));
}

BlochVector random_unit_vector(int d, std::uint64_t seed) {
  Rng rng(seed);
  return random_unit_vector(d, rng);
}

Rotation random_rotation(int d, Rng& rng) {
  if (d < 1) throw std::invalid_argument("random_rotation: d must be >= 1");
  if (d == 1) return Rotation(1, Matrix::Identity(1, 1));
  Matrix g(d, d);
  for (int j = 0; j < d; ++j) g.col(j) = gaussian_vector(d, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the QR sign ambiguity so Q is Haar on O(d), then correct to SO(d).
  for (int j = 0; j < d; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  if (q.determinant() < 0) q.col(d - 1) = -q.col(d - 1);
  return Rotation(d, std::move(q));
}

Rotation random_rotation(int d, std::uint64_t seed) {
  Rng rng(seed);
  return random_rotation(d, rng);
}

}  // namespace gbitlab
