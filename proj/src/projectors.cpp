#include "gbitlab/projectors.hpp"

#include <cmath>

namespace gbitlab {

namespace {

int dim_of(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 2)
    throw std::invalid_argument("projector: matrix must be square, >= 2x2");
  return static_cast<int>(m.rows()) - 1;
}

void check_membership(const Matrix& m) {
  const int d = dim_of(m);
  const SiteBasis basis(d);
  const double nm = m.norm();
  if (nm == 0.0) return;
  const double res = basis.membership_residual(m) / nm;
  if (res > tol::kMembership)
    throw std::invalid_argument(
        "projector: input outside A+B+I, relative residual " +
        std::to_string(res));
}

}  // namespace

Matrix phi_I(const Matrix& m) {
  check_membership(m);
  return class_project(m, Subspace::I);
}

Matrix phi_stabilizer(const Matrix& m, int j) {
  const int d = dim_of(m);
  if (d == 2)
    throw std::invalid_argument(
        "phi_stabilizer: trivial stabilizer at d=2; use phi_AI");
  if (d == 3)
    throw std::invalid_argument(
        "phi_stabilizer: projector claim fails at d=3, the SO(2) stabilizer "
        "representation is not absolutely irreducible");
  if (j < 1 || j > d) throw std::invalid_argument("phi_stabilizer: bad axis");
  check_membership(m);
  Vector ej = Vector::Zero(d);
  ej(j - 1) = 1.0;
  const Matrix bj = b_matrix(ej);
  const double coeff = m.cwiseProduct(bj).sum() / 2.0;
  return class_project(m, Subspace::I) + coeff * bj;
}

Matrix phi_B(const Matrix& m, int j) {
  const int d = dim_of(m);
  if (d == 2) {
    check_membership(m);
    return class_project(m, Subspace::B);  // companion 1 - phi_AI
  }
  return phi_stabilizer(m, j) - phi_I(m);
}

Matrix psi_2x2(const Matrix& m) {
  if (m.rows() != 2 || m.cols() != 2)
    throw std::invalid_argument("psi_2x2: need a 2x2 block");
  Matrix out(2, 2);
  const double tr = 0.5 * (m(0, 0) + m(1, 1));
  const double rot = 0.5 * (m(0, 1) - m(1, 0));
  out << tr, rot, -rot, tr;
  return out;
}

Matrix phi_prime(const Matrix& m) {
  const int d = dim_of(m);
  check_membership(m);
  const int y = (d % 2 == 0) ? 1 : 2;
  const int z = d / 2;
  Matrix out = Matrix::Zero(d + 1, d + 1);
  out.block(0, 0, y, y) = m.block(0, 0, y, y);
  for (int j = 1; j <= z; ++j) {
    const int s = block_start(d, j);
    out.block(s, s, 2, 2) = psi_2x2(m.block(s, s, 2, 2));
  }
  return out;
}

Matrix phi_A(const Matrix& m) {
  const int d = dim_of(m);
  if (d < 4)
    throw std::invalid_argument(
        "phi_A: requires d >= 4 (no span(B) projector below)");
  if (d % 2 == 0) return phi_prime(m) - phi_I(m);
  return phi_prime(m) - phi_I(m) - phi_B(m);
}

Matrix phi_AI(const Matrix& m) {
  const int d = dim_of(m);
  if (d != 2) throw std::invalid_argument("phi_AI: defined for d = 2 only");
  check_membership(m);
  const Matrix a1 = a_elementary(2, 1, 2);
  const double coeff = m.cwiseProduct(a1).sum() / 2.0;
  return class_project(m, Subspace::I) + coeff * a1;
}

Vector projector_coord_diagonal(const SiteBasis& basis,
                                const ProjectorSpec& spec) {
  const int d = basis.d();
  Vector diag = Vector::Zero(basis.q());
  switch (spec.kind) {
    case ProjectorKind::I:
      diag(0) = 1.0;
      return diag;
    case ProjectorKind::Stabilizer:
      if (d < 4) throw std::invalid_argument("Stabilizer kind: d >= 4");
      diag(0) = 1.0;
      diag(spec.axis) = 1.0;
      return diag;
    case ProjectorKind::B:
      if (d == 2) {
        diag(1) = diag(2) = 1.0;
        return diag;
      }
      if (d == 3) throw std::invalid_argument("B kind: unavailable at d=3");
      diag(spec.axis) = 1.0;
      return diag;
    case ProjectorKind::Prime:
      diag(0) = 1.0;
      if (d % 2 == 1) diag(1) = 1.0;
      for (int j = 1; j <= d / 2; ++j) {
        const int s = block_start(d, j);  // Bloch coords (s, s+1), 1-indexed
        diag(basis.a_index(s, s + 1)) = 1.0;
      }
      return diag;
    case ProjectorKind::A:
      if (d < 4) throw std::invalid_argument("A kind: d >= 4");
      for (int j = 1; j <= d / 2; ++j) {
        const int s = block_start(d, j);
        diag(basis.a_index(s, s + 1)) = 1.0;
      }
      return diag;
    case ProjectorKind::AI:
      if (d != 2) throw std::invalid_argument("AI kind: d = 2 only");
      diag(0) = 1.0;
      diag(basis.a_index(1, 2)) = 1.0;
      return diag;
  }
  throw std::logic_error("projector_coord_diagonal: unreachable");
}

OperatorTensor tensor_projector(const std::vector<ProjectorSpec>& per_site,
                                const OperatorTensor& x,
                                double membership_tol) {
  if (static_cast<int>(per_site.size()) != x.n)
    throw std::invalid_argument("tensor_projector: one spec per site required");
  const double res = tensor_membership_residual(x);
  if (res > membership_tol)
    throw std::invalid_argument(
        "tensor_projector: X outside (A+B+I)^n, relative residual " +
        std::to_string(res));
  const SiteBasis basis(x.d);
  OperatorTensor out = x;
  for (int s = 0; s < x.n; ++s) {
    const Vector diag = projector_coord_diagonal(basis, per_site[s]);
    out = apply_site_linear_map(out, s, [&](const Matrix& m) -> Matrix {
      return basis.from_coords(diag.cwiseProduct(basis.coords(m)).eval());
    });
  }
  return out;
}

Matrix haar_average_so(const Matrix& m, int samples, std::uint64_t seed) {
  const int d = dim_of(m);
  Rng rng(seed);
  Matrix acc = Matrix::Zero(d + 1, d + 1);
  for (int i = 0; i < samples; ++i) {
    const Matrix r = lift_rotation(random_rotation(d, rng));
    acc += r * m * r.transpose();
  }
  return acc / samples;
}

Matrix haar_average_stabilizer(const Matrix& m, int j, int samples,
                               std::uint64_t seed) {
  const int d = dim_of(m);
  if (j < 1 || j > d) throw std::invalid_argument("bad stabilizer axis");
  if (d < 2) throw std::invalid_argument("bad dimension");
  Rng rng(seed);
  // Coordinates other than j, into which a Haar SO(d-1) block is embedded.
  std::vector<int> rest;
  for (int k = 1; k <= d; ++k)
    if (k != j) rest.push_back(k);
  Matrix acc = Matrix::Zero(d + 1, d + 1);
  for (int i = 0; i < samples; ++i) {
    const Matrix s = (d == 2) ? Matrix::Identity(1, 1)
                              : random_rotation(d - 1, rng).matrix;
    Matrix r = Matrix::Identity(d + 1, d + 1);
    for (int a = 0; a < d - 1; ++a)
      for (int b = 0; b < d - 1; ++b) r(rest[a], rest[b]) = s(a, b);
    acc += r * m * r.transpose();
  }
  return acc / samples;
}

Matrix torus_average(const Matrix& m, int points_per_angle) {
  const int d = dim_of(m);
  const int z = d / 2;
  const int k = points_per_angle;
  if (k < 5)
    throw std::invalid_argument("torus_average: need >= 5 points per angle");
  std::vector<int> grid(z, 0);
  Matrix acc = Matrix::Zero(d + 1, d + 1);
  long total = 1;
  for (int i = 0; i < z; ++i) total *= k;
  for (long step = 0; step < total; ++step) {
    long s = step;
    Matrix r = Matrix::Identity(d + 1, d + 1);
    for (int j = 1; j <= z; ++j) {
      const double theta = 2.0 * M_PI * (s % k) / k;
      s /= k;
      const int b = block_start(d, j);
      r(b, b) = std::cos(theta);
      r(b + 1, b + 1) = std::cos(theta);
      r(b, b + 1) = std::sin(theta);
      r(b + 1, b) = -std::sin(theta);
    }
    acc += r * m * r.transpose();
  }
  return acc / double(total);
}

}  // namespace gbitlab
