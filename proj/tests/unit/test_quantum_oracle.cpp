#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "gbitlab/constraints.hpp"
#include "gbitlab/quantum_oracle.hpp"
#include "test_helpers.hpp"

using namespace gbitlab;
using gbitlab::testing::random_tuple;

namespace {

CMatrix random_unitary(int n, Rng& rng) {
  std::normal_distribution<double> gauss;
  const long dim = 1L << n;
  CMatrix h(dim, dim);
  for (long r = 0; r < dim; ++r)
    for (long c = 0; c < dim; ++c)
      h(r, c) = std::complex<double>(gauss(rng), gauss(rng));
  h = 0.5 * (h + h.adjoint()).eval();
  return (std::complex<double>(0, -1) * h).exp();
}

HermitianOperator random_traceless(int n, Rng& rng) {
  std::normal_distribution<double> gauss;
  const long dim = 1L << n;
  CMatrix h(dim, dim);
  for (long r = 0; r < dim; ++r)
    for (long c = 0; c < dim; ++c)
      h(r, c) = std::complex<double>(gauss(rng), gauss(rng));
  h = 0.5 * (h + h.adjoint()).eval();
  h -= (h.trace() / double(dim)) * CMatrix::Identity(dim, dim);
  return HermitianOperator(n, h);
}

}  // namespace

TEST_SUITE("quantum_oracle") {

TEST_CASE("adjoint generator of sigma_z/2 rotates the x-y plane") {
  const HermitianOperator h(1, 0.5 * pauli(3));
  const OperatorTensor x = adjoint_generator(h);
  CHECK(x.matrix.row(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(x.matrix.col(0).cwiseAbs().maxCoeff() == 0.0);
  for (double t : {0.3, 1.2}) {
    const Matrix gate = (t * x.matrix).exp();
    // density-matrix evolution of the +x state
    const CMatrix u =
        (std::complex<double>(0, -1) * t * h.matrix).exp();
    const CMatrix rho0 = density_from_bloch({BlochVector::axis(3, 1)});
    const CMatrix rho1 = u * rho0 * u.adjoint();
    Vector expect(4);
    expect << 1.0, (rho1 * pauli(1)).trace().real(),
        (rho1 * pauli(2)).trace().real(), (rho1 * pauli(3)).trace().real();
    const Vector got = gate * lift(BlochVector::axis(3, 1));
    CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(got(3)) < 1e-12);  // stays in the x-y plane
  }
}

TEST_CASE("adjoint generator rejects a trace") {
  CHECK_THROWS_AS(adjoint_generator(HermitianOperator(1, pauli(0))),
                  std::invalid_argument);
}

TEST_CASE("two-qubit interaction generator passes the constraints") {
  const HermitianOperator h(2, 0.5 * pauli_product({1, 1}));
  const OperatorTensor x = adjoint_generator(h);
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const auto preps = random_tuple(3, 2, rng);
    const auto meas = random_tuple(3, 2, rng);
    for (int k = 0; k < 2; ++k)
      CHECK(std::abs(first_order_value(x, preps, meas, k)) < 1e-10);
    CHECK(std::abs(diagonal_first_order(x, preps)) < 1e-10);
    for (int k = 0; k < 2; ++k)
      CHECK(second_order_flip(x, preps, meas, k) > -1e-10);
    CHECK(second_order_diag(x, preps) < 1e-10);
  }
}

TEST_CASE("transfer matrices") {
  SUBCASE("identity") {
    const OperatorTensor t = transfer_matrix(CMatrix::Identity(4, 4), 2);
    CHECK((t.matrix - Matrix::Identity(16, 16)).norm() < 1e-12);
  }
  SUBCASE("single-qubit rotation is a lifted SO(3) block") {
    const double theta = 0.77;
    const OperatorTensor t = transfer_matrix(gate_unitary("rz", theta), 1);
    CHECK(t.matrix(0, 0) == doctest::Approx(1.0));
    CHECK(t.matrix.row(0).tail(3).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(t.matrix.col(0).tail(3).cwiseAbs().maxCoeff() < 1e-12);
    const Matrix r = t.matrix.block(1, 1, 3, 3);
    CHECK((r.transpose() * r - Matrix::Identity(3, 3)).norm() < 1e-12);
    CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r(2, 2) == doctest::Approx(1.0));  // rotation about z
  }
  SUBCASE("CNOT on |00> stays put") {
    const OperatorTensor t =
        transfer_matrix(embed_unitary(gate_unitary("cnot"), {0, 1}, 2), 2);
    const BlochVector e3 = BlochVector::axis(3, 3);
    CHECK(joint_probability(t, {e3, e3}, {e3, e3}) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("non-unitary input is rejected") {
    CHECK_THROWS_AS(transfer_matrix(2.0 * CMatrix::Identity(2, 2), 1),
                    std::invalid_argument);
  }
}

TEST_CASE("oracle equivalence: transfer picture vs Born rule") {
  Rng rng(7);
  for (int n : {1, 2}) {
    for (int t = 0; t < 50; ++t) {
      const CMatrix u = random_unitary(n, rng);
      const OperatorTensor g = transfer_matrix(u, n);
      const auto preps = random_tuple(3, n, rng);
      const auto meas = random_tuple(3, n, rng);
      const CMatrix rho =
          u * density_from_bloch(preps) * u.adjoint();
      const std::vector<double> born = density_probabilities(rho, meas);
      CHECK(std::abs(joint_probability(g, preps, meas) - born[0]) < 1e-10);
    }
  }
}

TEST_CASE("adjoint_generator is a Lie-algebra homomorphism") {
  Rng rng(11);
  for (int t = 0; t < 10; ++t) {
    const HermitianOperator h = random_traceless(2, rng);
    const HermitianOperator k = random_traceless(2, rng);
    const CMatrix comm = std::complex<double>(0, -1) *
                         (h.matrix * k.matrix - k.matrix * h.matrix);
    const OperatorTensor lhs = adjoint_generator(HermitianOperator(2, comm));
    const Matrix rhs = adjoint_generator(h).matrix * adjoint_generator(k).matrix -
                       adjoint_generator(k).matrix * adjoint_generator(h).matrix;
    CHECK((lhs.matrix - rhs).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("the fifteen adjoint images at n=2 are independent") {
  const auto basis = traceless_basis(2);
  REQUIRE(basis.size() == 15);
  Matrix stacked(15, 256);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const OperatorTensor x = adjoint_generator(basis[i]);
    for (long r = 0; r < 16; ++r)
      for (long c = 0; c < 16; ++c) stacked(i, r * 16 + c) = x.matrix(r, c);
  }
  Eigen::BDCSVD<Matrix> svd(stacked);
  CHECK(svd.singularValues()(14) > 1e-8);
}

TEST_CASE("embed_unitary places gates on the right wires") {
  // CNOT with control on wire 2, target on wire 1 of a 2-qubit register:
  // |01> (wire2 = 1) flips wire 1 -> |11>.
  const CMatrix u = embed_unitary(gate_unitary("cnot"), {1, 0}, 2);
  CMatrix in = CMatrix::Zero(4, 1);
  in(1, 0) = 1.0;  // |01>
  const CMatrix out = u * in;
  CHECK(std::abs(out(3, 0) - 1.0) < 1e-14);
}

}  // TEST_SUITE
