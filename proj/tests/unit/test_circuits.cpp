#include "doctest.h"
#include "gbitlab/circuits.hpp"
#include "gbitlab/constraints.hpp"
#include "gbitlab/quantum_oracle.hpp"
#include "test_helpers.hpp"

using namespace gbitlab;
using gbitlab::testing::random_tuple;

TEST_SUITE("circuits") {

TEST_CASE("empty circuit with aligned measurements") {
  Rng rng(3);
  Circuit c;
  c.d = 3;
  c.n = 2;
  c.preps = random_tuple(3, 2, rng);
  c.meas = c.preps;
  const OutcomeDistribution dist = evaluate(c);
  CHECK(dist.probabilities[0] == doctest::Approx(1.0));
  double sum = 0;
  for (double p : dist.probabilities) sum += p;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("a rotation undone by its inverse is the empty circuit") {
  Rng rng(5);
  Circuit c;
  c.d = 3;
  c.n = 2;
  c.preps = random_tuple(3, 2, rng);
  c.meas = random_tuple(3, 2, rng);
  const OutcomeDistribution base = evaluate(c);
  const Rotation r = random_rotation(3, rng);
  c.gates.emplace_back(LocalGate{0, r});
  c.gates.emplace_back(LocalGate{0, Rotation(3, r.matrix.transpose())});
  const OutcomeDistribution undone = evaluate(c);
  for (std::size_t i = 0; i < base.probabilities.size(); ++i)
    CHECK(undone.probabilities[i] ==
          doctest::Approx(base.probabilities[i]).epsilon(1e-12));
}

TEST_CASE("gate order matters for non-commuting rotations") {
  Circuit c;
  c.d = 3;
  c.n = 1;
  c.preps = {BlochVector::axis(3, 1)};
  c.meas = {BlochVector::axis(3, 2)};
  const Rotation rx = Rotation::plane(3, 1, 2, M_PI / 2);
  const Rotation rz = Rotation::plane(3, 0, 1, M_PI / 2);
  c.gates = {GateSpec(LocalGate{0, rx}), GateSpec(LocalGate{0, rz})};
  const auto ab = evaluate(c);
  c.gates = {GateSpec(LocalGate{0, rz}), GateSpec(LocalGate{0, rx})};
  const auto ba = evaluate(c);
  CHECK(std::abs(ab.probabilities[0] - ba.probabilities[0]) > 0.1);
}

TEST_CASE("quantum CNOT matches the density-matrix oracle") {
  Rng rng(7);
  Circuit c;
  c.d = 3;
  c.n = 2;
  c.preps = random_tuple(3, 2, rng);
  c.meas = random_tuple(3, 2, rng);
  c.gates.emplace_back(QuantumGate{"cnot", {0, 1}, 0.0});
  const OutcomeDistribution dist = evaluate(c);
  const CMatrix u = embed_unitary(gate_unitary("cnot"), {0, 1}, 2);
  const CMatrix rho = u * density_from_bloch(c.preps) * u.adjoint();
  const std::vector<double> born = density_probabilities(rho, c.meas);
  for (std::size_t i = 0; i < born.size(); ++i)
    CHECK(std::abs(dist.probabilities[i] - born[i]) < 1e-10);
}

TEST_CASE("gate_from_generator") {
  SUBCASE("zero generator gives the exact identity") {
    const OperatorTensor zero(2, 2, Matrix::Zero(9, 9));
    CHECK((gate_from_generator(zero, 3.7).matrix - Matrix::Identity(9, 9))
              .norm() == 0.0);
  }
  SUBCASE("local generators exponentiate site by site") {
    Rng rng(11);
    const int d = 3;
    const Matrix abar = gbitlab::testing::random_antisymmetric(d, rng);
    const Matrix site_gen = a_matrix(abar);
    const Matrix id = Matrix::Identity(d + 1, d + 1);
    const OperatorTensor x = tensor_product(d, {site_gen, id});
    const double t = 0.63;
    const OperatorTensor gate = gate_from_generator(x, t);
    // compare against the per-site exponential
    Matrix site_exp = Matrix::Identity(d + 1, d + 1);
    {
      Matrix acc = Matrix::Identity(d + 1, d + 1);
      Matrix term = Matrix::Identity(d + 1, d + 1);
      for (int k = 1; k < 40; ++k) {
        term = term * (t / k) * site_gen;
        acc += term;
      }
      site_exp = acc;
    }
    const OperatorTensor expect = tensor_product(d, {site_exp, id});
    CHECK((gate.matrix - expect.matrix).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("exponentials invert") {
    Rng rng(13);
    std::normal_distribution<double> gauss;
    Matrix m(9, 9);
    for (long r = 0; r < 9; ++r)
      for (long c = 0; c < 9; ++c) m(r, c) = gauss(rng);
    const OperatorTensor x(2, 2, m);
    const Matrix prod = gate_from_generator(x, 0.4).matrix *
                        gate_from_generator(x, -0.4).matrix;
    CHECK((prod - Matrix::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("non-finite time is rejected") {
    CHECK_THROWS_AS(
        gate_from_generator(OperatorTensor::identity(2, 1),
                            std::numeric_limits<double>::infinity()),
        std::invalid_argument);
  }
}

TEST_CASE("local circuits never correlate wires") {
  Rng rng(17);
  for (int d : {2, 3}) {
    for (int trial = 0; trial < 30; ++trial) {
      Circuit c;
      c.d = d;
      c.n = 3;
      c.preps = random_tuple(d, 3, rng);
      c.meas = random_tuple(d, 3, rng);
      const int n_gates = 1 + static_cast<int>(rng() % 4);
      for (int g = 0; g < n_gates; ++g)
        c.gates.emplace_back(LocalGate{static_cast<int>(rng() % 3),
                                       random_rotation(d, rng)});
      const OutcomeDistribution dist = evaluate(c);
      CHECK(dist.correlation_residual < 1e-10);
    }
  }
}

TEST_CASE("a Bell-type circuit shows maximal correlation 0.5") {
  Circuit c;
  c.d = 3;
  c.n = 2;
  c.preps = {BlochVector::axis(3, 3), BlochVector::axis(3, 3)};
  c.meas = {BlochVector::axis(3, 3), BlochVector::axis(3, 3)};
  c.gates.emplace_back(QuantumGate{"h", {0}, 0.0});
  c.gates.emplace_back(QuantumGate{"cnot", {0, 1}, 0.0});
  const OutcomeDistribution dist = evaluate(c);
  CHECK(dist.probabilities[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(dist.probabilities[3] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(dist.correlation_residual == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("correlation_check on explicit distributions") {
  CHECK(correlation_check({0.25, 0.25, 0.25, 0.25}, 2) ==
        doctest::Approx(0.0));
  CHECK(correlation_check({0.5, 0.0, 0.0, 0.5}, 2) == doctest::Approx(0.5));
  CHECK_THROWS_AS(correlation_check({0.5, 0.5, 0.0}, 2),
                  std::invalid_argument);
}

TEST_CASE("inadmissible raw gates are flagged") {
  // A coordinate swap on the lifted space is orthogonal but produces
  // out-of-range outcome probabilities.
  Matrix swap01 = Matrix::Identity(3, 3);
  swap01(0, 0) = swap01(1, 1) = 0.0;
  swap01(0, 1) = swap01(1, 0) = 1.0;
  Circuit c;
  c.d = 2;
  c.n = 1;
  c.preps = {-BlochVector::axis(2, 1)};
  c.meas = {BlochVector::axis(2, 1)};
  c.gates.emplace_back(RawGate{OperatorTensor(2, 1, swap01)});
  CHECK_THROWS_AS(evaluate(c), std::runtime_error);
}

TEST_CASE("raw gates must be orthogonal") {
  Circuit c;
  c.d = 2;
  c.n = 1;
  c.preps = {BlochVector::axis(2, 1)};
  c.meas = {BlochVector::axis(2, 1)};
  c.gates.emplace_back(RawGate{OperatorTensor(2, 1, 2.0 * Matrix::Identity(3, 3))});
  CHECK_THROWS_AS(evaluate(c), std::invalid_argument);
}

TEST_CASE("quantum gates refuse d != 3") {
  Circuit c;
  c.d = 2;
  c.n = 1;
  c.preps = {BlochVector::axis(2, 1)};
  c.meas = {BlochVector::axis(2, 1)};
  c.gates.emplace_back(QuantumGate{"h", {0}, 0.0});
  CHECK_THROWS_AS(evaluate(c), std::invalid_argument);
}

}  // TEST_SUITE
