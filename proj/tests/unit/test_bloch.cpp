#include "doctest.h"
#include "gbitlab/bloch.hpp"

using namespace gbitlab;

TEST_SUITE("bloch") {

TEST_CASE("lift prepends an exact 1") {
  const Vector z = lift(BlochVector::zero(3));
  CHECK(z(0) == 1.0);
  CHECK(z.tail(3).cwiseAbs().maxCoeff() == 0.0);
  const Vector e = lift(BlochVector::axis(2, 1));
  CHECK(e(0) == 1.0);
  CHECK(e(1) == 1.0);
  CHECK(e(2) == 0.0);
  Vector v(2);
  v << 0.6, 0.8;
  const Vector l = lift(BlochVector(2, v));
  CHECK(l(0) == 1.0);
  CHECK(l(1) == 0.6);
  CHECK(l(2) == 0.8);
}

TEST_CASE("outcome probabilities") {
  const BlochVector e1 = BlochVector::axis(3, 1), e2 = BlochVector::axis(3, 2);
  CHECK(outcome_probability(e1, e1) == 1.0);
  CHECK(outcome_probability(e1, -e1) == 0.0);
  CHECK(outcome_probability(e1, e2) == 0.5);
  SUBCASE("errors") {
    CHECK_THROWS_AS(outcome_probability(e1, BlochVector::axis(2, 1)),
                    std::invalid_argument);
    Vector big(3);
    big << 2, 0, 0;
    CHECK_THROWS_AS(outcome_probability(e1, BlochVector(3, big)),
                    std::invalid_argument);  // non-unit measurement
  }
}

TEST_CASE("complementary outcomes sum to one") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const BlochVector a = random_unit_vector(4, rng);
    const BlochVector b = random_unit_vector(4, rng);
    CHECK(outcome_probability(a, b) + outcome_probability(a, -b) == 1.0);
  }
}

TEST_CASE("lift_rotation is the 1 (+) R block matrix") {
  CHECK(lift_rotation(Rotation::identity(3)) == Matrix::Identity(4, 4));
  SUBCASE("quarter turn maps lift(e1) onto lift(+-e2)") {
    const Rotation r = Rotation::plane(2, 0, 1, M_PI / 2);
    const Vector image = lift_rotation(r) * lift(BlochVector::axis(2, 1));
    CHECK(image(0) == doctest::Approx(1.0));
    CHECK(std::abs(image(1)) < 1e-15);
    CHECK(std::abs(image(2)) == doctest::Approx(1.0));
  }
  SUBCASE("determinant is one") {
    Rng rng(5);
    const Rotation r = random_rotation(5, rng);
    CHECK(lift_rotation(r).determinant() ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("lift_rotation respects composition and lifting") {
  Rng rng(17);
  for (int t = 0; t < 20; ++t) {
    const Rotation r1 = random_rotation(4, rng), r2 = random_rotation(4, rng);
    const Matrix lhs = lift_rotation(Rotation(4, r1.matrix * r2.matrix));
    const Matrix rhs = lift_rotation(r1) * lift_rotation(r2);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    const BlochVector a = random_unit_vector(4, rng);
    const Vector via_lift = lift_rotation(r1) * lift(a);
    const Vector direct = lift(BlochVector(4, r1.matrix * a.components));
    CHECK((via_lift - direct).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("rotation invariance of outcome probabilities") {
  Rng rng(23);
  for (int t = 0; t < 50; ++t) {
    const Rotation r = random_rotation(3, rng);
    const BlochVector a = random_unit_vector(3, rng);
    const BlochVector b = random_unit_vector(3, rng);
    const BlochVector ra(3, r.matrix * a.components);
    const BlochVector rb(3, r.matrix * b.components);
    CHECK(outcome_probability(ra, rb) ==
          doctest::Approx(outcome_probability(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("seeded generators are deterministic") {
  CHECK(random_unit_vector(4, 99).components ==
        random_unit_vector(4, 99).components);
  CHECK(random_rotation(4, 99).matrix == random_rotation(4, 99).matrix);
  CHECK(random_unit_vector(4, 99).components !=
        random_unit_vector(4, 100).components);
  CHECK_THROWS_AS(random_unit_vector(0, 1), std::invalid_argument);
}

TEST_CASE("random unit vectors: norm and Monte-Carlo mean") {
  Rng rng(31);
  Vector mean = Vector::Zero(3);
  for (int t = 0; t < 10000; ++t) {
    const BlochVector a = random_unit_vector(3, rng);
    CHECK(std::abs(a.norm() - 1.0) <= 1e-12);
    mean += a.components;
  }
  CHECK((mean / 10000).norm() < 0.05);
}

TEST_CASE("random rotations are group elements") {
  Rng rng(37);
  for (int d : {2, 3, 5}) {
    const Rotation r = random_rotation(d, rng);
    CHECK((r.matrix.transpose() * r.matrix - Matrix::Identity(d, d))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK(r.matrix.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("rotation validation") {
  Matrix bad = Matrix::Identity(3, 3);
  bad(0, 0) = 2.0;
  CHECK_THROWS_AS(Rotation(3, bad), std::invalid_argument);
  Matrix reflect = Matrix::Identity(3, 3);
  reflect(2, 2) = -1.0;
  CHECK_THROWS_AS(Rotation(3, reflect), std::invalid_argument);
  // O(1) is allowed for the classical bit only.
  CHECK_NOTHROW(Rotation(1, -Matrix::Identity(1, 1)));
}

TEST_CASE("unit-norm enforcement is a gate, not a renormalization") {
  Vector v(3);
  v << 0.5, 0, 0;
  const BlochVector a(3, v);
  CHECK_THROWS_AS(a.require_unit(), std::invalid_argument);
  CHECK(a.components(0) == 0.5);
}

}  // TEST_SUITE
