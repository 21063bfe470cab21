#pragma once

#include "gbitlab/common.hpp"

namespace gbitlab {

/// A point of the d-ball: a gbit state, or (at unit norm) a two-outcome
/// measurement direction. Values are immutable after construction.
struct BlochVector {
  int d = 0;
  Vector components;

  BlochVector() = default;
  BlochVector(int dim, Vector c);

  double norm() const { return components.norm(); }
  bool is_unit(double eps = tol::kUnitNorm) const {
    return std::abs(norm() - 1.0) <= eps;
  }
  // Validation, not renormalization: callers that need a pure state or a
  // measurement direction must pass this gate explicitly.
  const BlochVector& require_unit(double eps = tol::kUnitNorm) const;

  BlochVector operator-() const { return BlochVector(d, -components); }

  static BlochVector zero(int d) { return BlochVector(d, Vector::Zero(d)); }
  static BlochVector axis(int d, int axis, double sign = 1.0);
};

/// A single-gbit reversible gate: R in SO(d). For d = 1 only, det = -1 is
/// also accepted (the classical bit flip).
struct Rotation {
  int d = 0;
  Matrix matrix;

  Rotation() = default;
  Rotation(int dim, Matrix m);

  static Rotation identity(int d) { return Rotation(d, Matrix::Identity(d, d)); }
  /// Plane rotation by theta in coordinates (i, j), zero-indexed.
  static Rotation plane(int d, int i, int j, double theta);
};

/// (1, a) in R^{d+1}; the affine embedding that makes probabilities linear.
Vector lift(const BlochVector& a);

/// (1 + a.b)/2 for a state a and a unit measurement direction b.
double outcome_probability(const BlochVector& a, const BlochVector& b);

/// 1 (+) R as a (d+1)x(d+1) orthogonal matrix; lift_rotation(R) * lift(a) =
/// lift(R a).
Matrix lift_rotation(const Rotation& r);

BlochVector random_unit_vector(int d, std::uint64_t seed);
Rotation random_rotation(int d, std::uint64_t seed);

// Sampling from an existing generator (used by Haar averages and searches).
Vector gaussian_vector(int d, Rng& rng);
BlochVector random_unit_vector(int d, Rng& rng);
Rotation random_rotation(int d, Rng& rng);

}  // namespace gbitlab
