#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace gbitlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Default tolerances used across the library. Overridable where an
// operation takes an explicit tolerance argument.
namespace tol {
inline constexpr double kUnitNorm = 1e-12;
inline constexpr double kOrthogonal = 1e-10;
inline constexpr double kMembership = 1e-8;   // relative, per HS norm
inline constexpr double kSvdCutoff = 1e-9;    // relative to sigma_max
inline constexpr double kConstraint = 1e-8;
inline constexpr double kCertMargin = 1e-8;   // relative to |Y|_hs^2
}  // namespace tol

// Hard cap on the composite dimension (d+1)^n for dense tensors.
inline constexpr long kDenseCap = 4096;

inline long tensor_dim(int d, int n) {
  long dim = 1;
  for (int i = 0; i < n; ++i) {
    dim *= (d + 1);
    if (dim > kDenseCap)
      throw std::invalid_argument("composite dimension (d+1)^n exceeds cap " +
                                  std::to_string(kDenseCap));
  }
  return dim;
}

// splitmix64, used to derive independent per-task seeds from a master seed.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

}  // namespace gbitlab
