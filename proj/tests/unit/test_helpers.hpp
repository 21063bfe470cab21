#pragma once

#include <vector>

#include "gbitlab/subspaces.hpp"

namespace gbitlab::testing {

inline Matrix random_membership_matrix(int d, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const SiteBasis basis(d);
  Vector c(basis.q());
  for (long i = 0; i < c.size(); ++i) c(i) = gauss(rng);
  return basis.from_coords(c);
}

inline Matrix random_unit_membership_matrix(int d, Rng& rng) {
  Matrix m = random_membership_matrix(d, rng);
  return m / m.norm();
}

inline std::vector<BlochVector> random_tuple(int d, int n, Rng& rng) {
  std::vector<BlochVector> out;
  for (int i = 0; i < n; ++i) out.push_back(random_unit_vector(d, rng));
  return out;
}

inline Matrix random_antisymmetric(int d, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(d, d);
  for (int i = 0; i < d; ++i) {
    m(i, i) = 0.0;
    for (int j = i + 1; j < d; ++j) {
      m(i, j) = gauss(rng);
      m(j, i) = -m(i, j);
    }
  }
  return m;
}

}  // namespace gbitlab::testing
