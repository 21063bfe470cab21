#pragma once

#include <vector>

#include "gbitlab/bloch.hpp"
#include "gbitlab/common.hpp"

namespace gbitlab {

// Multi-index convention, fixed across the library and the file formats:
// a flat index into (R^{d+1})^{otimes n} encodes (alpha_1, ..., alpha_n),
// 0 <= alpha_i <= d, in row-major mixed radix with wire 1 slowest:
//   flat = alpha_1 * (d+1)^{n-1} + alpha_2 * (d+1)^{n-2} + ... + alpha_n.
struct MultiIndex {
  int d = 0, n = 0;

  MultiIndex(int d_, int n_) : d(d_), n(n_) { tensor_dim(d_, n_); }

  long dim() const { return tensor_dim(d, n); }
  long encode(const std::vector<int>& idx) const;
  std::vector<int> decode(long flat) const;
  int digit(long flat, int site) const;  // site in [0, n)
  long with_digit(long flat, int site, int value) const;
};

/// Kronecker product of the lifted factors, factor order preserved.
struct ProductLift {
  int d = 0, n = 0;
  Vector vector;
};

ProductLift product_lift(const std::vector<BlochVector>& factors);
/// As above with one designated slot replaced: used for flip constraints.
Vector lifted_product(const std::vector<BlochVector>& factors);

/// A square matrix on the (d+1)^n tensor space with multi-index access.
struct OperatorTensor {
  int d = 0, n = 0;
  Matrix matrix;

  OperatorTensor() = default;
  OperatorTensor(int d_, int n_, Matrix m);

  static OperatorTensor identity(int d, int n);
  double at(const std::vector<int>& upper, const std::vector<int>& lower) const;
  MultiIndex index() const { return MultiIndex(d, n); }
};

/// Kronecker product of per-site (d+1)x(d+1) matrices.
OperatorTensor tensor_product(int d, const std::vector<Matrix>& site_matrices);

/// 2^{-n} v(meas)^T G v(preps). Returns the raw scalar; genuine
/// transformations land in [0,1] but callers assert the range.
double joint_probability(const OperatorTensor& g,
                         const std::vector<BlochVector>& preps,
                         const std::vector<BlochVector>& meas);

/// Hilbert-Schmidt inner product tr(X^T Y).
double hs_inner(const OperatorTensor& x, const OperatorTensor& y);
double hs_norm(const OperatorTensor& x);

/// Applies a (d+1)x(d+1) map to one tensor factor of a vector.
Vector apply_site_map_vec(const MultiIndex& mi, const Vector& v, int site,
                          const Matrix& map);

/// T X T^T with T the Kronecker product of per-site orthogonal maps.
OperatorTensor conjugate_local(const OperatorTensor& x,
                               const std::vector<Matrix>& site_maps);

/// Permutes tensor factors: site i of the result is site perm[i] of x.
/// Bookkeeping on the matrix representation; not a physical swap gate.
OperatorTensor reorder_sites(const OperatorTensor& x,
                             const std::vector<int>& perm);
Vector reorder_sites_vec(const MultiIndex& mi, const Vector& v,
                         const std::vector<int>& perm);

}  // namespace gbitlab
