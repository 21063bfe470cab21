#pragma once

#include <memory>
#include <optional>

#include "gbitlab/subspaces.hpp"

namespace gbitlab {

// ---------------------------------------------------------------------------
// Admissibility constraint evaluations. Sites are 0-indexed in code; the
// serialized formats use 1-based site numbers.
//
//   first_order_value:      v(b_1..,-a_k,..b_n)^T X  v(a_1..a_n)  (= 0)
//   diagonal_first_order:   v(a)^T X v(a)                          (= 0)
//   second_order_flip:      v(b_1..,-a_k,..b_n)^T X^2 v(a)         (>= 0)
//   second_order_diag:      v(a)^T X^2 v(a)                        (<= 0)
//   second_order_with_zeros: flip with zero vectors allowed in any
//                            slot except k.
// ---------------------------------------------------------------------------

double first_order_value(const OperatorTensor& x,
                         const std::vector<BlochVector>& preps,
                         const std::vector<BlochVector>& meas, int site);
double diagonal_first_order(const OperatorTensor& x,
                            const std::vector<BlochVector>& preps);
double second_order_flip(const OperatorTensor& x,
                         const std::vector<BlochVector>& preps,
                         const std::vector<BlochVector>& meas, int site);
double second_order_diag(const OperatorTensor& x,
                         const std::vector<BlochVector>& preps);
double second_order_with_zeros(const OperatorTensor& x,
                               const std::vector<BlochVector>& preps,
                               const std::vector<BlochVector>& meas, int site);

// ---------------------------------------------------------------------------
// Product basis: orthonormal basis of (A+B+I)^{otimes n} indexed by per-site
// labels in SiteBasis order, mixed radix q with site 0 slowest.
// ---------------------------------------------------------------------------
class ProductBasis {
 public:
  ProductBasis(int d, int n);

  int d() const { return d_; }
  int n() const { return n_; }
  const SiteBasis& site() const { return site_; }
  long size() const { return size_; }  // q^n

  long encode(const std::vector<int>& labels) const;
  std::vector<int> decode(long id) const;
  int digit(long id, int s) const;
  long with_label(long id, int s, int value) const;
  SectorString sector_of(long id) const;
  bool label_has_a(long id) const;
  bool label_is_local(long id) const;  // one A digit, I elsewhere

  OperatorTensor materialize_label(long id) const;
  OperatorTensor materialize(const Vector& coeffs) const;
  Vector coords_of(const OperatorTensor& x) const;

  Vector reorder(const Vector& coeffs, const std::vector<int>& perm) const;
  Vector apply_site_matrix(const Vector& coeffs, int s, const Matrix& u) const;
  Vector apply_site_diagonal(const Vector& coeffs, int s,
                             const Vector& diag) const;

 private:
  int d_, n_;
  SiteBasis site_;
  long size_;
};

struct SvdDiagnostics {
  double sigma_max = 0, kept_min = 0, discarded_max = 0;
  double rank_gap = 0;  // kept_min / discarded_max
  long rank = 0;
  bool unstable = false;  // rank gap below 10x the cutoff ratio
};

/// A linear space of candidate generators: hs-orthonormal basis stored in
/// product-basis coordinates (rows of `coeffs`).
struct GeneratorSpace {
  std::shared_ptr<const ProductBasis> basis;
  Matrix coeffs;  // dim x q^n, orthonormal rows
  double tolerance = 0;

  long dim() const { return coeffs.rows(); }
  OperatorTensor materialize(long i) const;
  /// Coordinates of the projection of `v` onto the space.
  Vector project(const Vector& label_coords) const;
  double membership_residual(const Vector& label_coords) const;
};

// ---------------------------------------------------------------------------
// First-order constraint system. Assembled in factorized form:
//  - per site, flip-constraint rows over the probe set
//    {e_i, -e_i, (e_i+e_j)/sqrt2, (e_i-e_j)/sqrt2}; their SVD null space is
//    cross-checked against the closed A+B+I basis, which then carries the
//    site factor;
//  - diagonal-constraint rows over product probes {+-e_i}^n plus seeded
//    random unit tuples, expressed in product-basis coordinates.
// null_space() runs the SVD with a relative cutoff and returns the
// surviving right-singular directions, orthonormalized in output order.
// ---------------------------------------------------------------------------
class FirstOrderSystem {
 public:
  FirstOrderSystem(int d, int n, std::uint64_t seed = 0x5eed,
                   int extra_random_rows = 50);

  int d() const { return d_; }
  int n() const { return n_; }
  std::shared_ptr<const ProductBasis> basis() const { return basis_; }
  const Matrix& diag_rows() const { return diag_rows_; }
  const SvdDiagnostics& site_svd() const { return site_svd_; }

  /// Structured residuals of X against the system: per-site flip residuals
  /// followed by diagonal row values.
  Vector apply(const OperatorTensor& x) const;

 private:
  int d_, n_;
  std::shared_ptr<const ProductBasis> basis_;
  Matrix diag_rows_;  // rows x q^n
  SvdDiagnostics site_svd_;
  friend GeneratorSpace null_space(const FirstOrderSystem&, double,
                                   SvdDiagnostics*);
};

GeneratorSpace null_space(const FirstOrderSystem& system,
                          double tol = tol::kSvdCutoff,
                          SvdDiagnostics* diagnostics = nullptr);

/// Orthonormal basis of sum_i 1 x..x A_(site i) x..x 1.
GeneratorSpace local_algebra_basis(int d, int n);

struct LocalityCheck {
  bool local = false;
  double residual = 0;
};
LocalityCheck is_local(const OperatorTensor& x, double tolerance = 1e-8);

/// Two-pass modified Gram-Schmidt append; rejects vectors whose residual
/// against the accumulated basis falls below drop_tol.
bool mgs_append(std::vector<Vector>& basis, Vector v, double drop_tol = 1e-6);

/// Orthonormal row basis of the row span, via SVD. With near-orthonormal
/// input rows the singular values sit at 1 or 0, so the cut is clean.
Matrix span_rows(const Matrix& rows, double sigma_cut = 0.5);

}  // namespace gbitlab
