#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "gbitlab/tensor.hpp"

namespace gbitlab {

// The three pairwise HS-orthogonal subspaces of (d+1)x(d+1) matrices into
// which every first-order-admissible generator factors per site:
//   A: zero first row/column, antisymmetric lower block   (dim d(d-1)/2)
//   B: symmetric first row/column pair, zero elsewhere    (dim d)
//   I: multiples of the identity                          (dim 1)
enum class Subspace : char { A = 'A', B = 'B', I = 'I' };

struct SectorString {
  int n = 0;
  std::vector<Subspace> symbols;

  SectorString() = default;
  explicit SectorString(std::vector<Subspace> s);
  static SectorString parse(const std::string& text);

  std::string str() const;
  int count(Subspace s) const;
  int n_a() const { return count(Subspace::A); }
  int n_b() const { return count(Subspace::B); }
  int n_i() const { return count(Subspace::I); }
  bool operator==(const SectorString& o) const { return symbols == o.symbols; }
};

/// Unnormalized building blocks: B_b, and A with a given antisymmetric
/// lower block.
Matrix b_matrix(const Vector& b);
Matrix a_matrix(const Matrix& lower_antisymmetric);
/// Elementary antisymmetric (d+1)x(d+1): +1 at (i,j), -1 at (j,i), Bloch
/// coordinates 1-indexed.
Matrix a_elementary(int d, int i, int j);

/// Orthonormal basis of A+B+I with fixed coordinate order
/// [I, B_1..B_d, A_(1,2), A_(1,3), ..., A_(d-1,d)]; q = d(d-1)/2 + d + 1.
class SiteBasis {
 public:
  explicit SiteBasis(int d);

  int d() const { return d_; }
  int q() const { return q_; }
  Subspace kind(int s) const;
  int b_axis(int s) const;                // valid for B labels, 1-indexed
  std::pair<int, int> a_pair(int s) const;  // valid for A labels, i < j
  int a_index(int i, int j) const;          // inverse of a_pair
  Matrix element(int s) const;              // unit HS norm

  /// Coordinates of the A+B+I component of M (closed form).
  Vector coords(const Matrix& m) const;
  Matrix from_coords(const Vector& c) const;
  /// HS norm of M minus its A+B+I component.
  double membership_residual(const Matrix& m) const;

  /// The q x q matrix of M -> (1+R) M (1+R)^T in these coordinates;
  /// block diagonal 1 (+) R (+) /\^2 R, orthogonal.
  Matrix conjugation_action(const Matrix& rotation) const;

 private:
  int d_, q_;
  std::vector<std::pair<int, int>> pairs_;
};

/// Component of M in one of the three subspaces (closed form).
Matrix class_project(const Matrix& m, Subspace s);

/// Applies a linear matrix map to a single tensor factor of X.
OperatorTensor apply_site_linear_map(
    const OperatorTensor& x, int site,
    const std::function<Matrix(const Matrix&)>& f);

/// Relative HS residual of X against (A+B+I)^{otimes n}.
double tensor_membership_residual(const OperatorTensor& x);

/// Orthogonal projection onto the sector S_x; requires X in the membership
/// tensor space up to tolerance.
OperatorTensor sector_project(const OperatorTensor& x, const SectorString& sec,
                              double membership_tol = tol::kMembership);

// The sigma-block standard matrices. Block j (1-indexed) occupies
// coordinates [y + 2(j-1), y + 2j - 1] of R^{d+1}, y = 1 for even d and 2
// for odd d, z = floor(d/2) blocks.
struct StandardMatrices {
  int d = 0, y = 0, z = 0;
  std::vector<Matrix> a;  // A_1..A_z, entries in {-1,0,1}
  std::vector<Matrix> p;  // P_1..P_z
  Matrix b;               // B_{e_1}
  Matrix p_b;             // 1_{2x2} (+) 0
  Matrix sigma;           // [[0,1],[-1,0]]
};
StandardMatrices standard_matrices(int d);
int block_start(int d, int j);  // coordinate where sigma-block j begins

/// The four 3x3 matrices used for d = 2: A0 = 1, A1 spanning the
/// one-dimensional A space, B0 = B_{e_1}, B1 = B_{e_2}.
struct D2Matrices {
  Matrix a0, a1, b0, b1;
};
D2Matrices d2_matrices();

/// R Abar R^T in sigma-block normal form. |lambda| sorted descending; for
/// even d with negative Pfaffian and full rank the last lambda is negative
/// (an SO(d) conjugation cannot flip it; see antisymmetric_canonical_form).
struct CanonicalForm {
  Rotation rot;
  std::vector<double> lambdas;  // length floor(d/2)
};

CanonicalForm antisymmetric_canonical_form(const Matrix& abar);
/// The d x d normal form with the given lambdas.
Matrix canonical_block_matrix(int d, const std::vector<double>& lambdas);

}  // namespace gbitlab
