#include "gbitlab/subspaces.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace gbitlab {

SectorString::SectorString(std::vector<Subspace> s)
    : n(static_cast<int>(s.size())), symbols(std::move(s)) {
  if (n < 1) throw std::invalid_argument("SectorString: empty");
}

SectorString SectorString::parse(const std::string& text) {
  std::vector<Subspace> s;
  for (char c : text) {
    switch (c) {
      case 'A': s.push_back(Subspace::A); break;
      case 'B': s.push_back(Subspace::B); break;
      case 'I': s.push_back(Subspace::I); break;
      default:
        throw std::invalid_argument("SectorString: bad symbol '" +
                                    std::string(1, c) + "'");
    }
  }
  return SectorString(std::move(s));
}

std::string SectorString::str() const {
  std::string s;
  for (Subspace x : symbols) s.push_back(static_cast<char>(x));
  return s;
}

int SectorString::count(Subspace s) const {
  return static_cast<int>(std::count(symbols.begin(), symbols.end(), s));
}

Matrix b_matrix(const Vector& b) {
  const int d = static_cast<int>(b.size());
  Matrix m = Matrix::Zero(d + 1, d + 1);
  m.block(0, 1, 1, d) = b.transpose();
  m.block(1, 0, d, 1) = b;
  return m;
}

Matrix a_matrix(const Matrix& lower) {
  const int d = static_cast<int>(lower.rows());
  if (lower.cols() != d)
    throw std::invalid_argument("a_matrix: lower block must be square");
  Matrix m = Matrix::Zero(d + 1, d + 1);
  m.block(1, 1, d, d) = lower;
  return m;
}

Matrix a_elementary(int d, int i, int j) {
  if (i < 1 || j < 1 || i > d || j > d || i == j)
    throw std::invalid_argument("a_elementary: bad pair");
  Matrix m = Matrix::Zero(d + 1, d + 1);
  m(i, j) = 1.0;
  m(j, i) = -1.0;
  return m;
}

SiteBasis::SiteBasis(int d) : d_(d) {
  if (d < 1) throw std::invalid_argument("SiteBasis: d must be >= 1");
  for (int i = 1; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j) pairs_.emplace_back(i, j);
  q_ = 1 + d + static_cast<int>(pairs_.size());
}

Subspace SiteBasis::kind(int s) const {
  if (s == 0) return Subspace::I;
  if (s <= d_) return Subspace::B;
  if (s < q_) return Subspace::A;
  throw std::invalid_argument("SiteBasis: label out of range");
}

int SiteBasis::b_axis(int s) const {
  if (kind(s) != Subspace::B) throw std::invalid_argument("not a B label");
  return s;
}

std::pair<int, int> SiteBasis::a_pair(int s) const {
  if (kind(s) != Subspace::A) throw std::invalid_argument("not an A label");
  return pairs_[s - d_ - 1];
}

int SiteBasis::a_index(int i, int j) const {
  if (i > j) std::swap(i, j);
  for (std::size_t k = 0; k < pairs_.size(); ++k)
    if (pairs_[k].first == i && pairs_[k].second == j)
      return d_ + 1 + static_cast<int>(k);
  throw std::invalid_argument("a_index: bad pair");
}

Matrix SiteBasis::element(int s) const {
  if (s == 0)
    return Matrix::Identity(d_ + 1, d_ + 1) / std::sqrt(double(d_ + 1));
  if (s <= d_) {
    Vector e = Vector::Zero(d_);
    e(s - 1) = 1.0;
    return b_matrix(e) / std::sqrt(2.0);
  }
  const auto [i, j] = a_pair(s);
  return a_elementary(d_, i, j) / std::sqrt(2.0);
}

Vector SiteBasis::coords(const Matrix& m) const {
  if (m.rows() != d_ + 1 || m.cols() != d_ + 1)
    throw std::invalid_argument("SiteBasis::coords: size mismatch");
  Vector c(q_);
  c(0) = m.trace() / std::sqrt(double(d_ + 1));
  for (int k = 1; k <= d_; ++k) c(k) = (m(0, k) + m(k, 0)) / std::sqrt(2.0);
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    const auto [i, j] = pairs_[k];
    c(d_ + 1 + static_cast<long>(k)) = (m(i, j) - m(j, i)) / std::sqrt(2.0);
  }
  return c;
}

Matrix SiteBasis::from_coords(const Vector& c) const {
  if (c.size() != q_)
    throw std::invalid_argument("SiteBasis::from_coords: size mismatch");
  Matrix m = c(0) * Matrix::Identity(d_ + 1, d_ + 1) / std::sqrt(double(d_ + 1));
  for (int k = 1; k <= d_; ++k) {
    m(0, k) += c(k) / std::sqrt(2.0);
    m(k, 0) += c(k) / std::sqrt(2.0);
  }
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    const auto [i, j] = pairs_[k];
    m(i, j) += c(d_ + 1 + static_cast<long>(k)) / std::sqrt(2.0);
    m(j, i) -= c(d_ + 1 + static_cast<long>(k)) / std::sqrt(2.0);
  }
  return m;
}

double SiteBasis::membership_residual(const Matrix& m) const {
  return (m - from_coords(coords(m))).norm();
}

Matrix SiteBasis::conjugation_action(const Matrix& r) const {
  if (r.rows() != d_ || r.cols() != d_)
    throw std::invalid_argument("conjugation_action: rotation must be d x d");
  Matrix u = Matrix::Zero(q_, q_);
  u(0, 0) = 1.0;
  u.block(1, 1, d_, d_) = r;
  const long na = static_cast<long>(pairs_.size());
  for (long col = 0; col < na; ++col) {
    const auto [i, j] = pairs_[col];
    for (long row = 0; row < na; ++row) {
      const auto [k, l] = pairs_[row];
      u(d_ + 1 + row, d_ + 1 + col) =
          r(k - 1, i - 1) * r(l - 1, j - 1) - r(l - 1, i - 1) * r(k - 1, j - 1);
    }
  }
  return u;
}

Matrix class_project(const Matrix& m, Subspace s) {
  const int dp1 = static_cast<int>(m.rows());
  const int d = dp1 - 1;
  Matrix out = Matrix::Zero(dp1, dp1);
  switch (s) {
    case Subspace::I:
      return (m.trace() / dp1) * Matrix::Identity(dp1, dp1);
    case Subspace::B:
      for (int k = 1; k <= d; ++k) {
        const double v = 0.5 * (m(0, k) + m(k, 0));
        out(0, k) = v;
        out(k, 0) = v;
      }
      return out;
    case Subspace::A:
      for (int i = 1; i <= d; ++i)
        for (int j = 1; j <= d; ++j) out(i, j) = 0.5 * (m(i, j) - m(j, i));
      return out;
  }
  throw std::logic_error("class_project: unreachable");
}

OperatorTensor apply_site_linear_map(
    const OperatorTensor& x, int site,
    const std::function<Matrix(const Matrix&)>& f) {
  if (site < 0 || site >= x.n)
    throw std::invalid_argument("apply_site_linear_map: site out of range");
  const int q = x.d + 1;
  const MultiIndex mi(x.d, x.n);
  long inner = 1;
  for (int i = site + 1; i < x.n; ++i) inner *= q;
  const long outer = mi.dim() / (inner * q);
  Matrix out = Matrix::Zero(x.matrix.rows(), x.matrix.cols());
  Matrix slice(q, q);
  for (long ro = 0; ro < outer; ++ro)
    for (long ri = 0; ri < inner; ++ri)
      for (long co = 0; co < outer; ++co)
        for (long ci = 0; ci < inner; ++ci) {
          const long rbase = ro * inner * q + ri;
          const long cbase = co * inner * q + ci;
          for (int a = 0; a < q; ++a)
            for (int b = 0; b < q; ++b)
              slice(a, b) = x.matrix(rbase + a * inner, cbase + b * inner);
          const Matrix mapped = f(slice);
          for (int a = 0; a < q; ++a)
            for (int b = 0; b < q; ++b)
              out(rbase + a * inner, cbase + b * inner) = mapped(a, b);
        }
  return OperatorTensor(x.d, x.n, std::move(out));
}

double tensor_membership_residual(const OperatorTensor& x) {
  OperatorTensor proj = x;
  for (int s = 0; s < x.n; ++s)
    proj = apply_site_linear_map(proj, s, [](const Matrix& m) -> Matrix {
      return class_project(m, Subspace::A) + class_project(m, Subspace::B) +
             class_project(m, Subspace::I);
    });
  const double nx = hs_norm(x);
  return nx == 0.0 ? 0.0 : (x.matrix - proj.matrix).norm() / nx;
}

OperatorTensor sector_project(const OperatorTensor& x, const SectorString& sec,
                              double membership_tol) {
  if (sec.n != x.n)
    throw std::invalid_argument("sector_project: sector length != n");
  const double res = tensor_membership_residual(x);
  if (res > membership_tol)
    throw std::invalid_argument(
        "sector_project: X outside (A+B+I)^n, relative residual " +
        std::to_string(res));
  OperatorTensor out = x;
  for (int s = 0; s < x.n; ++s) {
    const Subspace k = sec.symbols[s];
    out = apply_site_linear_map(
        out, s, [k](const Matrix& m) -> Matrix { return class_project(m, k); });
  }
  return out;
}

int block_start(int d, int j) {
  const int y = (d % 2 == 0) ? 1 : 2;
  return y + 2 * (j - 1);
}

StandardMatrices standard_matrices(int d) {
  if (d < 2) throw std::invalid_argument("standard_matrices: d must be >= 2");
  StandardMatrices sm;
  sm.d = d;
  sm.y = (d % 2 == 0) ? 1 : 2;
  sm.z = d / 2;
  sm.sigma = Matrix(2, 2);
  sm.sigma << 0, 1, -1, 0;
  for (int j = 1; j <= sm.z; ++j) {
    Matrix a = Matrix::Zero(d + 1, d + 1);
    const int s = block_start(d, j);
    a(s, s + 1) = 1.0;
    a(s + 1, s) = -1.0;
    sm.a.push_back(std::move(a));
    Matrix p = Matrix::Zero(d + 1, d + 1);
    p(s, s) = 1.0;
    p(s + 1, s + 1) = 1.0;
    sm.p.push_back(std::move(p));
  }
  Vector e1 = Vector::Zero(d);
  e1(0) = 1.0;
  sm.b = b_matrix(e1);
  sm.p_b = Matrix::Zero(d + 1, d + 1);
  sm.p_b(0, 0) = 1.0;
  sm.p_b(1, 1) = 1.0;
  return sm;
}

D2Matrices d2_matrices() {
  D2Matrices m;
  m.a0 = Matrix::Identity(3, 3);
  m.a1 = a_elementary(2, 1, 2);
  m.b0 = Matrix::Zero(3, 3);
  m.b0(0, 1) = m.b0(1, 0) = 1.0;
  m.b1 = Matrix::Zero(3, 3);
  m.b1(0, 2) = m.b1(2, 0) = 1.0;
  return m;
}

Matrix canonical_block_matrix(int d, const std::vector<double>& lambdas) {
  const int z = d / 2;
  if (static_cast<int>(lambdas.size()) != z)
    throw std::invalid_argument("canonical_block_matrix: need floor(d/2) lambdas");
  Matrix m = Matrix::Zero(d, d);
  const int y = (d % 2 == 0) ? 0 : 1;
  for (int j = 0; j < z; ++j) {
    m(y + 2 * j, y + 2 * j + 1) = lambdas[j];
    m(y + 2 * j + 1, y + 2 * j) = -lambdas[j];
  }
  return m;
}

CanonicalForm antisymmetric_canonical_form(const Matrix& abar) {
  const int d = static_cast<int>(abar.rows());
  if (abar.cols() != d)
    throw std::invalid_argument("antisymmetric_canonical_form: not square");
  if ((abar + abar.transpose()).norm() >= 1e-10)
    throw std::invalid_argument(
        "antisymmetric_canonical_form: input not antisymmetric");

  // Eigen-pairing route: S = Abar^T Abar is PSD with doubled eigenvalues
  // lambda^2; each pair (u, -Abar u / lambda) spans one sigma block.
  Matrix s = abar.transpose() * abar;
  s = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("antisymmetric_canonical_form: eigensolver failed");

  const double sigma_max = std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
  const double zero_tol = std::max(1e-12, 1e-12 * sigma_max);

  std::vector<Vector> rows;          // accumulated orthonormal rows of R
  std::vector<Vector> kernel;        // near-zero directions
  std::vector<double> lambdas;
  const auto orthogonalize = [&](Vector& u) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& r : rows) u -= r.dot(u) * r;
      for (const Vector& r : kernel) u -= r.dot(u) * r;
    }
    return u.norm();
  };
  // Descending eigenvalue order, ties in ascending column order; the
  // original block order is the construction order.
  std::vector<int> order(d);
  for (int i = 0; i < d; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return eig.eigenvalues()(a) > eig.eigenvalues()(b);
  });
  for (int c : order) {
    Vector u = eig.eigenvectors().col(c);
    const double nu = orthogonalize(u);
    if (nu < 1e-6) continue;  // already spanned by a previous pair partner
    u /= nu;
    const double lam = (abar * u).norm();
    if (lam <= zero_tol) {
      kernel.push_back(u);
      continue;
    }
    Vector w = -(abar * u) / lam;
    orthogonalize(w);
    w -= u.dot(w) * u;
    w.normalize();
    rows.push_back(u);
    rows.push_back(w);
    lambdas.push_back(lam);
  }

  // Zero modes: for odd d one leading single coordinate, the rest paired
  // into lambda = 0 blocks.
  std::vector<Vector> assembled;
  std::size_t kpos = 0;
  if (d % 2 == 1) {
    if (kernel.empty())
      throw std::runtime_error(
          "antisymmetric_canonical_form: odd d without a kernel vector");
    assembled.push_back(kernel[kpos++]);
  }
  for (const Vector& r : rows) assembled.push_back(r);
  while (kernel.size() - kpos >= 2) {
    assembled.push_back(kernel[kpos]);
    assembled.push_back(kernel[kpos + 1]);
    lambdas.push_back(0.0);
    kpos += 2;
  }
  if (kpos != kernel.size())
    throw std::runtime_error("antisymmetric_canonical_form: kernel parity");
  if (static_cast<int>(assembled.size()) != d)
    throw std::runtime_error("antisymmetric_canonical_form: rank bookkeeping");

  Matrix r(d, d);
  for (int i = 0; i < d; ++i) r.row(i) = assembled[i].transpose();

  if (r.determinant() < 0) {
    if (d % 2 == 1) {
      r.row(0) = -r.row(0);  // leading zero coordinate, form unchanged
    } else if (!lambdas.empty() && lambdas.back() <= zero_tol) {
      r.row(d - 1) = -r.row(d - 1);  // inside a zero block
    } else {
      // Full rank, even d, negative Pfaffian: swap the last pair and keep
      // the sign on its lambda.
      r.row(d - 2).swap(r.row(d - 1));
      lambdas.back() = -lambdas.back();
    }
  }

  CanonicalForm cf{Rotation(d, r), std::move(lambdas)};
  const double residual =
      (cf.rot.matrix * abar * cf.rot.matrix.transpose() -
       canonical_block_matrix(d, cf.lambdas))
          .norm();
  if (residual > 1e-8 * std::max(1.0, abar.norm()))
    throw std::runtime_error(
        "antisymmetric_canonical_form: residual " + std::to_string(residual));
  return cf;
}

}  // namespace gbitlab
