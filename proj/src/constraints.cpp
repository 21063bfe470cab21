#include "gbitlab/constraints.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace gbitlab {

namespace {

void check_tuple(const std::vector<BlochVector>& v, int n, const char* what,
                 bool allow_zero = false, int must_be_unit = -1) {
  if (static_cast<int>(v.size()) != n)
    throw std::invalid_argument(std::string(what) + ": wrong slot count");
  for (int i = 0; i < n; ++i) {
    const double nm = v[i].norm();
    const bool unit = std::abs(nm - 1.0) <= 1e-9;
    const bool zero = nm <= 1e-12;
    if (i == must_be_unit && !unit)
      throw std::invalid_argument(std::string(what) +
                                  ": flip slot must be a unit vector");
    if (!unit && !(allow_zero && zero))
      throw std::invalid_argument(std::string(what) +
                                  ": slots must be unit vectors");
  }
}

std::vector<BlochVector> flipped_meas(const std::vector<BlochVector>& preps,
                                      const std::vector<BlochVector>& meas,
                                      int site) {
  std::vector<BlochVector> out = meas;
  out[site] = -preps[site];
  return out;
}

}  // namespace

double first_order_value(const OperatorTensor& x,
                         const std::vector<BlochVector>& preps,
                         const std::vector<BlochVector>& meas, int site) {
  if (site < 0 || site >= x.n)
    throw std::invalid_argument("first_order_value: site out of range");
  check_tuple(preps, x.n, "first_order_value");
  check_tuple(meas, x.n, "first_order_value");
  const Vector vin = lifted_product(preps);
  const Vector vout = lifted_product(flipped_meas(preps, meas, site));
  return vout.dot(x.matrix * vin);
}

double diagonal_first_order(const OperatorTensor& x,
                            const std::vector<BlochVector>& preps) {
  check_tuple(preps, x.n, "diagonal_first_order");
  const Vector v = lifted_product(preps);
  return v.dot(x.matrix * v);
}

double second_order_flip(const OperatorTensor& x,
                         const std::vector<BlochVector>& preps,
                         const std::vector<BlochVector>& meas, int site) {
  if (site < 0 || site >= x.n)
    throw std::invalid_argument("second_order_flip: site out of range");
  check_tuple(preps, x.n, "second_order_flip");
  check_tuple(meas, x.n, "second_order_flip");
  const Vector vin = lifted_product(preps);
  const Vector vout = lifted_product(flipped_meas(preps, meas, site));
  return vout.dot(x.matrix * (x.matrix * vin));
}

double second_order_diag(const OperatorTensor& x,
                         const std::vector<BlochVector>& preps) {
  check_tuple(preps, x.n, "second_order_diag");
  const Vector v = lifted_product(preps);
  return v.dot(x.matrix * (x.matrix * v));
}

double second_order_with_zeros(const OperatorTensor& x,
                               const std::vector<BlochVector>& preps,
                               const std::vector<BlochVector>& meas, int site) {
  if (site < 0 || site >= x.n)
    throw std::invalid_argument("second_order_with_zeros: site out of range");
  check_tuple(preps, x.n, "second_order_with_zeros", /*allow_zero=*/true, site);
  check_tuple(meas, x.n, "second_order_with_zeros", /*allow_zero=*/true);
  const Vector vin = lifted_product(preps);
  const Vector vout = lifted_product(flipped_meas(preps, meas, site));
  return vout.dot(x.matrix * (x.matrix * vin));
}

// ---------------------------------------------------------------------------
// ProductBasis
// ---------------------------------------------------------------------------

ProductBasis::ProductBasis(int d, int n) : d_(d), n_(n), site_(d) {
  tensor_dim(d, n);
  size_ = 1;
  for (int i = 0; i < n; ++i) {
    size_ *= site_.q();
    if (size_ > 1 << 20)
      throw std::invalid_argument("ProductBasis: q^n too large");
  }
}

long ProductBasis::encode(const std::vector<int>& labels) const {
  if (static_cast<int>(labels.size()) != n_)
    throw std::invalid_argument("ProductBasis: wrong label count");
  long id = 0;
  for (int i = 0; i < n_; ++i) {
    if (labels[i] < 0 || labels[i] >= site_.q())
      throw std::invalid_argument("ProductBasis: label out of range");
    id = id * site_.q() + labels[i];
  }
  return id;
}

std::vector<int> ProductBasis::decode(long id) const {
  std::vector<int> labels(n_);
  for (int i = n_ - 1; i >= 0; --i) {
    labels[i] = static_cast<int>(id % site_.q());
    id /= site_.q();
  }
  return labels;
}

int ProductBasis::digit(long id, int s) const {
  long stride = 1;
  for (int i = s + 1; i < n_; ++i) stride *= site_.q();
  return static_cast<int>((id / stride) % site_.q());
}

long ProductBasis::with_label(long id, int s, int value) const {
  long stride = 1;
  for (int i = s + 1; i < n_; ++i) stride *= site_.q();
  const int old = static_cast<int>((id / stride) % site_.q());
  return id + static_cast<long>(value - old) * stride;
}

SectorString ProductBasis::sector_of(long id) const {
  std::vector<Subspace> symbols(n_);
  for (int i = 0; i < n_; ++i) symbols[i] = site_.kind(digit(id, i));
  return SectorString(std::move(symbols));
}

bool ProductBasis::label_has_a(long id) const {
  for (int i = 0; i < n_; ++i)
    if (site_.kind(digit(id, i)) == Subspace::A) return true;
  return false;
}

bool ProductBasis::label_is_local(long id) const {
  int a = 0;
  for (int i = 0; i < n_; ++i) {
    const Subspace k = site_.kind(digit(id, i));
    if (k == Subspace::A)
      ++a;
    else if (k != Subspace::I)
      return false;
  }
  return a == 1;
}

OperatorTensor ProductBasis::materialize_label(long id) const {
  std::vector<Matrix> factors;
  factors.reserve(n_);
  for (int i = 0; i < n_; ++i) factors.push_back(site_.element(digit(id, i)));
  return tensor_product(d_, factors);
}

namespace {
// Recursive Kronecker accumulation: far cheaper than summing q^n dense
// label matrices when most coefficient mass sits in few subtrees.
Matrix materialize_range(const ProductBasis& pb, const SiteBasis& sb,
                         const Vector& coeffs, long offset, int s) {
  const int n = pb.n();
  const long dim_rest = tensor_dim(pb.d(), n - s);
  if (s == n) {
    Matrix m(1, 1);
    m(0, 0) = coeffs(offset);
    return m;
  }
  long stride = 1;
  for (int i = s + 1; i < n; ++i) stride *= sb.q();
  const long sub_dim = dim_rest / (pb.d() + 1);
  Matrix out = Matrix::Zero(dim_rest, dim_rest);
  for (int l = 0; l < sb.q(); ++l) {
    const Vector seg = coeffs.segment(offset + l * stride, stride);
    if (seg.cwiseAbs().maxCoeff() < 1e-300) continue;
    const Matrix sub = materialize_range(pb, sb, coeffs, offset + l * stride, s + 1);
    if (sub.cwiseAbs().maxCoeff() == 0.0) continue;
    const Matrix e = sb.element(l);
    for (int r = 0; r <= pb.d(); ++r)
      for (int c = 0; c <= pb.d(); ++c) {
        if (e(r, c) == 0.0) continue;
        out.block(r * sub_dim, c * sub_dim, sub_dim, sub_dim) += e(r, c) * sub;
      }
  }
  return out;
}
}  // namespace

OperatorTensor ProductBasis::materialize(const Vector& coeffs) const {
  if (coeffs.size() != size_)
    throw std::invalid_argument("ProductBasis::materialize: size mismatch");
  if (n_ == 0) throw std::logic_error("ProductBasis: n == 0");
  return OperatorTensor(d_, n_, materialize_range(*this, site_, coeffs, 0, 0));
}

Vector ProductBasis::coords_of(const OperatorTensor& x) const {
  if (x.d != d_ || x.n != n_)
    throw std::invalid_argument("ProductBasis::coords_of: size mismatch");
  Vector c(size_);
  for (long id = 0; id < size_; ++id)
    c(id) = hs_inner(x, materialize_label(id));
  return c;
}

Vector ProductBasis::reorder(const Vector& coeffs,
                             const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != n_)
    throw std::invalid_argument("ProductBasis::reorder: bad permutation");
  Vector out(size_);
  std::vector<int> labels, old(n_);
  for (long id = 0; id < size_; ++id) {
    labels = decode(id);
    // New site i carries what the original tensor held at site perm[i].
    for (int i = 0; i < n_; ++i) old[perm[i]] = labels[i];
    out(id) = coeffs(encode(old));
  }
  return out;
}

Vector ProductBasis::apply_site_matrix(const Vector& coeffs, int s,
                                       const Matrix& u) const {
  const int q = site_.q();
  if (u.rows() != q || u.cols() != q)
    throw std::invalid_argument("apply_site_matrix: map must be q x q");
  long stride = 1;
  for (int i = s + 1; i < n_; ++i) stride *= q;
  const long outer = size_ / (stride * q);
  Vector out = Vector::Zero(size_);
  for (long o = 0; o < outer; ++o)
    for (long in = 0; in < stride; ++in) {
      const long base = o * stride * q + in;
      for (int r = 0; r < q; ++r) {
        double acc = 0.0;
        for (int c = 0; c < q; ++c) acc += u(r, c) * coeffs(base + c * stride);
        out(base + r * stride) = acc;
      }
    }
  return out;
}

Vector ProductBasis::apply_site_diagonal(const Vector& coeffs, int s,
                                         const Vector& diag) const {
  const int q = site_.q();
  if (diag.size() != q)
    throw std::invalid_argument("apply_site_diagonal: need q entries");
  long stride = 1;
  for (int i = s + 1; i < n_; ++i) stride *= q;
  Vector out = coeffs;
  for (long id = 0; id < size_; ++id)
    out(id) *= diag((id / stride) % q);
  return out;
}

// ---------------------------------------------------------------------------
// GeneratorSpace
// ---------------------------------------------------------------------------

OperatorTensor GeneratorSpace::materialize(long i) const {
  if (i < 0 || i >= dim())
    throw std::invalid_argument("GeneratorSpace: index out of range");
  return basis->materialize(coeffs.row(i).transpose());
}

Vector GeneratorSpace::project(const Vector& label_coords) const {
  return coeffs.transpose() * (coeffs * label_coords);
}

double GeneratorSpace::membership_residual(const Vector& label_coords) const {
  return (label_coords - project(label_coords)).norm();
}

// ---------------------------------------------------------------------------
// FirstOrderSystem
// ---------------------------------------------------------------------------

namespace {

std::vector<BlochVector> flip_probe_set(int d) {
  std::vector<BlochVector> probes;
  for (int i = 1; i <= d; ++i) probes.push_back(BlochVector::axis(d, i));
  for (int i = 1; i <= d; ++i) probes.push_back(BlochVector::axis(d, i, -1.0));
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 1; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j) {
      Vector p = Vector::Zero(d);
      p(i - 1) = r;
      p(j - 1) = r;
      probes.emplace_back(d, p);
      p(j - 1) = -r;
      probes.emplace_back(d, p);
    }
  return probes;
}

// v(-a)^T W v(a) as a row over vec(W), W in R^{(d+1)x(d+1)} row-major.
Vector flip_row(const BlochVector& a) {
  const Vector va = lift(a);
  const Vector vm = lift(-a);
  Vector row((a.d + 1) * (a.d + 1));
  for (int r = 0; r <= a.d; ++r)
    for (int c = 0; c <= a.d; ++c) row(r * (a.d + 1) + c) = vm(r) * va(c);
  return row;
}

// Diagonal evaluation of one site-basis element: v(a)^T E_s v(a).
double site_diag_eval(const SiteBasis& sb, int s, const BlochVector& a) {
  const int d = sb.d();
  switch (sb.kind(s)) {
    case Subspace::I:
      return (1.0 + a.components.squaredNorm()) / std::sqrt(double(d + 1));
    case Subspace::B:
      return std::sqrt(2.0) * a.components(sb.b_axis(s) - 1);
    case Subspace::A:
      return 0.0;
  }
  return 0.0;
}

}  // namespace

FirstOrderSystem::FirstOrderSystem(int d, int n, std::uint64_t seed,
                                   int extra_random_rows)
    : d_(d), n_(n), basis_(std::make_shared<ProductBasis>(d, n)) {
  if (d < 2)
    throw std::invalid_argument(
        "FirstOrderSystem: classical bit (d=1): continuous-group analysis "
        "not applicable");
  if (basis_->size() > kDenseCap)
    throw std::invalid_argument("FirstOrderSystem: q^n beyond desk scale");

  // Per-site flip system over the probe set; its SVD must reproduce the
  // closed A+B+I basis.
  const auto probes = flip_probe_set(d);
  const int dp1sq = (d + 1) * (d + 1);
  Matrix f(probes.size(), dp1sq);
  for (std::size_t i = 0; i < probes.size(); ++i)
    f.row(i) = flip_row(probes[i]).transpose();
  Eigen::BDCSVD<Matrix> svd(f, Eigen::ComputeFullV);
  const SiteBasis& sb = basis_->site();
  const double smax = svd.singularValues()(0);
  const long nsing = svd.singularValues().size();
  long rank = 0;
  double kept_min = smax, discarded_max = 0;
  for (long i = 0; i < nsing; ++i) {
    const double s = svd.singularValues()(i);
    if (s > tol::kSvdCutoff * smax) {
      ++rank;
      kept_min = std::min(kept_min, s);
    } else {
      discarded_max = std::max(discarded_max, s);
    }
  }
  site_svd_.sigma_max = smax;
  site_svd_.kept_min = kept_min;
  site_svd_.discarded_max = discarded_max;
  site_svd_.rank = rank;
  site_svd_.rank_gap =
      discarded_max > 0 ? kept_min / discarded_max : kept_min / 1e-300;
  site_svd_.unstable = kept_min < 10.0 * tol::kSvdCutoff * smax;
  if (dp1sq - rank != sb.q())
    throw std::runtime_error(
        "FirstOrderSystem: per-site flip null space has dimension " +
        std::to_string(dp1sq - rank) + ", expected " + std::to_string(sb.q()));
  for (int s = 0; s < sb.q(); ++s) {
    const Matrix e = sb.element(s);
    Vector v(dp1sq);
    for (int r = 0; r <= d; ++r)
      for (int c = 0; c <= d; ++c) v(r * (d + 1) + c) = e(r, c);
    if ((f * v).cwiseAbs().maxCoeff() > 1e-10)
      throw std::runtime_error(
          "FirstOrderSystem: closed site basis violates flip rows");
  }

  // Diagonal rows: core product probes {+-e_i}^n plus random unit tuples.
  std::vector<BlochVector> core;
  for (int i = 1; i <= d; ++i) core.push_back(BlochVector::axis(d, i));
  for (int i = 1; i <= d; ++i) core.push_back(BlochVector::axis(d, i, -1.0));
  long rows = 1;
  for (int i = 0; i < n; ++i) rows *= core.size();
  diag_rows_.resize(rows + extra_random_rows, basis_->size());
  // Per-site evaluation table: probe -> q values.
  Matrix eval(core.size(), sb.q());
  for (std::size_t p = 0; p < core.size(); ++p)
    for (int s = 0; s < sb.q(); ++s) eval(p, s) = site_diag_eval(sb, s, core[p]);
  std::vector<int> pick(n, 0);
  for (long r = 0; r < rows; ++r) {
    long t = r;
    for (int i = n - 1; i >= 0; --i) {
      pick[i] = static_cast<int>(t % core.size());
      t /= core.size();
    }
    for (long id = 0; id < basis_->size(); ++id) {
      double prod = 1.0;
      for (int i = 0; i < n && prod != 0.0; ++i)
        prod *= eval(pick[i], basis_->digit(id, i));
      diag_rows_(r, id) = prod;
    }
  }
  Rng rng(split_seed(seed, 0));
  for (int e = 0; e < extra_random_rows; ++e) {
    std::vector<BlochVector> tuple;
    for (int i = 0; i < n; ++i) tuple.push_back(random_unit_vector(d, rng));
    for (long id = 0; id < basis_->size(); ++id) {
      double prod = 1.0;
      for (int i = 0; i < n && prod != 0.0; ++i)
        prod *= site_diag_eval(sb, basis_->digit(id, i), tuple[i]);
      diag_rows_(rows + e, id) = prod;
    }
  }
}

Vector FirstOrderSystem::apply(const OperatorTensor& x) const {
  if (x.d != d_ || x.n != n_)
    throw std::invalid_argument("FirstOrderSystem::apply: size mismatch");
  Vector out(n_ + diag_rows_.rows());
  // Flip residual per site: distance to the per-site membership space,
  // equivalent to the sup of the probe rows over all contractions.
  for (int s = 0; s < n_; ++s) {
    OperatorTensor proj = apply_site_linear_map(x, s, [](const Matrix& m) -> Matrix {
      return class_project(m, Subspace::A) + class_project(m, Subspace::B) +
             class_project(m, Subspace::I);
    });
    out(s) = (x.matrix - proj.matrix).norm();
  }
  const Vector coords = basis_->coords_of(x);
  out.tail(diag_rows_.rows()) = diag_rows_ * coords;
  return out;
}

GeneratorSpace null_space(const FirstOrderSystem& system, double tol,
                          SvdDiagnostics* diagnostics) {
  const auto basis = system.basis();
  const long cols = system.diag_rows().cols();
  long a_labels = 0;
  for (long id = 0; id < basis->size(); ++id)
    if (basis->label_has_a(id)) ++a_labels;

  // BDCSVD first, JacobiSVD as the verified fallback: Eigen 3.4's divide
  // and conquer can break down on the heavily degenerate spectra these
  // structured rows produce.
  SvdDiagnostics diag;
  Matrix rows;
  for (int attempt = 0; attempt < 2; ++attempt) {
    Vector singular;
    Matrix v;
    if (attempt == 0) {
      Eigen::BDCSVD<Matrix> svd(system.diag_rows(), Eigen::ComputeFullV);
      singular = svd.singularValues();
      v = svd.matrixV();
    } else {
      Eigen::JacobiSVD<Matrix> svd(system.diag_rows(), Eigen::ComputeFullV);
      singular = svd.singularValues();
      v = svd.matrixV();
    }
    diag = SvdDiagnostics{};
    const double smax = singular(0);
    diag.sigma_max = smax;
    diag.kept_min = smax;
    long rank = 0;
    for (long i = 0; i < singular.size(); ++i) {
      const double sv = singular(i);
      if (sv > tol * smax) {
        ++rank;
        diag.kept_min = std::min(diag.kept_min, sv);
      } else {
        diag.discarded_max = std::max(diag.discarded_max, sv);
      }
    }
    diag.rank = rank;
    diag.rank_gap = diag.discarded_max > 0 ? diag.kept_min / diag.discarded_max
                                           : diag.kept_min / 1e-300;
    diag.unstable = diag.kept_min < 10.0 * tol * smax;

    const long null_dim = cols - rank;
    rows.resize(null_dim, cols);
    for (long i = 0; i < null_dim; ++i)
      rows.row(i) = v.col(rank + i).transpose();
    // Modified Gram-Schmidt in output order; the SVD basis is already
    // orthonormal, this enforces it to working precision deterministically.
    for (long i = 0; i < null_dim; ++i) {
      for (long j = 0; j < i; ++j)
        rows.row(i) -= rows.row(j).dot(rows.row(i)) * rows.row(j);
      rows.row(i).normalize();
    }

    // Closed-form cross-check: the null space must consist exactly of the
    // A-containing product labels.
    double bi_leak = 0;
    for (long i = 0; i < null_dim; ++i)
      for (long id = 0; id < basis->size(); ++id)
        if (!basis->label_has_a(id))
          bi_leak = std::max(bi_leak, std::abs(rows(i, id)));
    const bool consistent =
        !rows.hasNaN() && a_labels == null_dim && bi_leak < 1e-8;
    if (consistent) break;
    diag.unstable = true;
  }

  if (diagnostics) *diagnostics = diag;
  GeneratorSpace space;
  space.basis = basis;
  space.coeffs = std::move(rows);
  space.tolerance = tol;
  return space;
}

GeneratorSpace local_algebra_basis(int d, int n) {
  auto basis = std::make_shared<ProductBasis>(d, n);
  const int per_site = d * (d - 1) / 2;
  Matrix rows = Matrix::Zero(static_cast<long>(n) * per_site, basis->size());
  long r = 0;
  std::vector<int> labels(n, 0);
  for (int site = 0; site < n; ++site)
    for (int a = 0; a < per_site; ++a) {
      std::fill(labels.begin(), labels.end(), 0);
      labels[site] = d + 1 + a;
      rows(r++, basis->encode(labels)) = 1.0;
    }
  GeneratorSpace space;
  space.basis = std::move(basis);
  space.coeffs = std::move(rows);
  space.tolerance = 0;
  return space;
}

bool mgs_append(std::vector<Vector>& basis, Vector v, double drop_tol) {
  const double n0 = v.norm();
  if (n0 == 0.0) return false;
  for (int pass = 0; pass < 2; ++pass)
    for (const Vector& b : basis) v -= b.dot(v) * b;
  if (v.norm() <= drop_tol * n0) return false;
  v.normalize();
  // One more sweep keeps orthogonality at working precision even after
  // heavy cancellation.
  for (const Vector& b : basis) v -= b.dot(v) * b;
  v.normalize();
  basis.push_back(std::move(v));
  return true;
}

Matrix span_rows(const Matrix& rows, double sigma_cut) {
  // Gram eigendecomposition instead of an SVD: near-orthonormal inputs put
  // the spectrum at {0, 1}, and Eigen 3.4's BDCSVD miscomputes heavily
  // degenerate spectra (NaNs in V), which a self-adjoint solver does not.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(rows.transpose() * rows);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("span_rows: eigensolver failed");
  const double cut = sigma_cut * sigma_cut;
  long rank = 0;
  for (long i = 0; i < eig.eigenvalues().size(); ++i)
    if (eig.eigenvalues()(i) > cut) ++rank;
  Matrix out(rank, rows.cols());
  long r = 0;
  // eigenvalues ascending; emit the span in descending order
  for (long i = eig.eigenvalues().size() - 1; i >= 0 && r < rank; --i)
    if (eig.eigenvalues()(i) > cut)
      out.row(r++) = eig.eigenvectors().col(i).transpose();
  return out;
}

LocalityCheck is_local(const OperatorTensor& x, double tolerance) {
  const GeneratorSpace loc = local_algebra_basis(x.d, x.n);
  Vector overlaps(loc.dim());
  for (long i = 0; i < loc.dim(); ++i)
    overlaps(i) = hs_inner(x, loc.materialize(i));
  const double nx = hs_norm(x);
  const double proj_sq = overlaps.squaredNorm();
  const double res_sq = std::max(0.0, nx * nx - proj_sq);
  LocalityCheck out;
  out.residual = std::sqrt(res_sq);
  out.local = out.residual <= tolerance * (nx == 0 ? 1.0 : nx);
  return out;
}

}  // namespace gbitlab
