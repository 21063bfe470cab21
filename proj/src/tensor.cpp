#include "gbitlab/tensor.hpp"

namespace gbitlab {

long MultiIndex::encode(const std::vector<int>& idx) const {
  if (static_cast<int>(idx.size()) != n)
    throw std::invalid_argument("MultiIndex: wrong index count");
  long flat = 0;
  for (int i = 0; i < n; ++i) {
    if (idx[i] < 0 || idx[i] > d)
      throw std::invalid_argument("MultiIndex: digit out of range");
    flat = flat * (d + 1) + idx[i];
  }
  return flat;
}

std::vector<int> MultiIndex::decode(long flat) const {
  std::vector<int> idx(n);
  for (int i = n - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(flat % (d + 1));
    flat /= (d + 1);
  }
  return idx;
}

int MultiIndex::digit(long flat, int site) const {
  long stride = 1;
  for (int i = site + 1; i < n; ++i) stride *= (d + 1);
  return static_cast<int>((flat / stride) % (d + 1));
}

long MultiIndex::with_digit(long flat, int site, int value) const {
  long stride = 1;
  for (int i = site + 1; i < n; ++i) stride *= (d + 1);
  const int old = static_cast<int>((flat / stride) % (d + 1));
  return flat + (value - old) * stride;
}

Vector lifted_product(const std::vector<BlochVector>& factors) {
  if (factors.empty())
    throw std::invalid_argument("lifted_product: empty factor list");
  const int d = factors[0].d;
  Vector v = lift(factors[0]);
  for (std::size_t i = 1; i < factors.size(); ++i) {
    if (factors[i].d != d)
      throw std::invalid_argument("lifted_product: mixed dimensions");
    const Vector& w = lift(factors[i]);
    Vector out(v.size() * w.size());
    for (long a = 0; a < v.size(); ++a)
      out.segment(a * w.size(), w.size()) = v(a) * w;
    v = std::move(out);
  }
  tensor_dim(d, static_cast<int>(factors.size()));
  return v;
}

ProductLift product_lift(const std::vector<BlochVector>& factors) {
  ProductLift p;
  p.vector = lifted_product(factors);
  p.d = factors[0].d;
  p.n = static_cast<int>(factors.size());
  return p;
}

OperatorTensor::OperatorTensor(int d_, int n_, Matrix m)
    : d(d_), n(n_), matrix(std::move(m)) {
  const long dim = tensor_dim(d, n);
  if (matrix.rows() != dim || matrix.cols() != dim)
    throw std::invalid_argument("OperatorTensor: matrix size != (d+1)^n");
}

OperatorTensor OperatorTensor::identity(int d, int n) {
  const long dim = tensor_dim(d, n);
  return OperatorTensor(d, n, Matrix::Identity(dim, dim));
}

double OperatorTensor::at(const std::vector<int>& upper,
                          const std::vector<int>& lower) const {
  const MultiIndex mi(d, n);
  return matrix(mi.encode(lower), mi.encode(upper));
}

OperatorTensor tensor_product(int d, const std::vector<Matrix>& site_matrices) {
  if (site_matrices.empty())
    throw std::invalid_argument("tensor_product: empty factor list");
  Matrix m = site_matrices[0];
  for (std::size_t i = 1; i < site_matrices.size(); ++i) {
    const Matrix& b = site_matrices[i];
    Matrix out(m.rows() * b.rows(), m.cols() * b.cols());
    for (long r = 0; r < m.rows(); ++r)
      for (long c = 0; c < m.cols(); ++c)
        out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = m(r, c) * b;
    m = std::move(out);
  }
  return OperatorTensor(d, static_cast<int>(site_matrices.size()),
                        std::move(m));
}

double joint_probability(const OperatorTensor& g,
                         const std::vector<BlochVector>& preps,
                         const std::vector<BlochVector>& meas) {
  if (static_cast<int>(preps.size()) != g.n ||
      static_cast<int>(meas.size()) != g.n)
    throw std::invalid_argument("joint_probability: wire count mismatch");
  const Vector vin = lifted_product(preps);
  const Vector vout = lifted_product(meas);
  if (vin.size() != g.matrix.cols())
    throw std::invalid_argument("joint_probability: size mismatch");
  return std::ldexp(vout.dot(g.matrix * vin), -g.n);
}

double hs_inner(const OperatorTensor& x, const OperatorTensor& y) {
  if (x.d != y.d || x.n != y.n)
    throw std::invalid_argument("hs_inner: size mismatch");
  return x.matrix.cwiseProduct(y.matrix).sum();
}

double hs_norm(const OperatorTensor& x) { return x.matrix.norm(); }

Vector apply_site_map_vec(const MultiIndex& mi, const Vector& v, int site,
                          const Matrix& map) {
  const int q = mi.d + 1;
  if (map.rows() != q || map.cols() != q)
    throw std::invalid_argument("apply_site_map_vec: map must be (d+1)x(d+1)");
  long inner = 1;
  for (int i = site + 1; i < mi.n; ++i) inner *= q;
  const long outer = mi.dim() / (inner * q);
  Vector out = Vector::Zero(v.size());
  for (long o = 0; o < outer; ++o)
    for (long in = 0; in < inner; ++in) {
      const long base = o * inner * q + in;
      for (int r = 0; r < q; ++r) {
        double acc = 0.0;
        for (int c = 0; c < q; ++c) acc += map(r, c) * v(base + c * inner);
        out(base + r * inner) = acc;
      }
    }
  return out;
}

OperatorTensor conjugate_local(const OperatorTensor& x,
                               const std::vector<Matrix>& site_maps) {
  if (static_cast<int>(site_maps.size()) != x.n)
    throw std::invalid_argument("conjugate_local: need one map per site");
  const int q = x.d + 1;
  for (const Matrix& t : site_maps) {
    if (t.rows() != q || t.cols() != q)
      throw std::invalid_argument("conjugate_local: map must be (d+1)x(d+1)");
    const double res =
        (t.transpose() * t - Matrix::Identity(q, q)).cwiseAbs().maxCoeff();
    if (res > tol::kOrthogonal)
      throw std::invalid_argument("conjugate_local: non-orthogonal site map");
  }
  const MultiIndex mi(x.d, x.n);
  Matrix m = x.matrix;
  for (int s = 0; s < x.n; ++s) {
    // rows: T on site s; columns: T^T acting from the right.
    for (long c = 0; c < m.cols(); ++c) {
      Vector col = m.col(c);
      m.col(c) = apply_site_map_vec(mi, col, s, site_maps[s]);
    }
    for (long r = 0; r < m.rows(); ++r) {
      Vector row = m.row(r).transpose();
      m.row(r) = apply_site_map_vec(mi, row, s, site_maps[s]).transpose();
    }
  }
  return OperatorTensor(x.d, x.n, std::move(m));
}

Vector reorder_sites_vec(const MultiIndex& mi, const Vector& v,
                         const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != mi.n)
    throw std::invalid_argument("reorder_sites: permutation size mismatch");
  Vector out(v.size());
  std::vector<int> idx, old(mi.n);
  for (long f = 0; f < v.size(); ++f) {
    idx = mi.decode(f);
    // New site i carries what the original vector held at site perm[i].
    for (int i = 0; i < mi.n; ++i) old[perm[i]] = idx[i];
    out(f) = v(mi.encode(old));
  }
  return out;
}

OperatorTensor reorder_sites(const OperatorTensor& x,
                             const std::vector<int>& perm) {
  const MultiIndex mi(x.d, x.n);
  const long dim = mi.dim();
  // Row/column permutation p with p[new flat] = old flat.
  std::vector<long> p(dim);
  std::vector<int> idx, old(x.n);
  for (long f = 0; f < dim; ++f) {
    idx = mi.decode(f);
    for (int i = 0; i < x.n; ++i) old[perm[i]] = idx[i];
    p[f] = mi.encode(old);
  }
  Matrix m(dim, dim);
  for (long r = 0; r < dim; ++r)
    for (long c = 0; c < dim; ++c) m(r, c) = x.matrix(p[r], p[c]);
  return OperatorTensor(x.d, x.n, std::move(m));
}

}  // namespace gbitlab
