#include "gbitlab/analyzer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <functional>
#include <mutex>
#include <thread>

#include "gbitlab/quantum_oracle.hpp"

namespace gbitlab {

std::string constraint_kind_name(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::SecondFlip: return "second_flip";
    case ConstraintKind::SecondDiag: return "second_diag";
    case ConstraintKind::SecondZeropad: return "second_zeropad";
  }
  throw std::logic_error("constraint_kind_name");
}

ConstraintKind constraint_kind_from_name(const std::string& name) {
  if (name == "second_flip") return ConstraintKind::SecondFlip;
  if (name == "second_diag") return ConstraintKind::SecondDiag;
  if (name == "second_zeropad") return ConstraintKind::SecondZeropad;
  throw std::invalid_argument("unknown constraint kind '" + name + "'");
}

double evaluate_certificate_constraint(const OperatorTensor& y,
                                       ConstraintKind kind, int site_k,
                                       const std::vector<BlochVector>& preps,
                                       const std::vector<BlochVector>& meas) {
  switch (kind) {
    case ConstraintKind::SecondDiag:
      return -second_order_diag(y, preps);
    case ConstraintKind::SecondFlip:
      return second_order_flip(y, preps, meas, site_k);
    case ConstraintKind::SecondZeropad:
      return second_order_with_zeros(y, preps, meas, site_k);
  }
  throw std::logic_error("evaluate_certificate_constraint");
}

namespace {

bool sector_is_local_pattern(const SectorString& s) {
  const int na = s.n_a();
  return (na == 0 && s.n_i() == s.n) || (na == 1 && s.n_i() == s.n - 1);
}

std::map<std::string, double> sector_norms_of(const ProductBasis& pb,
                                              const Vector& c) {
  std::map<std::string, double> norms;
  for (long id = 0; id < pb.size(); ++id) {
    const double v = c(id);
    if (v == 0.0) continue;
    norms[pb.sector_of(id).str()] += v * v;
  }
  for (auto& [k, v] : norms) v = std::sqrt(v);
  return norms;
}

SectorString find_sector_coords(const ProductBasis& pb, const Vector& c,
                                double tol_abs,
                                std::map<std::string, double>* norms_out) {
  auto norms = sector_norms_of(pb, c);
  if (norms_out) *norms_out = norms;
  std::string best;
  double best_norm = tol_abs;
  for (const auto& [sec, nm] : norms) {  // std::map: lexicographic order
    if (sector_is_local_pattern(SectorString::parse(sec))) continue;
    if (nm > best_norm) {
      best_norm = nm;
      best = sec;
    }
  }
  if (best.empty())
    throw std::invalid_argument(
        "find_nonlocal_sector: no nonlocal sector component (X local?)");
  return SectorString::parse(best);
}

struct CanonCoords {
  std::vector<int> site_order;
  std::vector<Matrix> rotations;
  Vector coords;
  // Unnormalized M_x = (sum_j lambda_j A_j)^{x n_A} x B^{x n_B} x 1^{x n_I}
  // expressed as label-coordinate weights.
  std::vector<std::pair<long, double>> m_weights;
  double overlap = 0;
  SectorString sorted;
};

int block_of_pair(int d, const std::pair<int, int>& pr) {
  for (int j = 1; j <= d / 2; ++j) {
    const int s = block_start(d, j);
    if (pr.first == s && pr.second == s + 1) return j;
  }
  return 0;
}

// Deterministic R in SO(d) with R b = e_1.
Matrix rotation_to_e1(const Vector& b) {
  const int d = static_cast<int>(b.size());
  std::vector<Vector> rows;
  rows.push_back(b.normalized());
  for (int k = 0; k < d && static_cast<int>(rows.size()) < d; ++k) {
    Vector v = Vector::Unit(d, k);
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& r : rows) v -= r.dot(v) * r;
    if (v.norm() > 1e-6) rows.push_back(v.normalized());
  }
  Matrix r(d, d);
  for (int i = 0; i < d; ++i) r.row(i) = rows[i].transpose();
  if (r.determinant() < 0) r.row(d - 1) = -r.row(d - 1);
  return r;
}

CanonCoords canonicalize_coords(const ProductBasis& pb, const Vector& c,
                                const SectorString& sec) {
  const int d = pb.d(), n = pb.n();
  const SiteBasis& sb = pb.site();
  CanonCoords out;

  // Virtual reordering: A sites first, then B, then I (A, I, B for d = 2).
  std::vector<Subspace> order = {Subspace::A, Subspace::B, Subspace::I};
  if (d == 2) order = {Subspace::A, Subspace::I, Subspace::B};
  for (Subspace want : order)
    for (int i = 0; i < n; ++i)
      if (sec.symbols[i] == want) out.site_order.push_back(i);
  Vector c1 = pb.reorder(c, out.site_order);
  std::vector<Subspace> sorted_syms(n);
  for (int i = 0; i < n; ++i) sorted_syms[i] = sec.symbols[out.site_order[i]];
  out.sorted = SectorString(std::move(sorted_syms));

  // Product element of the sector with the largest coefficient.
  long best = -1;
  double best_abs = 0;
  for (long id = 0; id < pb.size(); ++id) {
    if (!(pb.sector_of(id) == out.sorted)) continue;
    if (std::abs(c1(id)) > best_abs) {
      best_abs = std::abs(c1(id));
      best = id;
    }
  }
  if (best < 0 || best_abs < 1e-12 * c1.norm())
    throw std::invalid_argument(
        "canonicalize: vanishing component in the requested sector");

  // Per-site factors of a product element M~ with <X, M~> != 0. Primary
  // choice: the dominant summand's conditional factors (recovers the actual
  // factors when the sector component is a product). Fallback: the dominant
  // basis label itself.
  const auto conditional_overlap =
      [&](const std::vector<std::vector<std::pair<int, double>>>& site_coords) {
        double acc = 0;
        std::vector<int> labels(n, 0);
        std::function<void(int, double)> rec = [&](int site, double w) {
          if (site == n) {
            acc += w * c1(pb.encode(labels));
            return;
          }
          for (const auto& [digit, coeff] : site_coords[site]) {
            labels[site] = digit;
            rec(site + 1, w * coeff);
          }
        };
        rec(0, 1.0);
        return acc;
      };

  for (int variant = 0; variant < 2; ++variant) {
    const bool conditional = (variant == 0);
    std::vector<Matrix> rotations;
    std::vector<std::vector<double>> site_lambdas(n);
    // label-coordinate expansion of each M~ factor, used for the overlap
    std::vector<std::vector<std::pair<int, double>>> mt_coords(n);
    for (int i = 0; i < n; ++i) {
      const int digit = pb.digit(best, i);
      Matrix r = Matrix::Identity(d, d);
      switch (sb.kind(digit)) {
        case Subspace::A: {
          Matrix lower = Matrix::Zero(d, d);
          if (conditional) {
            for (int s = d + 1; s < sb.q(); ++s) {
              const auto pr = sb.a_pair(s);
              const double v = c1(pb.with_label(best, i, s));
              lower(pr.first - 1, pr.second - 1) += v;
              lower(pr.second - 1, pr.first - 1) -= v;
            }
            lower /= lower.norm() / std::sqrt(2.0);  // HS norm sqrt(2)
          } else {
            const auto pr = sb.a_pair(digit);
            lower(pr.first - 1, pr.second - 1) = 1.0;
            lower(pr.second - 1, pr.first - 1) = -1.0;
          }
          const CanonicalForm cf = antisymmetric_canonical_form(lower);
          r = cf.rot.matrix;
          site_lambdas[i] = cf.lambdas;
          for (int s = d + 1; s < sb.q(); ++s) {
            const auto pr = sb.a_pair(s);
            const double v = std::sqrt(2.0) * lower(pr.first - 1, pr.second - 1);
            if (v != 0.0) mt_coords[i].push_back({s, v});
          }
          break;
        }
        case Subspace::B: {
          Vector bvec = Vector::Zero(d);
          if (conditional) {
            for (int s = 1; s <= d; ++s)
              bvec(s - 1) = c1(pb.with_label(best, i, s));
            bvec.normalize();
          } else {
            bvec(sb.b_axis(digit) - 1) = 1.0;
          }
          if ((bvec - Vector::Unit(d, 0)).norm() > 1e-13)
            r = rotation_to_e1(bvec);
          for (int s = 1; s <= d; ++s) {
            const double v = std::sqrt(2.0) * bvec(s - 1);
            if (v != 0.0) mt_coords[i].push_back({s, v});
          }
          break;
        }
        case Subspace::I:
          mt_coords[i].push_back({0, std::sqrt(double(d + 1))});
          break;
      }
      rotations.push_back(std::move(r));
    }
    const double overlap = conditional_overlap(mt_coords);
    // The fallback overlap is the dominant coefficient times its own
    // normalization; accept the conditional variant only when it does at
    // least as well.
    double fallback_scale = 1.0;
    for (int i = 0; i < n; ++i)
      fallback_scale *= (sb.kind(pb.digit(best, i)) == Subspace::I)
                            ? std::sqrt(double(d + 1))
                            : std::sqrt(2.0);
    if (conditional && std::abs(overlap) < best_abs * fallback_scale * 0.5)
      continue;  // degenerate cancellation; use the basis label instead

    out.rotations = std::move(rotations);
    out.overlap = overlap;
    // M_x in the rotated frame: per A site sum_j lambda_j A_j.
    std::vector<std::vector<std::pair<int, double>>> mx_site(n);
    for (int i = 0; i < n; ++i) {
      const int digit = pb.digit(best, i);
      switch (sb.kind(digit)) {
        case Subspace::A:
          for (std::size_t j = 0; j < site_lambdas[i].size(); ++j) {
            const double lam = site_lambdas[i][j];
            if (std::abs(lam) < 1e-14) continue;
            const int s = block_start(d, static_cast<int>(j) + 1);
            mx_site[i].push_back(
                {sb.a_index(s, s + 1), lam * std::sqrt(2.0)});
          }
          break;
        case Subspace::B:
          mx_site[i].push_back({1, std::sqrt(2.0)});
          break;
        case Subspace::I:
          mx_site[i].push_back({0, std::sqrt(double(d + 1))});
          break;
      }
    }
    std::vector<int> labels(n, 0);
    std::function<void(int, double)> rec = [&](int site, double w) {
      if (site == n) {
        out.m_weights.push_back({pb.encode(labels), w});
        return;
      }
      for (const auto& [digit, coeff] : mx_site[site]) {
        labels[site] = digit;
        rec(site + 1, w * coeff);
      }
    };
    rec(0, 1.0);
    break;
  }

  Vector c2 = c1;
  for (int i = 0; i < n; ++i)
    c2 = pb.apply_site_matrix(c2, i, sb.conjugation_action(out.rotations[i]));
  double overlap_after = 0;
  for (const auto& [label, w] : out.m_weights) overlap_after += w * c2(label);
  // Conjugation invariance of the pairing: the tracked coupling must
  // survive the rotation.
  if (std::abs(overlap_after - out.overlap) > 1e-8 * (1.0 + std::abs(out.overlap)))
    throw std::runtime_error("canonicalize: coupling not preserved");
  out.coords = std::move(c2);
  return out;
}

Vector project_coords(const ProductBasis& pb, const Vector& c,
                      const SectorString& sorted) {
  const int d = pb.d();
  if (d == 3) return c;  // no valid per-site projector at d = 3
  Vector out = c;
  const SiteBasis& sb = pb.site();
  for (int i = 0; i < pb.n(); ++i) {
    ProjectorSpec spec{ProjectorKind::I, 1};
    if (d == 2) {
      spec.kind = sorted.symbols[i] == Subspace::B ? ProjectorKind::B
                                                   : ProjectorKind::AI;
    } else {
      switch (sorted.symbols[i]) {
        case Subspace::A: spec.kind = ProjectorKind::A; break;
        case Subspace::B: spec.kind = ProjectorKind::B; break;
        case Subspace::I: spec.kind = ProjectorKind::I; break;
      }
    }
    out = pb.apply_site_diagonal(out, i, projector_coord_diagonal(sb, spec));
  }
  if (d == 2 && sorted.n_b() == 0) {
    // Summands with a single A term are local generators; removing them
    // keeps the nonlocal pairing and leaves every summand with >= 2 A's.
    for (long id = 0; id < pb.size(); ++id)
      if (pb.label_is_local(id)) out(id) = 0.0;
  }
  return out;
}

// -------------------------------------------------------------------------
// Violation search
// -------------------------------------------------------------------------

struct Candidate {
  ConstraintKind kind;
  int site_k = 0;
  std::vector<BlochVector> preps, meas;
};

double evaluate_candidate(const OperatorTensor& y, const Candidate& c) {
  return evaluate_certificate_constraint(y, c.kind, c.site_k, c.preps, c.meas);
}

// Exact vector recipes for Y in the sigma-block form
// sum_j lambda_j A_{j1} x..x A_{j nA} x B^{nB} x 1^{nI}.
std::optional<Candidate> blocks_recipe(const ProductBasis& pb,
                                       const Vector& y,
                                       const SectorString& sorted) {
  const int d = pb.d(), n = pb.n();
  const SiteBasis& sb = pb.site();
  const int na = sorted.n_a(), nb = sorted.n_b();
  const double max_abs = y.cwiseAbs().maxCoeff();
  if (max_abs == 0.0) return std::nullopt;

  long best = -1;
  double best_abs = 0;
  for (long id = 0; id < pb.size(); ++id) {
    if (std::abs(y(id)) <= 1e-9 * max_abs) continue;
    for (int i = 0; i < n; ++i) {
      const int digit = pb.digit(id, i);
      switch (sorted.symbols[i]) {
        case Subspace::A:
          if (sb.kind(digit) != Subspace::A ||
              block_of_pair(d, sb.a_pair(digit)) == 0)
            return std::nullopt;
          break;
        case Subspace::B:
          if (sb.kind(digit) != Subspace::B || sb.b_axis(digit) != 1)
            return std::nullopt;
          break;
        case Subspace::I:
          if (digit != 0) return std::nullopt;
          break;
      }
    }
    if (std::abs(y(id)) > best_abs) {
      best_abs = std::abs(y(id));
      best = id;
    }
  }
  if (best < 0) return std::nullopt;

  std::vector<int> blocks(n, 0);
  for (int i = 0; i < na; ++i)
    blocks[i] = block_of_pair(d, sb.a_pair(pb.digit(best, i)));
  const auto axis_of_block = [d](int j) {
    return BlochVector::axis(d, block_start(d, j));
  };
  const BlochVector e1 = BlochVector::axis(d, 1);
  const BlochVector e2 = BlochVector::axis(d, 2);

  Candidate cand;
  if (na % 2 == 0) {
    cand.kind = ConstraintKind::SecondDiag;
    for (int i = 0; i < n; ++i)
      cand.preps.push_back(i < na ? axis_of_block(blocks[i]) : e1);
  } else if (na == 1) {
    if (nb == 0) return std::nullopt;  // local pattern, cannot occur
    cand.kind = ConstraintKind::SecondFlip;
    cand.site_k = na;  // first B site
    for (int i = 0; i < n; ++i) {
      cand.preps.push_back(i == 0 ? axis_of_block(blocks[0])
                                  : (i == cand.site_k ? e2 : e1));
      cand.meas.push_back(i == 0 ? axis_of_block(blocks[0]) : e1);
    }
    cand.meas[cand.site_k] = -cand.preps[cand.site_k];
  } else {
    cand.kind = ConstraintKind::SecondFlip;
    cand.site_k = 1;  // second A site
    for (int i = 0; i < n; ++i) {
      cand.preps.push_back(i < na ? axis_of_block(blocks[i]) : e1);
      cand.meas.push_back(i < na ? axis_of_block(blocks[i]) : e1);
    }
    cand.meas[0] = -cand.meas[0];  // sign steering on the first A site
    cand.meas[cand.site_k] = -cand.preps[cand.site_k];
  }
  return cand;
}

// d = 2 recipes: sites ordered A..A I..I B..B, Y expanded over
// A^{(0)}/A^{(1)} at AI sites and B_0/B_1 at B sites. Zero-padding the
// A^{(0)} slots isolates the chosen summand exactly.
std::optional<Candidate> d2_recipe(const ProductBasis& pb, const Vector& y,
                                   const SectorString& sorted) {
  const int n = pb.n();
  const SiteBasis& sb = pb.site();
  const int nb = sorted.n_b();
  const int nai = n - nb;
  const int a_digit = sb.a_index(1, 2);
  const double max_abs = y.cwiseAbs().maxCoeff();
  if (max_abs == 0.0) return std::nullopt;

  long best = -1;
  double best_abs = 0;
  int best_zeros = -1;
  for (long id = 0; id < pb.size(); ++id) {
    if (std::abs(y(id)) <= 1e-9 * max_abs) continue;
    int zeros = 0;
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      const int digit = pb.digit(id, i);
      if (i < nai) {
        if (digit == 0)
          ++zeros;
        else if (digit != a_digit)
          ok = false;
      } else if (sb.kind(digit) != Subspace::B) {
        ok = false;
      }
    }
    if (!ok) return std::nullopt;
    if (zeros > best_zeros ||
        (zeros == best_zeros && std::abs(y(id)) > best_abs)) {
      best_zeros = zeros;
      best_abs = std::abs(y(id));
      best = id;
    }
  }
  if (best < 0) return std::nullopt;

  const BlochVector e1 = BlochVector::axis(2, 1);
  const BlochVector e2 = BlochVector::axis(2, 2);
  const BlochVector zero = BlochVector::zero(2);
  std::vector<int> ones;
  for (int i = 0; i < nai; ++i)
    if (pb.digit(best, i) == a_digit) ones.push_back(i);

  Candidate cand;
  cand.preps.assign(n, zero);
  cand.meas.assign(n, zero);
  bool padded = static_cast<int>(ones.size()) < nai;
  int sign_factors;  // count of -1 factors from the free A^{(1)} slots
  if (nb == 0) {
    if (ones.size() < 2) return std::nullopt;
    cand.site_k = ones[0];
    cand.preps[cand.site_k] = e1;
    for (std::size_t z = 1; z < ones.size(); ++z) {
      cand.preps[ones[z]] = e1;
      cand.meas[ones[z]] = e1;
    }
    sign_factors = static_cast<int>(ones.size()) - 1;
    if (sign_factors % 2 == 0) {
      cand.meas[ones[1]] = -e1;  // that factor becomes +1
      --sign_factors;
    }
  } else {
    if (ones.empty()) return std::nullopt;
    cand.site_k = nai;
    for (int i = nai; i < n; ++i) {
      const BlochVector dir = sb.b_axis(pb.digit(best, i)) == 1 ? e1 : e2;
      cand.preps[i] = dir;
      cand.meas[i] = -dir;
    }
    for (int z : ones) {
      cand.preps[z] = e1;
      cand.meas[z] = e1;
    }
    sign_factors = static_cast<int>(ones.size());
    if (sign_factors % 2 == 0) {
      cand.meas[ones[0]] = -e1;
      --sign_factors;
    }
  }
  cand.meas[cand.site_k] = -cand.preps[cand.site_k];
  cand.kind =
      padded ? ConstraintKind::SecondZeropad : ConstraintKind::SecondFlip;
  return cand;
}

struct SearchState {
  const OperatorTensor& y;
  const AnalyzeOptions& opt;
  long structured = 0, random = 0;
  double best_value = std::numeric_limits<double>::infinity();
  std::optional<Candidate> best;

  double eval(const Candidate& c, bool is_random) {
    const double v = evaluate_candidate(y, c);
    (is_random ? random : structured) += 1;
    if (v < best_value) {
      best_value = v;
      best = c;
    }
    return v;
  }
  bool found() const { return best_value < -opt.cert_margin; }
};

void probe_sweep(SearchState& st) {
  const int d = st.y.d, n = st.y.n;
  long tuples = 1;
  for (int i = 0; i < n; ++i) tuples *= d;
  for (long t = 0; t < tuples; ++t) {
    if (st.found() || st.structured >= st.opt.structured_budget) return;
    std::vector<BlochVector> preps;
    long s = t;
    for (int i = 0; i < n; ++i) {
      preps.push_back(BlochVector::axis(d, 1 + static_cast<int>(s % d)));
      s /= d;
    }
    st.eval({ConstraintKind::SecondDiag, 0, preps, {}}, false);
    for (int k = 0; k < n && !st.found(); ++k) {
      Candidate c{ConstraintKind::SecondFlip, k, preps, preps};
      c.meas[k] = -preps[k];
      st.eval(c, false);
      for (int i = 0; i < n; ++i)
        if (i != k) c.meas[i] = -c.meas[i];
      st.eval(c, false);
    }
  }
}

// Slot-wise descent on the multilinear constraint value. For a flip
// candidate the value is linear in every lifted slot except the flipped
// one, so each slot has a closed-form optimum; the flipped slot and the
// diagonal kind are quadratic on the sphere and are improved from a small
// set of stationary candidates.
class SlotRefiner {
 public:
  SlotRefiner(SearchState& st, const Matrix& y_squared)
      : st_(st), y2_(y_squared), d_(st.y.d), n_(st.y.n), mi_(st.y.d, st.y.n) {}

  void refine() {
    if (!st_.best) return;
    bool improved = true;
    int passes = 0;
    while (improved && ++passes <= 6 && !st_.found() &&
           st_.random < st_.opt.random_budget) {
      improved = false;
      for (int i = 0; i < n_; ++i) {
        const Candidate base = *st_.best;
        if (base.preps[i].norm() < 0.5) continue;  // padded slot
        const double before = st_.best_value;
        if (base.kind == ConstraintKind::SecondDiag) {
          improve_quadratic(base, i);
        } else if (i == base.site_k) {
          improve_quadratic(base, i);
        } else {
          improve_linear(base, i, /*prep=*/true);
          if (st_.best) improve_linear(*st_.best, i, /*prep=*/false);
        }
        if (st_.best_value < before - 1e-15) improved = true;
      }
    }
  }

 private:
  // value = w_out^T Y^2 w_in; contraction of one side against all other
  // slots leaves a (d+1)-vector of coefficients for the free slot.
  Vector contract(const Vector& fixed_side, const Candidate& c, int slot,
                  bool prep_side) const {
    Vector u = prep_side ? Vector(y2_.transpose() * fixed_side)
                         : Vector(y2_ * fixed_side);
    // u pairs against the free side; fold all slots except `slot`.
    std::vector<Vector> lifts(n_);
    for (int j = 0; j < n_; ++j) {
      if (prep_side) {
        lifts[j] = lift(c.preps[j]);
      } else {
        lifts[j] = (j == c.site_k && c.kind != ConstraintKind::SecondDiag)
                       ? lift(-c.preps[j])
                       : lift(c.meas[j]);
      }
    }
    Vector out = Vector::Zero(d_ + 1);
    for (long f = 0; f < u.size(); ++f) {
      double w = u(f);
      if (w == 0.0) continue;
      for (int j = 0; j < n_ && w != 0.0; ++j)
        if (j != slot) w *= lifts[j](mi_.digit(f, j));
      out(mi_.digit(f, slot)) += w;
    }
    return out;
  }

  // (d+1)x(d+1) coefficient matrix when the slot appears on both sides.
  Matrix contract_both(const Candidate& c, int slot) const {
    std::vector<Vector> in_lifts(n_), out_lifts(n_);
    for (int j = 0; j < n_; ++j) {
      in_lifts[j] = lift(c.preps[j]);
      out_lifts[j] = (j == c.site_k && c.kind != ConstraintKind::SecondDiag)
                         ? lift(-c.preps[j])
                         : lift(c.kind == ConstraintKind::SecondDiag
                                    ? c.preps[j]
                                    : c.meas[j]);
    }
    Matrix m = Matrix::Zero(d_ + 1, d_ + 1);
    for (long r = 0; r < y2_.rows(); ++r)
      for (long col = 0; col < y2_.cols(); ++col) {
        double w = y2_(r, col);
        if (w == 0.0) continue;
        for (int j = 0; j < n_ && w != 0.0; ++j)
          if (j != slot) w *= out_lifts[j](mi_.digit(r, j)) *
                             in_lifts[j](mi_.digit(col, j));
        m(mi_.digit(r, slot), mi_.digit(col, slot)) += w;
      }
    return m;
  }

  void try_vector(const Candidate& base, int slot, bool prep,
                  const Vector& a) {
    if (a.norm() < 1e-12) return;
    Candidate c = base;
    BlochVector v(d_, a.normalized());
    if (prep) {
      c.preps[slot] = v;
    } else {
      c.meas[slot] = v;
    }
    if (c.kind != ConstraintKind::SecondDiag && slot == c.site_k)
      c.meas[slot] = -c.preps[slot];
    st_.eval(c, true);
  }

  void improve_linear(const Candidate& base, int slot, bool prep) {
    if (st_.random >= st_.opt.random_budget) return;
    const Vector fixed =
        prep ? flipped_out_lift(base) : lifted_product(base.preps);
    const Vector coeff = contract(fixed, base, slot, prep);
    // minimize coeff_0 + coeff_tail . a over the unit sphere
    try_vector(base, slot, prep, Vector(-coeff.tail(d_)));
  }

  void improve_quadratic(const Candidate& base, int slot) {
    if (st_.random >= st_.opt.random_budget) return;
    const Matrix m = contract_both(base, slot);
    const bool diag = base.kind == ConstraintKind::SecondDiag;
    // diag kind: value oriented = -(1,a)M(1,a); flipped slot: value =
    // (1,-a)M(1,a). Both reduce to optimizing a^T Q a + g . a on the sphere.
    Matrix q = 0.5 * (m.block(1, 1, d_, d_) + m.block(1, 1, d_, d_).transpose());
    Vector g = m.block(0, 1, 1, d_).transpose() + m.block(1, 0, d_, 1);
    if (!diag) {
      // minimize -a^T Q a + (row - col) . a  <=> maximize a^T Q a - (..) . a
      g = Vector(m.block(0, 1, 1, d_).transpose() - m.block(1, 0, d_, 1));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(q);
    for (long i = 0; i < d_; ++i) {
      try_vector(base, slot, true, Vector(eig.eigenvectors().col(i)));
      try_vector(base, slot, true, Vector(-eig.eigenvectors().col(i)));
      if (st_.found()) return;
    }
    try_vector(base, slot, true, g);
    try_vector(base, slot, true, Vector(-g));
  }

  Vector flipped_out_lift(const Candidate& c) const {
    std::vector<BlochVector> meas = c.meas;
    if (c.kind == ConstraintKind::SecondDiag) {
      meas = c.preps;
    } else {
      meas[c.site_k] = -c.preps[c.site_k];
    }
    return lifted_product(meas);
  }

  SearchState& st_;
  const Matrix& y2_;
  int d_, n_;
  MultiIndex mi_;
};

void random_search(SearchState& st, const Matrix& y_squared,
                   std::uint64_t seed) {
  const int d = st.y.d, n = st.y.n;
  Rng rng(seed);
  SlotRefiner refiner(st, y_squared);
  while (st.random < st.opt.random_budget && !st.found()) {
    std::vector<BlochVector> preps, meas;
    for (int i = 0; i < n; ++i) {
      preps.push_back(random_unit_vector(d, rng));
      meas.push_back(random_unit_vector(d, rng));
    }
    const double before = st.best_value;
    st.eval({ConstraintKind::SecondDiag, 0, preps, {}}, true);
    for (int k = 0; k < n && st.random < st.opt.random_budget; ++k) {
      Candidate c{ConstraintKind::SecondFlip, k, preps, meas};
      c.meas[k] = -preps[k];
      st.eval(c, true);
    }
    if (st.best_value < before) refiner.refine();
  }
}

ViolationSearchResult violation_search_impl(const ProductBasis& pb,
                                            const OperatorTensor& y_dense,
                                            const Vector& y_coords,
                                            const SectorString& sorted,
                                            const AnalyzeOptions& opt,
                                            std::uint64_t seed) {
  SearchState st{y_dense, opt, 0, 0, std::numeric_limits<double>::infinity(), std::nullopt};
  std::optional<Candidate> recipe =
      pb.d() == 2 ? d2_recipe(pb, y_coords, sorted)
                  : blocks_recipe(pb, y_coords, sorted);
  if (recipe) st.eval(*recipe, false);
  if (!st.found()) probe_sweep(st);
  if (!st.found()) {
    const Matrix y_squared = y_dense.matrix * y_dense.matrix;
    SlotRefiner(st, y_squared).refine();
    if (!st.found()) random_search(st, y_squared, seed);
  }

  ViolationSearchResult out;
  out.trials_structured = st.structured;
  out.trials_random = st.random;
  out.best_value = st.best ? st.best_value : 0.0;
  if (st.found()) {
    out.found = true;
    out.kind = st.best->kind;
    out.site_k = st.best->site_k;
    out.preps = st.best->preps;
    out.meas = st.best->meas;
    out.value = st.best_value;
  }
  return out;
}

}  // namespace

ViolationSearchResult violation_search(const OperatorTensor& y,
                                       const SectorString& sector_sorted,
                                       const AnalyzeOptions& opt,
                                       std::uint64_t seed) {
  const ProductBasis pb(y.d, y.n);
  return violation_search_impl(pb, y, pb.coords_of(y), sector_sorted, opt,
                               seed);
}

SectorString find_nonlocal_sector(const OperatorTensor& x, double tol) {
  const ProductBasis pb(x.d, x.n);
  const Vector c = pb.coords_of(x);
  return find_sector_coords(pb, c, tol * std::max(1.0, c.norm()), nullptr);
}

Canonicalization canonicalize(const OperatorTensor& x,
                              const SectorString& sec) {
  const ProductBasis pb(x.d, x.n);
  const CanonCoords cc = canonicalize_coords(pb, pb.coords_of(x), sec);
  Canonicalization out;
  out.site_order = cc.site_order;
  out.rotations = cc.rotations;
  out.x_canonical = pb.materialize(cc.coords);
  // M_x as the unnormalized product of standard factors.
  Vector m = Vector::Zero(pb.size());
  for (const auto& [label, w] : cc.m_weights) m(label) = w;
  out.m_x = pb.materialize(m);
  out.sector_sorted = cc.sorted;
  out.overlap = cc.overlap;
  return out;
}

OperatorTensor project_candidate(const OperatorTensor& x_canonical,
                                 const SectorString& sector_sorted) {
  const ProductBasis pb(x_canonical.d, x_canonical.n);
  const Vector y =
      project_coords(pb, pb.coords_of(x_canonical), sector_sorted);
  return pb.materialize(y);
}

namespace {

double survivor_spot_min(const OperatorTensor& y, long trials,
                         std::uint64_t seed, Candidate* worst) {
  const int d = y.d, n = y.n;
  Rng rng(seed);
  double min_val = std::numeric_limits<double>::infinity();
  for (long t = 0; t < trials; ++t) {
    std::vector<BlochVector> preps, meas;
    for (int i = 0; i < n; ++i) {
      preps.push_back(random_unit_vector(d, rng));
      meas.push_back(random_unit_vector(d, rng));
    }
    Candidate c;
    const int which = static_cast<int>(t % (n + 1));
    if (which == 0) {
      c = {ConstraintKind::SecondDiag, 0, preps, {}};
    } else {
      c = {ConstraintKind::SecondFlip, which - 1, preps, meas};
      c.meas[c.site_k] = -preps[c.site_k];
    }
    const double v = evaluate_candidate(y, c);
    if (v < min_val) {
      min_val = v;
      if (worst) *worst = c;
    }
  }
  return min_val;
}

DirectionOutcome analyze_direction(const ProductBasis& pb, const Vector& dir,
                                   int index, const AnalyzeOptions& opt) {
  DirectionOutcome out;
  out.index = index;
  const SectorString sec =
      find_sector_coords(pb, dir, 1e-10 * dir.norm(), &out.sector_norms);
  out.sector = sec.str();
  const CanonCoords canon = canonicalize_coords(pb, dir, sec);
  Vector y = project_coords(pb, canon.coords, canon.sorted);
  // The pairing with M_x passes through the projection untouched, which is
  // what guarantees Y != 0.
  double overlap_y = 0;
  for (const auto& [label, w] : canon.m_weights) overlap_y += w * y(label);
  if (std::abs(overlap_y - canon.overlap) >
      1e-8 * (1.0 + std::abs(canon.overlap)))
    throw std::runtime_error(
        "analyze: projected candidate lost its sector coupling");
  const double ny = y.norm();
  if (ny < 1e-12)
    throw std::runtime_error("analyze: projected candidate vanished");
  y /= ny;
  const OperatorTensor y_dense = pb.materialize(y);

  const std::uint64_t seed = split_seed(opt.seed, 1000 + index);
  ViolationSearchResult vs =
      violation_search_impl(pb, y_dense, y, canon.sorted, opt, seed);
  out.trials_structured = vs.trials_structured;
  out.trials_random = vs.trials_random;
  out.best_value = vs.best_value;

  const auto make_cert = [&](ConstraintKind kind, int site_k,
                             const std::vector<BlochVector>& preps,
                             const std::vector<BlochVector>& meas,
                             double value) {
    ExclusionCertificate cert;
    cert.d = pb.d();
    cert.n = pb.n();
    cert.candidate_id = "direction-" + std::to_string(index);
    cert.sector = canon.sorted.str();
    cert.site_order = canon.site_order;
    cert.conjugation = canon.rotations;
    cert.y = y_dense;
    cert.kind = kind;
    cert.site_k = site_k;
    cert.preps = preps;
    cert.meas = meas;
    cert.value = value;
    cert.margin = std::abs(value);
    return cert;
  };

  if (vs.found) {
    out.status = "excluded";
    out.certificate =
        make_cert(vs.kind, vs.site_k, vs.preps, vs.meas, vs.value);
    return out;
  }
  // Survivor validation: spot checks; a violation found here still excludes
  // the direction (the witness is just as good).
  Candidate worst;
  out.spot_check_min = survivor_spot_min(y_dense, opt.survivor_spot_checks,
                                         split_seed(opt.seed, 500000 + index),
                                         &worst);
  if (out.spot_check_min < -opt.cert_margin) {
    out.status = "excluded";
    out.certificate = make_cert(worst.kind, worst.site_k, worst.preps,
                                worst.meas, out.spot_check_min);
    out.best_value = std::min(out.best_value, out.spot_check_min);
    return out;
  }
  out.status = "survivor";
  out.spot_checks_passed = true;
  return out;
}

}  // namespace

AnalysisReport analyze(int d, int n, const AnalyzeOptions& opt) {
  if (d == 1)
    throw std::invalid_argument(
        "analyze: classical bit (d=1): continuous-group analysis not "
        "applicable");
  if (d < 1 || n < 1) throw std::invalid_argument("analyze: bad d or n");
  tensor_dim(d, n);

  AnalysisReport report;
  report.d = d;
  report.n = n;
  report.options = opt;

  FirstOrderSystem system(d, n, opt.seed);
  report.site_svd = system.site_svd();
  GeneratorSpace ns = null_space(system, opt.svd_cutoff, &report.diag_svd);
  const auto pb = system.basis();
  report.null_dim = ns.dim();

  GeneratorSpace loc = local_algebra_basis(d, n);
  report.loc_dim = loc.dim();
  std::vector<long> local_labels;
  for (long id = 0; id < pb->size(); ++id)
    if (pb->label_is_local(id)) local_labels.push_back(id);

  // Nonlocal complement: project the local labels out of the null basis;
  // the projected rows have singular values 1 (complement) and 0 (local),
  // so the span extraction is numerically clean.
  Matrix projected = ns.coeffs;
  for (long i = 0; i < ns.dim(); ++i)
    for (long id : local_labels) projected(i, id) = 0.0;
  const Matrix comp_rows = span_rows(projected);
  std::vector<Vector> comp;
  for (long i = 0; i < comp_rows.rows(); ++i)
    comp.push_back(comp_rows.row(i).transpose());
  report.nonlocal_dim = static_cast<long>(comp.size());
  if (report.nonlocal_dim != ns.dim() - loc.dim())
    throw std::runtime_error("analyze: complement dimension mismatch");

  // d = 3: orient the complement basis along the quantum directions so the
  // oracle's adjoint images appear as explicit candidates.
  std::vector<Vector> image_coords;
  std::vector<Vector> qspan;
  if (d == 3) {
    std::vector<Vector> qdirs;
    for (const HermitianOperator& h : traceless_basis(n)) {
      const OperatorTensor x = adjoint_generator(h);
      Vector c = pb->coords_of(x);
      c /= c.norm();
      image_coords.push_back(c);
      Vector nl = c;
      for (long id : local_labels) nl(id) = 0.0;
      // Containment in the computed complement, then Gram-Schmidt.
      Vector proj = Vector::Zero(pb->size());
      for (const Vector& row : comp) proj += row.dot(nl) * row;
      if (proj.norm() > 1e-6) mgs_append(qdirs, std::move(proj), 1e-4);
    }
    report.oracle_image_count = static_cast<long>(image_coords.size());
    Matrix rest_in(comp.size(), pb->size());
    for (std::size_t i = 0; i < comp.size(); ++i) {
      Vector v = comp[i];
      for (const Vector& q : qdirs) v -= q.dot(v) * q;
      rest_in.row(i) = v.transpose();
    }
    const Matrix rest_rows = span_rows(rest_in);
    std::vector<Vector> rest;
    for (long i = 0; i < rest_rows.rows(); ++i)
      rest.push_back(rest_rows.row(i).transpose());
    if (qdirs.size() + rest.size() != comp.size())
      throw std::runtime_error("analyze: oracle orientation changed the rank");
    qspan = qdirs;
    comp = std::move(qdirs);
    for (Vector& r : rest) comp.push_back(std::move(r));
  }

  // Per-direction analysis, independent and parallelizable.
  report.directions.resize(comp.size());
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const int threads = std::max(1, opt.threads);
  const auto worker = [&]() {
    while (true) {
      const long i = next.fetch_add(1);
      if (i >= static_cast<long>(comp.size())) return;
      try {
        report.directions[i] =
            analyze_direction(*pb, comp[i], static_cast<int>(i), opt);
      } catch (...) {
        std::lock_guard<std::mutex> g(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  if (threads == 1 || comp.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& dir : report.directions) {
    if (dir.status == "excluded") ++report.excluded_count;
    if (dir.status == "survivor") ++report.survivor_count;
  }

  if (d == 3 && !image_coords.empty()) {
    // Survivor space = g_loc + surviving directions; the oracle's images
    // must sit inside it.
    std::vector<const Vector*> span;
    for (std::size_t i = 0; i < comp.size(); ++i)
      if (report.directions[i].status == "survivor") span.push_back(&comp[i]);
    double worst = 0;
    for (const Vector& img : image_coords) {
      Vector v = img;
      for (long id : local_labels) v(id) = 0.0;
      for (const Vector* s : span) v -= (*s).dot(v) * (*s);
      worst = std::max(worst, v.norm());
    }
    report.oracle_membership_residual = worst;
    for (std::size_t i = 0; i < comp.size(); ++i) {
      double align = 0;
      for (const Vector& q : qspan) align += std::pow(q.dot(comp[i]), 2);
      report.directions[i].oracle_alignment = align;
    }
  }

  const bool all_excluded = report.excluded_count ==
                            static_cast<long>(report.directions.size());
  if (report.directions.empty() || (d != 3 && all_excluded)) {
    report.conclusion = "g = g_loc";
  } else if (d == 3 && report.survivor_count > 0) {
    report.conclusion = "survivors present";
  } else if (d == 3 && all_excluded) {
    report.conclusion = "g = g_loc";
  } else {
    report.conclusion = "budget exhausted";
  }
  return report;
}

}  // namespace gbitlab
