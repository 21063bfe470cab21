#pragma once

#include <map>
#include <optional>

#include "gbitlab/constraints.hpp"
#include "gbitlab/projectors.hpp"

namespace gbitlab {

enum class ConstraintKind { SecondFlip, SecondDiag, SecondZeropad };
std::string constraint_kind_name(ConstraintKind k);
ConstraintKind constraint_kind_from_name(const std::string& name);

/// A self-contained witness that a candidate generator is excluded: the
/// projected generator Y (unit HS norm), a constraint identifier, and the
/// explicit vectors producing a strictly negative oriented value.
/// Orientation: flip kinds store the raw value (admissible >= 0); the diag
/// kind stores the negated raw value (admissible raw <= 0), so a violation
/// is always value < 0.
struct ExclusionCertificate {
  int d = 0, n = 0;
  std::string candidate_id;
  std::string sector;              // analysis-frame sector of M_x
  std::vector<int> site_order;     // analysis site i = original site_order[i]
  std::vector<Matrix> conjugation; // per analysis site, d x d rotation
  OperatorTensor y;                // unit HS norm, analysis frame
  ConstraintKind kind = ConstraintKind::SecondFlip;
  int site_k = 0;                  // 0-indexed here, 1-based in files
  std::vector<BlochVector> preps;
  std::vector<BlochVector> meas;   // empty for SecondDiag
  double value = 0;                // oriented, < 0
  double margin = 0;               // |value| (Y has unit HS norm)
};

/// Re-evaluates a certificate's constraint using only tensor/constraints
/// machinery; returns the oriented value.
double evaluate_certificate_constraint(const OperatorTensor& y,
                                       ConstraintKind kind, int site_k,
                                       const std::vector<BlochVector>& preps,
                                       const std::vector<BlochVector>& meas);

struct AnalyzeOptions {
  std::uint64_t seed = 1;
  double svd_cutoff = tol::kSvdCutoff;
  double constraint_tol = tol::kConstraint;
  double cert_margin = tol::kCertMargin;  // relative to |Y|^2 = 1
  long structured_budget = 10000;
  long random_budget = 100000;
  long survivor_spot_checks = 10000;
  int threads = 1;
};

struct DirectionOutcome {
  int index = -1;
  std::string status;  // "excluded" | "survivor" | "undecided"
  std::string sector;  // chosen sector, original site order
  std::map<std::string, double> sector_norms;
  std::optional<ExclusionCertificate> certificate;
  long trials_structured = 0, trials_random = 0;
  double best_value = 0;       // most negative oriented value encountered
  double spot_check_min = 0;   // survivors only
  bool spot_checks_passed = false;
  double oracle_alignment = -1;  // d = 3: overlap^2 with the quantum span
};

struct AnalysisReport {
  int d = 0, n = 0;
  AnalyzeOptions options;
  long null_dim = 0, loc_dim = 0, nonlocal_dim = 0;
  SvdDiagnostics site_svd, diag_svd;
  std::vector<DirectionOutcome> directions;
  std::string conclusion;  // "g = g_loc" | "survivors present" | "budget exhausted"
  long survivor_count = 0;
  long excluded_count = 0;
  // d = 3 cross-check: max residual of the oracle's adjoint images against
  // g_loc + survivors.
  double oracle_membership_residual = -1;
  long oracle_image_count = 0;
};

/// Largest-norm sector of X outside the local pattern set {I..I, AI..I,
/// IAI..I, ..., I..IA}; ties broken lexicographically.
SectorString find_nonlocal_sector(const OperatorTensor& x, double tol = 1e-10);

struct Canonicalization {
  std::vector<int> site_order;
  std::vector<Matrix> rotations;  // d x d per analysis site
  OperatorTensor x_canonical;     // X'' in the analysis frame
  OperatorTensor m_x;             // product form with <X'', M_x> != 0
  SectorString sector_sorted;
  double overlap = 0;
};

/// Reorders sites so the sector reads A..AB..BI..I (A..AI..IB..B for d=2),
/// aligns B factors to e_1 and A factors to the sigma-block normal form.
Canonicalization canonicalize(const OperatorTensor& x, const SectorString& sec);

/// Group-averaging projection of the canonicalized candidate. d >= 4 uses
/// phi_A/phi_B/phi_I per site; d = 2 uses phi_AI/phi_B (and subtracts the
/// local part when the sector has no B sites); d = 3 has no valid per-site
/// projector and returns the input unchanged.
OperatorTensor project_candidate(const OperatorTensor& x_canonical,
                                 const SectorString& sector_sorted);

struct ViolationSearchResult {
  bool found = false;
  ConstraintKind kind = ConstraintKind::SecondFlip;
  int site_k = 0;
  std::vector<BlochVector> preps, meas;
  double value = 0;
  long trials_structured = 0, trials_random = 0;
  double best_value = 0;
};

/// Searches for a second-order violation of the (unit HS norm) candidate:
/// exact vector recipes on the block form first, then a deterministic probe
/// sweep, then a seeded randomized search with sign-flip refinement.
ViolationSearchResult violation_search(const OperatorTensor& y,
                                       const SectorString& sector_sorted,
                                       const AnalyzeOptions& opt,
                                       std::uint64_t seed);

AnalysisReport analyze(int d, int n, const AnalyzeOptions& opt = {});

}  // namespace gbitlab
