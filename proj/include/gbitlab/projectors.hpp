#pragma once

#include "gbitlab/subspaces.hpp"

namespace gbitlab {

// Group-averaging projectors, each with a closed form used at runtime and a
// numeric average (Monte-Carlo or quadrature) used as a test oracle. All
// statements hold on the membership space A+B+I only; every entry point
// checks membership and refuses other inputs.
enum class ProjectorKind { I, Stabilizer, B, Prime, A, AI };

struct ProjectorSpec {
  ProjectorKind kind;
  int axis = 1;  // measurement axis for Stabilizer / B
};

/// SO(d) conjugation average: projector onto I.
Matrix phi_I(const Matrix& m);

/// Average over the stabilizer of e_j (iso SO(d-1)): projector onto
/// span(B_{e_j}) + I. Requires d >= 4: the SO(d-1) fundamental
/// representation must be absolutely irreducible, which fails for d = 3,
/// and for d = 2 the stabilizer is trivial (use phi_AI there).
Matrix phi_stabilizer(const Matrix& m, int j = 1);

/// phi_stabilizer - phi_I: projector onto span(B_{e_j}). For d = 2 this is
/// the companion 1 - phi_AI and keeps all of B.
Matrix phi_B(const Matrix& m, int j = 1);

/// Exact SO(2) conjugation average of a 2x2 block.
Matrix psi_2x2(const Matrix& m);

/// Torus conjugation average via the block rule: keep the y x y corner,
/// apply psi to diagonal sigma blocks, zero the rest.
Matrix phi_prime(const Matrix& m);

/// Projector onto span{A_1..A_z}; phi_prime - phi_I (d even) or
/// phi_prime - phi_I - phi_B (d odd). Requires d >= 4.
Matrix phi_A(const Matrix& m);

/// d = 2 only: full SO(2) conjugation average, projector onto A + I.
Matrix phi_AI(const Matrix& m);

/// Diagonal action of a projector kind in SiteBasis coordinates. Every
/// projector here is diagonal in that basis.
Vector projector_coord_diagonal(const SiteBasis& basis, const ProjectorSpec& spec);

/// Per-site composition Phi = phi_{k_1} x ... x phi_{k_n} applied to X.
OperatorTensor tensor_projector(const std::vector<ProjectorSpec>& per_site,
                                const OperatorTensor& x,
                                double membership_tol = tol::kMembership);

// Numeric oracles. haar_* are plain Monte-Carlo averages of R^ M R^T over
// sampled rotations; torus_average is a deterministic product quadrature
// that is exact for the degree-2 trigonometric integrand.
Matrix haar_average_so(const Matrix& m, int samples, std::uint64_t seed);
Matrix haar_average_stabilizer(const Matrix& m, int j, int samples,
                               std::uint64_t seed);
Matrix torus_average(const Matrix& m, int points_per_angle = 8);

}  // namespace gbitlab
