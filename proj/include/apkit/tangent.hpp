#pragma once

#include "apkit/linalg.hpp"

#include <utility>
#include <vector>

namespace apkit {

// Dense realization of the tangent space of the rank-r manifold at a square M
// as the range of an n^2 x 2n^2 block matrix. The row for position (i, j)
// (rows ordered lexicographically, 0-based) carries column j of M in the i-th
// length-n block and row i of M in the (n + j)-th block, so that multiplying
// by stacked row/column parameters enumerates every X M + M Y.
struct TangentMatrix {
    int n = 0;
    Matrix data;                                 // n^2 x 2n^2
    std::vector<std::pair<int, int>> row_index;  // matrix position of each row
};

// n is capped at 64: the dense tangent matrix costs n^2 x 2n^2 doubles. For
// larger problems the m x m Gram certificate from build_v_omega is the
// practical route.
TangentMatrix build_tangent_matrix(const Matrix& M);

// Partition the rows of T into (observed, unobserved); both keep the
// lexicographic order, the first following mask.known() exactly.
std::pair<Matrix, Matrix> select_rows(const TangentMatrix& T,
                                      const ObservationMask& mask);

// The |Omega| x |Omega| Gram certificate, assembled entrywise from row and
// column inner products of M. Equals T_observed * T_observed^T for the
// lexicographic row order; full rank 2nr - r^2 certifies transversality.
Matrix build_v_omega(const Matrix& M, const ObservationMask& mask);

// The equivalent transversality conditions, each evaluated independently:
// a trivial-intersection test on null spaces, a row-space inclusion test, and
// the two rank counts against the manifold dimension.
struct TransversalityReport {
    int n = 0;
    int r = 0;
    int m = 0;                              // number of observed entries
    int dim_manifold = 0;                   // 2nr - r^2
    int rank_T_omega = 0;
    int rank_V_omega = 0;
    bool rowspace_inclusion_holds = false;  // rowspace(T_unobs) within rowspace(T_obs)
    bool intersection_trivial = false;      // null(T_obs) within null(T_unobs)
    bool certified_linear = false;          // rank_T_omega == dim_manifold
};

// Requires numerical_rank(M) == r; the tangent data is built at the rank-r
// truncation of M, which for valid inputs only strips the sub-threshold
// singular tail. Near-rank-r data that fails the check (e.g. values typed in
// from a rounded printout) can be truncated first; the CLI exposes --lift.
TransversalityReport transversality_report(const Matrix& M,
                                           const ObservationMask& mask, int r);

// Orthogonal projection of Y onto the tangent space at M (rank r validated):
// P_U Y + Y P_V - P_U Y P_V with P_U, P_V the projectors onto the column and
// row spaces of M.
Matrix tangent_projection(const Matrix& M, const Matrix& Y, int r);

// Directional derivative of the rank-r SVD truncation at X in direction Y:
// the tangent projection at the truncated point plus a curvature correction
// over the mixed principal directions. Requires a strict spectral gap
// sigma_r - sigma_{r+1} >= 1e-8 * sigma_1 (the operator is not differentiable
// at a tie).
Matrix svd_truncation_differential(const Matrix& X, const Matrix& Y, int r);

} // namespace apkit
