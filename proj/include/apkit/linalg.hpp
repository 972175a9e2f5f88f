#pragma once

#include "apkit/mask.hpp"
#include "apkit/matrix.hpp"

#include <utility>

namespace apkit {

// Factors of a full SVD as used by the truncation operator: U is rows x k and
// V is cols x k with orthonormal columns, sigma holds all k = min(rows, cols)
// singular values in nonincreasing order.
struct SVDFactors {
    Matrix U;
    Vector sigma;
    Matrix V;
};

// Best rank-<=r approximation in Frobenius norm: keep the r largest singular
// triplets, zero the rest. The full factors are returned alongside for callers
// that need the spectrum (rank validation, gap checks, diagnostics).
std::pair<Matrix, SVDFactors> svd_truncate(const Matrix& X, int r);

// Entries at observed positions copied from X, zeros elsewhere.
Matrix project_mask(const Matrix& X, const ObservationMask& mask);

// Nearest matrix to Y agreeing with `observed` on the mask: observed values on
// Omega, Y everywhere else.
Matrix project_affine_mask(const Matrix& Y, const ObservationMask& mask,
                           const Matrix& observed);

// Keep the s largest-magnitude components of x in place, zero the rest. Ties
// at the cut are broken toward the lower index; *tie_hit (optional) reports
// whether the s-th and (s+1)-th magnitudes coincided, in which case the
// nearest s-sparse point is not unique and one value was picked.
Vector hard_threshold(const Vector& x, int s, bool* tie_hit = nullptr);

// Singular values above max(rows, cols) * sigma_max * 1e-10 count as nonzero.
int numerical_rank(const Matrix& A);
int numerical_rank(const Vector& singular_values, int rows, int cols);

} // namespace apkit
