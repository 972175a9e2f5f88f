#include "apkit/linalg.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace apkit {

std::pair<Matrix, SVDFactors> svd_truncate(const Matrix& X, int r) {
    require_finite(X, "svd_truncate input");
    const int k = static_cast<int>(std::min(X.rows(), X.cols()));
    if (r < 1 || r > k) {
        throw std::invalid_argument("truncation rank " + std::to_string(r) +
                                    " outside [1, " + std::to_string(k) + "]");
    }
    Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        throw NumericalError("SVD failed to converge");
    }
    SVDFactors f{svd.matrixU(), svd.singularValues(), svd.matrixV()};
    Matrix truncated = f.U.leftCols(r) *
                       f.sigma.head(r).asDiagonal() *
                       f.V.leftCols(r).transpose();
    return {std::move(truncated), std::move(f)};
}

Matrix project_mask(const Matrix& X, const ObservationMask& mask) {
    if (X.rows() != mask.rows() || X.cols() != mask.cols()) {
        throw std::invalid_argument("matrix and mask dimensions disagree");
    }
    return X.cwiseProduct(mask.indicator());
}

Matrix project_affine_mask(const Matrix& Y, const ObservationMask& mask,
                           const Matrix& observed) {
    if (Y.rows() != mask.rows() || Y.cols() != mask.cols() ||
        observed.rows() != mask.rows() || observed.cols() != mask.cols()) {
        throw std::invalid_argument("matrix and mask dimensions disagree");
    }
    Matrix out = Y;
    for (const auto& [i, j] : mask.known()) {
        out(i, j) = observed(i, j);
    }
    return out;
}

Vector hard_threshold(const Vector& x, int s, bool* tie_hit) {
    require_finite(x, "hard_threshold input");
    const int n = static_cast<int>(x.size());
    if (s < 1 || s > n) {
        throw std::invalid_argument("sparsity " + std::to_string(s) +
                                    " outside [1, " + std::to_string(n) + "]");
    }
    if (tie_hit != nullptr) {
        *tie_hit = false;
    }
    if (s == n) {
        return x;
    }
    // Stable sort by decreasing magnitude keeps the lowest-index entry ahead
    // on ties, which makes the kept support deterministic.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&x](int a, int b) {
        return std::abs(x[a]) > std::abs(x[b]);
    });
    if (tie_hit != nullptr && std::abs(x[order[s - 1]]) == std::abs(x[order[s]])) {
        *tie_hit = true;
    }
    Vector out = Vector::Zero(n);
    for (int k = 0; k < s; ++k) {
        out[order[k]] = x[order[k]];
    }
    return out;
}

int numerical_rank(const Vector& singular_values, int rows, int cols) {
    if (singular_values.size() == 0) {
        return 0;
    }
    const double threshold =
        static_cast<double>(std::max(rows, cols)) * singular_values[0] * 1e-10;
    int rank = 0;
    for (int i = 0; i < singular_values.size(); ++i) {
        if (singular_values[i] > threshold) {
            ++rank;
        }
    }
    return rank;
}

int numerical_rank(const Matrix& A) {
    require_finite(A, "numerical_rank input");
    if (A.size() == 0) {
        return 0;
    }
    Eigen::BDCSVD<Matrix> svd(A);
    if (svd.info() != Eigen::Success) {
        throw NumericalError("SVD failed to converge");
    }
    return numerical_rank(svd.singularValues(), static_cast<int>(A.rows()),
                          static_cast<int>(A.cols()));
}

} // namespace apkit
