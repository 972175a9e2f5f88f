#include "apkit/tangent.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <string>
#include <utility>

namespace apkit {

namespace {

constexpr int kMaxTangentSize = 64;

void require_square(const Matrix& M, const char* where) {
    if (M.rows() != M.cols()) {
        throw std::invalid_argument(std::string(where) + " needs a square matrix");
    }
}

// Validates that M has numerical rank r and returns its SVD for reuse.
Eigen::BDCSVD<Matrix> checked_rank_svd(const Matrix& M, int r, const char* where) {
    require_finite(M, where);
    const int k = static_cast<int>(std::min(M.rows(), M.cols()));
    if (r < 1 || r > k) {
        throw std::invalid_argument(std::string(where) + ": rank " + std::to_string(r) +
                                    " outside [1, " + std::to_string(k) + "]");
    }
    Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        throw NumericalError("SVD failed to converge");
    }
    const int actual = numerical_rank(svd.singularValues(),
                                      static_cast<int>(M.rows()),
                                      static_cast<int>(M.cols()));
    if (actual != r) {
        throw std::invalid_argument(
            std::string(where) + ": declared rank " + std::to_string(r) +
            " but the matrix has numerical rank " + std::to_string(actual) +
            " (for data rounded from a rank-" + std::to_string(r) +
            " matrix, truncate first; the diagnose subcommand offers --lift)");
    }
    return svd;
}

} // namespace

TangentMatrix build_tangent_matrix(const Matrix& M) {
    require_finite(M, "tangent matrix input");
    require_square(M, "build_tangent_matrix");
    const int n = static_cast<int>(M.rows());
    if (n > kMaxTangentSize) {
        throw std::invalid_argument(
            "dense tangent matrix supports n <= " + std::to_string(kMaxTangentSize) +
            " (memory grows as 2n^4); use build_v_omega for larger problems");
    }
    TangentMatrix T;
    T.n = n;
    T.data = Matrix::Zero(n * n, 2 * n * n);
    T.row_index.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int row = i * n + j;
            T.row_index.emplace_back(i, j);
            // Entry (i, j) of X M + M Y is <row i of X, column j of M> plus
            // <row i of M, column j of Y>; with rows of X and columns of Y
            // stacked as the parameter vector, that makes column j of M the
            // i-th block and row i of M the (n + j)-th block.
            T.data.block(row, i * n, 1, n) = M.col(j).transpose();
            T.data.block(row, (n + j) * n, 1, n) = M.row(i);
        }
    }
    return T;
}

std::pair<Matrix, Matrix> select_rows(const TangentMatrix& T,
                                      const ObservationMask& mask) {
    if (mask.rows() != T.n || mask.cols() != T.n) {
        throw std::invalid_argument("mask dimensions disagree with the tangent matrix");
    }
    const int n = T.n;
    const int m = mask.count();
    Matrix observed(m, 2 * n * n);
    Matrix unobserved(n * n - m, 2 * n * n);
    int oi = 0;
    int ui = 0;
    for (int row = 0; row < n * n; ++row) {
        const auto& [i, j] = T.row_index[static_cast<std::size_t>(row)];
        if (mask.contains(i, j)) {
            observed.row(oi++) = T.data.row(row);
        } else {
            unobserved.row(ui++) = T.data.row(row);
        }
    }
    return {std::move(observed), std::move(unobserved)};
}

Matrix build_v_omega(const Matrix& M, const ObservationMask& mask) {
    require_finite(M, "certificate input");
    require_square(M, "build_v_omega");
    if (mask.rows() != M.rows() || mask.cols() != M.cols()) {
        throw std::invalid_argument("mask dimensions disagree with the matrix");
    }
    const auto& known = mask.known();
    const int m = mask.count();
    // Gram matrix of the selected tangent rows: the row for (i1, j1) meets the
    // row for (i2, j2) only where their blocks overlap, which collapses to the
    // four cases below.
    Matrix V(m, m);
    for (int a = 0; a < m; ++a) {
        const auto& [i1, j1] = known[static_cast<std::size_t>(a)];
        for (int b = a; b < m; ++b) {
            const auto& [i2, j2] = known[static_cast<std::size_t>(b)];
            double value = 0.0;
            if (i1 == i2 && j1 == j2) {
                value = M.row(i1).squaredNorm() + M.col(j1).squaredNorm();
            } else if (i1 == i2) {
                value = M.col(j1).dot(M.col(j2));
            } else if (j1 == j2) {
                value = M.row(i1).dot(M.row(i2));
            }
            V(a, b) = value;
            V(b, a) = value;
        }
    }
    return V;
}

TransversalityReport transversality_report(const Matrix& M,
                                           const ObservationMask& mask, int r) {
    require_square(M, "transversality_report");
    if (mask.rows() != M.rows() || mask.cols() != M.cols()) {
        throw std::invalid_argument("mask dimensions disagree with the matrix");
    }
    auto svd = checked_rank_svd(M, r, "transversality_report");
    const int n = static_cast<int>(M.rows());

    // Work at the rank-r truncation: identical to M up to the sub-threshold
    // singular tail, and it keeps that tail out of the rank decisions below.
    const Matrix Mr = svd.matrixU().leftCols(r) *
                      svd.singularValues().head(r).asDiagonal() *
                      svd.matrixV().leftCols(r).transpose();

    TransversalityReport report;
    report.n = n;
    report.r = r;
    report.m = mask.count();
    report.dim_manifold = 2 * n * r - r * r;

    const TangentMatrix T = build_tangent_matrix(Mr);
    auto [T_obs, T_unobs] = select_rows(T, mask);

    Eigen::BDCSVD<Matrix> obs_svd(T_obs, Eigen::ComputeThinV);
    if (obs_svd.info() != Eigen::Success) {
        throw NumericalError("SVD failed to converge");
    }
    report.rank_T_omega = numerical_rank(obs_svd.singularValues(),
                                         static_cast<int>(T_obs.rows()),
                                         static_cast<int>(T_obs.cols()));
    report.rank_V_omega = numerical_rank(build_v_omega(Mr, mask));
    report.certified_linear = (report.rank_T_omega == report.dim_manifold);

    if (T_unobs.rows() == 0) {
        // Full observation: nothing to include, nothing to intersect.
        report.rowspace_inclusion_holds = true;
        report.intersection_trivial = true;
        return report;
    }

    // Row-space inclusion: appending the unobserved rows must not raise the rank.
    Matrix stacked(T_obs.rows() + T_unobs.rows(), T_obs.cols());
    stacked << T_obs, T_unobs;
    report.rowspace_inclusion_holds =
        (numerical_rank(stacked) == report.rank_T_omega);

    // Trivial intersection: null(T_obs) is annihilated by T_unobs exactly when
    // every unobserved row lies in the observed row space, i.e. projecting the
    // unobserved rows off that row space leaves nothing. Evaluated through the
    // projection residual (not a rank comparison), so it stays an independent
    // computation from the inclusion test above.
    const Matrix row_basis = obs_svd.matrixV().leftCols(report.rank_T_omega);
    const double scale = obs_svd.singularValues().size() > 0
                             ? obs_svd.singularValues()[0]
                             : 0.0;
    const double residual =
        (T_unobs - (T_unobs * row_basis) * row_basis.transpose())
            .cwiseAbs()
            .maxCoeff();
    report.intersection_trivial = residual <= 2.0 * n * n * scale * 1e-10;
    return report;
}

Matrix tangent_projection(const Matrix& M, const Matrix& Y, int r) {
    require_square(M, "tangent_projection");
    if (Y.rows() != M.rows() || Y.cols() != M.cols()) {
        throw std::invalid_argument("direction dimensions disagree with the base point");
    }
    require_finite(Y, "tangent_projection direction");
    auto svd = checked_rank_svd(M, r, "tangent_projection");
    const Matrix U = svd.matrixU().leftCols(r);
    const Matrix V = svd.matrixV().leftCols(r);
    const Matrix UtY = U.transpose() * Y;   // r x n pieces keep this O(n^2 r)
    const Matrix YV = Y * V;
    return U * UtY + YV * V.transpose() - U * (UtY * V) * V.transpose();
}

Matrix svd_truncation_differential(const Matrix& X, const Matrix& Y, int r) {
    require_finite(X, "differential base point");
    require_finite(Y, "differential direction");
    if (Y.rows() != X.rows() || Y.cols() != X.cols()) {
        throw std::invalid_argument("direction dimensions disagree with the base point");
    }
    const int k = static_cast<int>(std::min(X.rows(), X.cols()));
    if (r < 1 || r > k) {
        throw std::invalid_argument("truncation rank outside range");
    }
    Eigen::JacobiSVD<Matrix> svd(X, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success) {
        throw NumericalError("SVD failed to converge");
    }
    const Vector& sigma = svd.singularValues();
    if (r < k) {
        const double gap = sigma[r - 1] - sigma[r];
        if (!(gap >= 1e-8 * sigma[0])) {
            throw std::invalid_argument(
                "singular gap sigma_r - sigma_{r+1} below 1e-8 * sigma_1; the truncation "
                "operator is not differentiable near a tie");
        }
    }
    const Matrix& U = svd.matrixU();
    const Matrix& V = svd.matrixV();

    // Tangent part at the truncated point.
    const Matrix Ur = U.leftCols(r);
    const Matrix Vr = V.leftCols(r);
    const Matrix UtY = Ur.transpose() * Y;
    const Matrix YV = Y * Vr;
    Matrix D = Ur * UtY + YV * Vr.transpose() - Ur * (UtY * Vr) * Vr.transpose();

    // Curvature correction: for each kept/discarded index pair (i, j') the
    // symmetric and antisymmetric principal directions contribute with
    // weights sigma_{j'} / (sigma_i -+ sigma_{j'}).
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < r; ++i) {
        for (int jp = r; jp < k; ++jp) {
            if (sigma[jp] == 0.0) {
                continue;  // zero weight either way
            }
            const Matrix cross = U.col(jp) * V.col(i).transpose();
            const Matrix direct = U.col(i) * V.col(jp).transpose();
            const Matrix phi_plus = (cross + direct) * inv_sqrt2;
            const Matrix phi_minus = (cross - direct) * inv_sqrt2;
            const double w_plus = sigma[jp] / (sigma[i] - sigma[jp]);
            const double w_minus = sigma[jp] / (sigma[i] + sigma[jp]);
            D += w_plus * phi_plus.cwiseProduct(Y).sum() * phi_plus;
            D -= w_minus * phi_minus.cwiseProduct(Y).sum() * phi_minus;
        }
    }
    return D;
}

} // namespace apkit
