#include "apkit/affine.hpp"

#include <string>
#include <utility>

namespace apkit {

AffineSolver::AffineSolver(Matrix A) : A_(std::move(A)) {
    require_finite(A_, "affine system matrix");
    if (A_.rows() == 0 || A_.cols() == 0) {
        throw std::invalid_argument("affine system matrix is empty");
    }
    if (A_.rows() > A_.cols()) {
        throw std::invalid_argument("affine system must be underdetermined (rows <= cols)");
    }
    const Matrix gram = A_ * A_.transpose();
    llt_.compute(gram);
    // A A^T is singular exactly when A is row-rank deficient, but a Cholesky
    // factorization of a numerically singular Gram matrix can still complete
    // with a spuriously small pivot around sqrt(machine eps) * scale. The
    // pivot check below therefore rejects anything with an effective row
    // condition number beyond ~1e7, which is far past every sensible use of
    // this projection.
    const double scale = gram.diagonal().maxCoeff();
    if (llt_.info() != Eigen::Success || !llt_.matrixLLT().allFinite() ||
        llt_.matrixLLT().diagonal().minCoeff() <= std::sqrt(scale) * 1e-7) {
        throw std::invalid_argument(
            "affine system matrix is row-rank deficient; projections onto {x : Ax = b} "
            "need full row rank");
    }
}

Vector AffineSolver::project(const Vector& y, const Vector& b) const {
    if (y.size() != A_.cols() || b.size() != A_.rows()) {
        throw std::invalid_argument("affine projection dimensions disagree");
    }
    return y + A_.transpose() * llt_.solve(b - A_ * y);
}

Vector AffineSolver::min_norm_solution(const Vector& b) const {
    if (b.size() != A_.rows()) {
        throw std::invalid_argument("right-hand side length disagrees with the system");
    }
    return A_.transpose() * llt_.solve(b);
}

Vector AffineSolver::project_nullspace(const Vector& v) const {
    if (v.size() != A_.cols()) {
        throw std::invalid_argument("vector length disagrees with the system");
    }
    return v - A_.transpose() * llt_.solve(A_ * v);
}

Vector project_affine_linear(const Vector& y, const Matrix& A, const Vector& b,
                             const AffineSolver& solver) {
    if (A.rows() != solver.A().rows() || A.cols() != solver.A().cols() ||
        A != solver.A()) {
        throw std::invalid_argument("solver was built from a different system matrix");
    }
    return solver.project(y, b);
}

} // namespace apkit
