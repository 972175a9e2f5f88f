#pragma once

#include "apkit/matrix.hpp"

#include <Eigen/Cholesky>

namespace apkit {

// Projection machinery for the affine set {x : Ax = b} with A short and fat.
// Full row rank is validated once at construction and the Cholesky factor of
// A A^T is cached, so repeated projections inside an iteration cost two
// triangular solves and two mat-vecs.
class AffineSolver {
public:
    explicit AffineSolver(Matrix A);

    const Matrix& A() const { return A_; }
    int measurements() const { return static_cast<int>(A_.rows()); }
    int ambient_dim() const { return static_cast<int>(A_.cols()); }

    // Euclidean-nearest feasible point: y + A^T (A A^T)^{-1} (b - A y).
    Vector project(const Vector& y, const Vector& b) const;

    // project applied to the origin: the minimum-norm solution of Ax = b.
    Vector min_norm_solution(const Vector& b) const;

    // Orthogonal projection onto Null(A); used to sample feasible points.
    Vector project_nullspace(const Vector& v) const;

private:
    Matrix A_;
    Eigen::LLT<Matrix> llt_;
};

// Free-function form of AffineSolver::project. A must be the matrix the solver
// was built from (checked); the explicit parameter keeps call sites readable.
Vector project_affine_linear(const Vector& y, const Matrix& A, const Vector& b,
                             const AffineSolver& solver);

} // namespace apkit
