#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace apkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Raised when a factorization or an iterative routine breaks down numerically.
// Invalid inputs (bad dimensions, NaNs, out-of-range parameters) raise
// std::invalid_argument instead; the CLI maps the two to different exit codes.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Reject NaN/Inf payloads at API boundaries.
void require_finite(const Matrix& A, const std::string& name);
void require_finite(const Vector& v, const std::string& name);

} // namespace apkit
