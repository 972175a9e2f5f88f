#include "apkit/mask.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace apkit {

void require_finite(const Matrix& A, const std::string& name) {
    if (!A.allFinite()) {
        throw std::invalid_argument(name + " contains NaN or infinite entries");
    }
}

void require_finite(const Vector& v, const std::string& name) {
    if (!v.allFinite()) {
        throw std::invalid_argument(name + " contains NaN or infinite entries");
    }
}

ObservationMask::ObservationMask(int rows, int cols,
                                 std::vector<std::pair<int, int>> known)
    : rows_(rows), cols_(cols), known_(std::move(known)) {
    if (rows_ <= 0 || cols_ <= 0) {
        throw std::invalid_argument("mask dimensions must be positive");
    }
    if (known_.empty()) {
        throw std::invalid_argument("mask must contain at least one observed position");
    }
    for (const auto& [i, j] : known_) {
        if (i < 0 || i >= rows_ || j < 0 || j >= cols_) {
            throw std::invalid_argument(
                "mask position (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                ") outside a " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                " matrix (positions are 1-based in files)");
        }
    }
    std::sort(known_.begin(), known_.end());
    if (std::adjacent_find(known_.begin(), known_.end()) != known_.end()) {
        throw std::invalid_argument("mask contains duplicate positions");
    }
    indicator_ = Matrix::Zero(rows_, cols_);
    for (const auto& [i, j] : known_) {
        indicator_(i, j) = 1.0;
    }
}

} // namespace apkit
