#pragma once

#include "apkit/matrix.hpp"

#include <utility>
#include <vector>

namespace apkit {

// The set Omega of observed positions in a rows x cols matrix. Stored 0-based
// and sorted lexicographically; duplicates and out-of-range pairs are
// rejected. File formats are 1-based and converted by the io readers.
class ObservationMask {
public:
    ObservationMask(int rows, int cols, std::vector<std::pair<int, int>> known);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int count() const { return static_cast<int>(known_.size()); }
    bool full() const { return count() == rows_ * cols_; }
    bool contains(int i, int j) const { return indicator_(i, j) != 0.0; }

    // Lexicographic list of observed positions; fixes the row order of every
    // Omega-indexed object built elsewhere (selected tangent rows, the Gram
    // certificate matrix, least-squares systems).
    const std::vector<std::pair<int, int>>& known() const { return known_; }

    // 0/1 matrix with ones at observed positions, for vectorized masking.
    const Matrix& indicator() const { return indicator_; }

private:
    int rows_;
    int cols_;
    std::vector<std::pair<int, int>> known_;
    Matrix indicator_;
};

} // namespace apkit
