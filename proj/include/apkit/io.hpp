#pragma once

#include "apkit/completion.hpp"
#include "apkit/mask.hpp"
#include "apkit/sparse.hpp"

#include <string>
#include <vector>

namespace apkit {

// All file-format problems (unreadable, malformed, ragged rows, out-of-range
// indices) raise std::invalid_argument with the path in the message.

// Plain decimal CSV, one matrix row per line, comma-separated.
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& A);

// One real per line.
Vector read_vector_file(const std::string& path);
void write_vector_file(const std::string& path, const Vector& v);

// One "i,j" pair per line, 1-based in the file, converted to the 0-based
// internal convention. Dimensions come from the matrix the mask belongs to.
ObservationMask read_mask_file(const std::string& path, int rows, int cols);
void write_mask_file(const std::string& path, const ObservationMask& mask);

// Columns: k, step_norm, gap_norm, offmask_gap, truth_mce, truth_fro. The
// truth columns are left empty when no ground truth was recorded.
void write_trace_csv(const std::string& path, const CompletionTrace& trace);

// Columns: s, successes, trials, frequency.
void write_frequency_csv(const std::string& path,
                         const std::vector<FrequencyRow>& rows);

// Grayscale image, row-major pixels in [0, maxval], maxval <= 255.
struct GrayImage {
    int width = 0;
    int height = 0;
    int maxval = 255;
    std::vector<int> pixels;
};

// Reads P2 (ASCII) and P5 (binary) PGM; writes P5.
GrayImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const GrayImage& image);

// Shortest decimal representation (15 to 17 significant digits) that parses
// back to the same double; every numeric CSV cell goes through this so files
// are lossless and reruns are byte-comparable.
std::string format_real(double v);

} // namespace apkit
