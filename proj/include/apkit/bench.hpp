#pragma once

#include "apkit/completion.hpp"
#include "apkit/io.hpp"
#include "apkit/sparse.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace apkit {

struct GeneratedProblem {
    Matrix truth;
    ObservationMask mask;
    // Observed count at or below the manifold dimension: recovery is
    // underdetermined and expected to fail. Surfaced so callers can warn.
    bool undersampled = false;
};

// truth = L R^T with n x r factors of i.i.d. U(0,1) entries; the mask is a
// uniform sample without replacement of ceil((1 - missing_rate) * n^2) cells.
// A pure function of (n, r, missing_rate, seed).
GeneratedProblem generate_problem(int n, int r, double missing_rate,
                                  std::uint64_t seed);

enum class CompletionInitKind { MaskFill, RankOnePursuit };

struct TableSpec {
    int n = 100;
    std::vector<int> ranks;
    std::vector<double> missing_rates;
    int trials = 20;
    std::uint64_t seed = 0;
    CompletionInitKind init = CompletionInitKind::RankOnePursuit;
    double tol = 1e-6;
    int max_iters = 5000;
};

// One row per (rank, missing_rate) pair: errors and wall time averaged over
// the trials. mce comes from the feasible iterate, are from the low-rank one.
struct TableRow {
    int rank = 0;
    double missing_rate = 0.0;
    double or_ratio = 0.0;
    double mce = 0.0;
    double are = 0.0;
    double time_s = 0.0;
    std::uint64_t seed = 0;
    int converged = 0;
    int trials = 0;
};

std::vector<TableRow> run_table(const TableSpec& spec);

enum class CompletionSuccess { MaxNorm, RelFro };

struct MaxRankSpec {
    int n = 100;
    std::vector<double> missing_rates;
    double success_tol = 1e-3;
    CompletionSuccess criterion = CompletionSuccess::MaxNorm;
    int trials = 10;
    CompletionInitKind init = CompletionInitKind::MaskFill;
    std::uint64_t seed = 0;
    double solver_tol = 1e-5;
    int max_iters = 5000;
};

// largest_rank = 0 means not even rank 1 was recovered in all trials.
struct MaxRankRow {
    double missing_rate = 0.0;
    int largest_rank = 0;
    int trials = 0;
    std::uint64_t seed = 0;
};

// For each missing rate, raise the rank from 1 and keep going while all
// trials recover the generated truth under the chosen criterion.
std::vector<MaxRankRow> max_rank_search(const MaxRankSpec& spec);

struct SparseFigureSpec {
    int n = 128;
    int N = 256;
    std::vector<int> s_values;
    int trials = 50;
    SparseEnsemble ensemble = SparseEnsemble::Gaussian;
    std::uint64_t seed = 0;
    double success_tol = 1e-3;
    SuccessCriterion success = SuccessCriterion::MaxNorm;
    SparseConfig solver;
};

// Frequency-of-recovery curve data; delegates to recovery_frequency.
std::vector<FrequencyRow> run_sparse_figure(const SparseFigureSpec& spec);

struct ImageJob {
    GrayImage input;
    double missing_rate = 0.5;
    int rank = 25;
    CompletionInitKind init = CompletionInitKind::RankOnePursuit;
    std::uint64_t seed = 0;
    double tol = 1e-6;
    int max_iters = 5000;
};

struct ImageResult {
    GrayImage masked;     // observed pixels kept, missing ones black
    GrayImage recovered;
    double rmse = 0.0;    // on the [0,1] scale, before requantization
};

// Scale pixels to [0,1], drop a seeded random pixel set, complete at the
// given rank, clamp and requantize.
ImageResult image_recover(const ImageJob& job);

// Quantized n x n rank-r test image (U(0,1) factors, normalized to [0,255]);
// stands in for photographic fixtures.
GrayImage synthetic_low_rank_image(int n, int r, std::uint64_t seed);

void write_table_csv(const std::string& path, const std::vector<TableRow>& rows);
void write_maxrank_csv(const std::string& path, const std::vector<MaxRankRow>& rows);

} // namespace apkit
