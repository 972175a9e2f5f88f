#pragma once

#include "apkit/linalg.hpp"

#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace apkit {

// Start from the observed entries with zeros elsewhere.
struct MaskFillInit {};
// Warm start from the greedy rank-one pursuit; steps == 0 means "use the
// guess rank".
struct RankOnePursuitInit {
    int steps = 0;
};
// Caller-supplied starting matrix.
struct CustomInit {
    Matrix X0;
};
using CompletionInit = std::variant<MaskFillInit, RankOnePursuitInit, CustomInit>;

struct CompletionConfig {
    int guess_rank = 1;
    double tol = 1e-6;  // stop when ||X_{k+1} - X_k||_F < tol
    int max_iters = 5000;
    CompletionInit init = MaskFillInit{};
    bool record_trace = false;
    // When set, per-iteration errors against this matrix are recorded in the
    // trace. The solver itself never reads it.
    std::optional<Matrix> truth;
};

// Row k describes the transition X_k -> Y_k -> X_{k+1}. The initial matrix is
// projected onto the data-consistency set before iterating, so every X_k
// matches the observed entries and the recorded identities (monotone gap,
// per-step Pythagoras, step = off-mask gap) hold from row 0 for any init.
struct CompletionTrace {
    std::vector<double> step_norm;    // ||X_{k+1} - X_k||_F
    std::vector<double> gap_norm;     // ||X_k - Y_k||_F
    std::vector<double> offmask_gap;  // ||(X_k - Y_k) off Omega||_F
    // ||X_{k+1} - Y_k||_F measured directly inside the loop; kept out of the
    // CSV schema but stored so the Pythagoras identity can be checked against
    // an independently measured quantity.
    std::vector<double> post_gap;
    std::vector<double> truth_mce;  // empty unless truth was supplied
    std::vector<double> truth_fro;
    std::size_t size() const { return step_norm.size(); }
};

struct CompletionResult {
    Matrix X_star;  // feasible iterate: matches observed entries exactly
    Matrix Y_star;  // rank <= guess_rank iterate
    int iters = 0;
    bool converged = false;
    // Geometric rate fitted on the recorded step norms (needs a trace with
    // enough decaying points); a value < 1 indicates linear convergence of
    // the iteration itself. ||X_star - Y_star||_F staying large signals the
    // guess rank is too small.
    std::optional<double> estimated_rate;
    std::optional<CompletionTrace> trace;
};

// Alternate SVD truncation and observed-entry replacement until the step norm
// drops below tol or max_iters is reached. Off-mask entries of `observed` are
// ignored. Non-convergence is reported through the flag, not an exception.
CompletionResult ap_complete(const Matrix& observed, const ObservationMask& mask,
                             const CompletionConfig& config);

// Greedy rank-one pursuit: r rounds of (top singular pair of the masked
// residual, append the rank-one basis element, refit all weights by least
// squares on the observed entries). The observed-entry residual is
// nonincreasing over rounds.
Matrix rank_one_pursuit_init(const Matrix& observed, const ObservationMask& mask,
                             int r);

// Least-squares slope of log(error) over the tail of a positive sequence:
// entries <= 1e-13 are dropped as numerical zeros, at least 10 points must
// survive, and the last max(10, ceil(len/3)) of them are fitted. Returns
// c = exp(slope) > 0; c < 1 means geometric decay.
double fit_geometric_rate(const std::vector<double>& errors);

// fit_geometric_rate applied to truth_errors when nonempty, otherwise to the
// trace's step norms.
double estimate_rate(const CompletionTrace& trace,
                     const std::vector<double>& truth_errors);

struct MetricsRecord {
    double mce = 0.0;          // max entrywise deviation from truth
    double are = 0.0;          // relative Frobenius error on the observed entries
    double or_ratio = 0.0;     // observed count / manifold dimension
    double missing_rate = 0.0;
    double rel_fro = 0.0;      // ||X - truth||_F / ||truth||_F
};

// Error metrics of X against a square ground truth. Note the feasible iterate
// X_star matches the data on Omega by construction, so its `are` is zero by
// definition; evaluate `are` on the low-rank iterate Y_star instead.
MetricsRecord completion_metrics(const Matrix& X, const Matrix& truth,
                                 const ObservationMask& mask, int r);

// (||Y (X - Y)^T||_F, ||Y^T (X - Y)||_F): both vanish at a limit pair of the
// alternating iteration, so large values flag a spurious stop.
std::pair<double, double> fixed_point_residuals(const Matrix& X_star,
                                                const Matrix& Y_star);

} // namespace apkit
