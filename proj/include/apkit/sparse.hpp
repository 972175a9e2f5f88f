#pragma once

#include "apkit/affine.hpp"
#include "apkit/linalg.hpp"

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace apkit {

// An instance of exact sparse recovery: find an s-sparse x with A x = b.
// Construction validates shapes, finiteness, 1 <= s < N, n < N and full row
// rank of A (via the cached affine solver, built once).
class SparseProblem {
public:
    SparseProblem(Matrix A, Vector b, int s);

    const Matrix& A() const { return solver_.A(); }
    const Vector& b() const { return b_; }
    int s() const { return s_; }
    int measurements() const { return solver_.measurements(); }
    int ambient_dim() const { return solver_.ambient_dim(); }
    const AffineSolver& solver() const { return solver_; }

private:
    AffineSolver solver_;
    Vector b_;
    int s_;
};

// x0 = A^T (A A^T)^{-1} b, the canonical feasible point.
struct MinNormInit {};
// Caller-supplied start (projected to feasibility before iterating).
struct CustomSparseInit {
    Vector x0;
};
// Minimum-norm point plus a seeded Gaussian null-space component: a
// reproducible "random vector in the affine space".
struct SeededRandomFeasibleInit {
    std::uint64_t seed = 0;
};
using SparseInit = std::variant<MinNormInit, CustomSparseInit, SeededRandomFeasibleInit>;

struct SparseConfig {
    double tol = 1e-6;
    int max_iters = 10000;
    SparseInit init = MinNormInit{};
    // The stopping rule checks that the N - s smallest magnitudes are below
    // tol; this additionally requires the step norm to be below tol.
    bool also_step_tol = false;
    bool record_trace = false;
};

struct SparseTrace {
    std::vector<double> step_norm;      // ||x_{k+1} - x_k||
    std::vector<double> gap_norm;       // ||x_k - y_k||, nonincreasing
    std::vector<char> support_changed;  // thresholded support moved this iteration
    std::size_t size() const { return step_norm.size(); }
};

struct SparseResult {
    Vector x;  // always the last affine projection, so A x = b holds
    int iters = 0;
    bool converged = false;    // the N - s smallest magnitudes fell below tol
    std::vector<int> support;  // indices of the s largest magnitudes, ascending
    bool tie_flag = false;     // some thresholding step hit a magnitude tie
    std::optional<SparseTrace> trace;
};

// Alternate hard thresholding and affine projection from a feasible start.
SparseResult ap_sparse(const SparseProblem& problem, const SparseConfig& config);

// True iff no nonzero vector with at most s nonzeros lies in Null(A),
// i.e. every n x s column submatrix of A has rank s. Exhaustive over all
// C(N, s) supports; refuses (std::invalid_argument) when N > 24 or
// C(N, s) > 2e6 and points to the sampled variant.
bool check_null_intersection(const Matrix& A, int s);

// Randomized one-sided variant for instances beyond the exhaustive budget:
// false is definitive (a dependent support was found), true only means no
// dependent support showed up among `samples` random draws.
bool check_null_intersection_sampled(const Matrix& A, int s, int samples = 10000,
                                     std::uint64_t seed = 0);

// True iff the s-th and (s+1)-th largest magnitudes of x differ strictly, so
// the nearest s-sparse point is unique.
bool check_projection_uniqueness(const Vector& x, int s);

enum class SparseEnsemble { Gaussian, Uniform };
enum class SuccessCriterion { MaxNorm, RelL2 };

struct FrequencyRow {
    int s = 0;
    int successes = 0;
    int trials = 0;
    double frequency = 0.0;
};

// Monte Carlo recovery frequency: for each sparsity s, draw `trials` fresh
// (A, x_true) pairs from the ensemble, solve from the measurements alone and
// count successes against the chosen criterion at tolerance `tol`. Each trial
// derives its own stream from (seed, s, trial), so rows do not depend on the
// composition or order of s_values.
std::vector<FrequencyRow> recovery_frequency(
    int n, int N, const std::vector<int>& s_values, int trials,
    SparseEnsemble ensemble, std::uint64_t seed, double tol,
    SuccessCriterion criterion = SuccessCriterion::MaxNorm,
    const SparseConfig& solver_config = {});

} // namespace apkit
