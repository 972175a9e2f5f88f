#include "apkit/sparse.hpp"

#include "apkit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace apkit {

namespace {

std::vector<int> top_support(const Vector& x, int s) {
    std::vector<int> order(static_cast<std::size_t>(x.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&x](int a, int b) {
        return std::abs(x[a]) > std::abs(x[b]);
    });
    order.resize(static_cast<std::size_t>(s));
    std::sort(order.begin(), order.end());
    return order;
}

// Largest magnitude outside the s biggest entries; 0 when s covers everything.
double tail_magnitude(const Vector& x, int s) {
    const int n = static_cast<int>(x.size());
    if (s >= n) {
        return 0.0;
    }
    Vector mags = x.cwiseAbs();
    std::nth_element(mags.data(), mags.data() + (n - s - 1), mags.data() + n);
    return mags[n - s - 1];
}

double binomial_approx(int n, int k) {
    double v = 1.0;
    for (int i = 0; i < k; ++i) {
        v *= static_cast<double>(n - i) / static_cast<double>(i + 1);
        if (v > 1e18) {
            return v;  // far past any budget; precision no longer matters
        }
    }
    return v;
}

// Visit supports in lexicographic order; f returns false to stop early.
template <typename F>
void for_each_support(int N, int s, F&& f) {
    std::vector<int> idx(static_cast<std::size_t>(s));
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        if (!f(idx)) {
            return;
        }
        int pos = s - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == N - s + pos) {
            --pos;
        }
        if (pos < 0) {
            return;
        }
        ++idx[static_cast<std::size_t>(pos)];
        for (int t = pos + 1; t < s; ++t) {
            idx[static_cast<std::size_t>(t)] = idx[static_cast<std::size_t>(t - 1)] + 1;
        }
    }
}

bool support_has_full_rank(const Matrix& A, const std::vector<int>& support) {
    Matrix sub(A.rows(), static_cast<int>(support.size()));
    for (std::size_t c = 0; c < support.size(); ++c) {
        sub.col(static_cast<int>(c)) = A.col(support[c]);
    }
    return numerical_rank(sub) == static_cast<int>(support.size());
}

} // namespace

SparseProblem::SparseProblem(Matrix A, Vector b, int s)
    : solver_(std::move(A)), b_(std::move(b)), s_(s) {
    require_finite(b_, "measurement vector");
    if (b_.size() != solver_.measurements()) {
        throw std::invalid_argument("measurement length disagrees with the matrix");
    }
    if (solver_.measurements() >= solver_.ambient_dim()) {
        throw std::invalid_argument(
            "sparse recovery expects an underdetermined system (n < N)");
    }
    if (s_ < 1 || s_ >= solver_.ambient_dim()) {
        throw std::invalid_argument("sparsity must satisfy 1 <= s < N");
    }
}

SparseResult ap_sparse(const SparseProblem& problem, const SparseConfig& config) {
    if (!(config.tol > 0.0)) {
        throw std::invalid_argument("tolerance must be positive");
    }
    if (config.max_iters < 1) {
        throw std::invalid_argument("iteration budget must be positive");
    }
    const AffineSolver& solver = problem.solver();
    const Vector& b = problem.b();
    const int s = problem.s();

    Vector x;
    if (std::holds_alternative<MinNormInit>(config.init)) {
        x = solver.min_norm_solution(b);
    } else if (const auto* custom = std::get_if<CustomSparseInit>(&config.init)) {
        if (custom->x0.size() != problem.ambient_dim()) {
            throw std::invalid_argument("custom initial vector has the wrong length");
        }
        require_finite(custom->x0, "custom initial vector");
        x = solver.project(custom->x0, b);
    } else {
        const auto& seeded = std::get<SeededRandomFeasibleInit>(config.init);
        auto engine = seeded_engine(derive_seed(seeded.seed, 0x5eedfea5));
        std::normal_distribution<double> gauss(0.0, 1.0);
        Vector noise(problem.ambient_dim());
        for (int i = 0; i < noise.size(); ++i) {
            noise[i] = gauss(engine);
        }
        x = solver.min_norm_solution(b) + solver.project_nullspace(noise);
    }

    SparseResult result;
    SparseTrace trace;
    std::vector<int> prev_support;
    for (int k = 0; k < config.max_iters; ++k) {
        bool tie = false;
        const Vector y = hard_threshold(x, s, &tie);
        result.tie_flag = result.tie_flag || tie;
        Vector x_next = solver.project(y, b);
        const double step = (x_next - x).norm();
        if (config.record_trace) {
            trace.step_norm.push_back(step);
            trace.gap_norm.push_back((x - y).norm());
            std::vector<int> support_now = top_support(y, s);
            trace.support_changed.push_back(
                static_cast<char>(k > 0 && support_now != prev_support));
            prev_support = std::move(support_now);
        }
        x = std::move(x_next);
        result.iters = k + 1;
        if (tail_magnitude(x, s) < config.tol &&
            (!config.also_step_tol || step < config.tol)) {
            result.converged = true;
            break;
        }
    }
    result.support = top_support(x, s);
    result.x = std::move(x);
    if (config.record_trace) {
        result.trace = std::move(trace);
    }
    return result;
}

bool check_null_intersection(const Matrix& A, int s) {
    require_finite(A, "sensing matrix");
    const int n = static_cast<int>(A.rows());
    const int N = static_cast<int>(A.cols());
    if (s < 1 || s > N) {
        throw std::invalid_argument("sparsity must satisfy 1 <= s <= N");
    }
    if (s > n) {
        return false;  // any s columns live in an n-dimensional space
    }
    if (N > 24 || binomial_approx(N, s) > 2e6) {
        throw std::invalid_argument(
            "exhaustive support enumeration refused (N > 24 or C(N, s) > 2e6); "
            "use check_null_intersection_sampled for a probabilistic answer");
    }
    bool all_independent = true;
    for_each_support(N, s, [&](const std::vector<int>& support) {
        if (!support_has_full_rank(A, support)) {
            all_independent = false;
            return false;
        }
        return true;
    });
    return all_independent;
}

bool check_null_intersection_sampled(const Matrix& A, int s, int samples,
                                     std::uint64_t seed) {
    require_finite(A, "sensing matrix");
    const int n = static_cast<int>(A.rows());
    const int N = static_cast<int>(A.cols());
    if (s < 1 || s > N) {
        throw std::invalid_argument("sparsity must satisfy 1 <= s <= N");
    }
    if (samples < 1) {
        throw std::invalid_argument("sample budget must be positive");
    }
    if (s > n) {
        return false;
    }
    auto engine = seeded_engine(derive_seed(seed, 0x5a3b1e));
    std::vector<int> pool(static_cast<std::size_t>(N));
    for (int t = 0; t < samples; ++t) {
        std::iota(pool.begin(), pool.end(), 0);
        // Partial Fisher-Yates: the first s entries become a uniform support.
        for (int k = 0; k < s; ++k) {
            std::uniform_int_distribution<int> pick(k, N - 1);
            std::swap(pool[static_cast<std::size_t>(k)],
                      pool[static_cast<std::size_t>(pick(engine))]);
        }
        std::vector<int> support(pool.begin(), pool.begin() + s);
        if (!support_has_full_rank(A, support)) {
            return false;
        }
    }
    return true;
}

bool check_projection_uniqueness(const Vector& x, int s) {
    require_finite(x, "vector");
    const int n = static_cast<int>(x.size());
    if (s < 1 || s >= n) {
        throw std::invalid_argument("sparsity must satisfy 1 <= s < length");
    }
    Vector mags = x.cwiseAbs();
    std::nth_element(mags.data(), mags.data() + (s - 1), mags.data() + n,
                     std::greater<double>());
    const double at_s = mags[s - 1];
    std::nth_element(mags.data(), mags.data() + s, mags.data() + n,
                     std::greater<double>());
    return at_s > mags[s];
}

std::vector<FrequencyRow> recovery_frequency(
    int n, int N, const std::vector<int>& s_values, int trials,
    SparseEnsemble ensemble, std::uint64_t seed, double tol,
    SuccessCriterion criterion, const SparseConfig& solver_config) {
    if (n < 1 || N <= n) {
        throw std::invalid_argument("ensemble needs 1 <= n < N");
    }
    if (trials < 1) {
        throw std::invalid_argument("at least one trial required");
    }
    if (!(tol > 0.0)) {
        throw std::invalid_argument("success tolerance must be positive");
    }
    std::vector<FrequencyRow> rows;
    rows.reserve(s_values.size());
    for (int s : s_values) {
        if (s < 1 || s >= N) {
            throw std::invalid_argument("sparsity values must satisfy 1 <= s < N");
        }
        FrequencyRow row;
        row.s = s;
        row.trials = trials;
        for (int trial = 0; trial < trials; ++trial) {
            auto engine = seeded_engine(
                derive_seed(seed, static_cast<std::uint64_t>(s),
                            static_cast<std::uint64_t>(trial)));
            std::normal_distribution<double> gauss(0.0, 1.0);
            std::uniform_real_distribution<double> uniform(0.0, 1.0);
            Matrix A(n, N);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < N; ++j) {
                    A(i, j) = ensemble == SparseEnsemble::Gaussian ? gauss(engine)
                                                                   : uniform(engine);
                }
            }
            // Uniform support via partial Fisher-Yates, Gaussian amplitudes.
            std::vector<int> pool(static_cast<std::size_t>(N));
            std::iota(pool.begin(), pool.end(), 0);
            for (int k = 0; k < s; ++k) {
                std::uniform_int_distribution<int> pick(k, N - 1);
                std::swap(pool[static_cast<std::size_t>(k)],
                          pool[static_cast<std::size_t>(pick(engine))]);
            }
            Vector x_true = Vector::Zero(N);
            for (int k = 0; k < s; ++k) {
                x_true[pool[static_cast<std::size_t>(k)]] = gauss(engine);
            }
            const Vector b = A * x_true;
            SparseProblem problem(std::move(A), b, s);
            const SparseResult sol = ap_sparse(problem, solver_config);
            bool success = false;
            if (criterion == SuccessCriterion::MaxNorm) {
                success = (sol.x - x_true).cwiseAbs().maxCoeff() < tol;
            } else {
                const double denom = x_true.norm();
                success = denom > 0.0 && (sol.x - x_true).norm() / denom < tol;
            }
            if (success) {
                ++row.successes;
            }
        }
        row.frequency = static_cast<double>(row.successes) / trials;
        rows.push_back(row);
    }
    return rows;
}

} // namespace apkit
