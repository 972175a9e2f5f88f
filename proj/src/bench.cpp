#include "apkit/bench.hpp"

#include "apkit/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace apkit {

namespace {

std::uint64_t rate_tag(double missing_rate) {
    // Stable per-value tag so a row's trials do not depend on list position.
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(missing_rate));
    std::memcpy(&bits, &missing_rate, sizeof(bits));
    return bits;
}

CompletionInit make_init(CompletionInitKind kind) {
    if (kind == CompletionInitKind::RankOnePursuit) {
        return RankOnePursuitInit{};
    }
    return MaskFillInit{};
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

} // namespace

GeneratedProblem generate_problem(int n, int r, double missing_rate,
                                  std::uint64_t seed) {
    if (n < 1 || r < 1 || r > n) {
        throw std::invalid_argument("problem generator needs 1 <= r <= n");
    }
    if (!(missing_rate >= 0.0 && missing_rate < 1.0)) {
        throw std::invalid_argument("missing rate must lie in [0, 1)");
    }
    auto engine = seeded_engine(derive_seed(seed, 0x9e11e7a7));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Matrix L(n, r);
    Matrix R(n, r);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < r; ++j) {
            L(i, j) = uniform(engine);
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < r; ++j) {
            R(i, j) = uniform(engine);
        }
    }
    const int total = n * n;
    const int known_count = static_cast<int>(
        std::ceil((1.0 - missing_rate) * static_cast<double>(total)));
    std::vector<int> cells(static_cast<std::size_t>(total));
    std::iota(cells.begin(), cells.end(), 0);
    // Partial Fisher-Yates: the first known_count entries are a uniform
    // sample without replacement.
    for (int k = 0; k < known_count; ++k) {
        std::uniform_int_distribution<int> pick(k, total - 1);
        std::swap(cells[static_cast<std::size_t>(k)],
                  cells[static_cast<std::size_t>(pick(engine))]);
    }
    std::vector<std::pair<int, int>> known;
    known.reserve(static_cast<std::size_t>(known_count));
    for (int k = 0; k < known_count; ++k) {
        known.emplace_back(cells[static_cast<std::size_t>(k)] / n,
                           cells[static_cast<std::size_t>(k)] % n);
    }
    GeneratedProblem problem{L * R.transpose(),
                             ObservationMask(n, n, std::move(known)),
                             false};
    problem.undersampled = known_count <= 2 * n * r - r * r;
    return problem;
}

std::vector<TableRow> run_table(const TableSpec& spec) {
    if (spec.ranks.empty() || spec.missing_rates.empty()) {
        throw std::invalid_argument("table needs at least one rank and missing rate");
    }
    if (spec.trials < 1) {
        throw std::invalid_argument("at least one trial required");
    }
    std::vector<TableRow> rows;
    for (int rank : spec.ranks) {
        for (double missing : spec.missing_rates) {
            TableRow row;
            row.rank = rank;
            row.missing_rate = missing;
            row.seed = spec.seed;
            row.trials = spec.trials;
            double mce_sum = 0.0;
            double are_sum = 0.0;
            double time_sum = 0.0;
            for (int trial = 0; trial < spec.trials; ++trial) {
                const auto started = std::chrono::steady_clock::now();
                GeneratedProblem problem = generate_problem(
                    spec.n, rank, missing,
                    derive_seed(spec.seed, static_cast<std::uint64_t>(rank),
                                rate_tag(missing),
                                static_cast<std::uint64_t>(trial)));
                const Matrix observed = project_mask(problem.truth, problem.mask);
                CompletionConfig config;
                config.guess_rank = rank;
                config.tol = spec.tol;
                config.max_iters = spec.max_iters;
                config.init = make_init(spec.init);
                CompletionResult sol = ap_complete(observed, problem.mask, config);
                time_sum += seconds_since(started);
                row.or_ratio = static_cast<double>(problem.mask.count()) /
                               (2.0 * spec.n * rank - static_cast<double>(rank) * rank);
                mce_sum += completion_metrics(sol.X_star, problem.truth,
                                              problem.mask, rank)
                               .mce;
                are_sum += completion_metrics(sol.Y_star, problem.truth,
                                              problem.mask, rank)
                               .are;
                if (sol.converged) {
                    ++row.converged;
                }
            }
            row.mce = mce_sum / spec.trials;
            row.are = are_sum / spec.trials;
            row.time_s = time_sum / spec.trials;
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<MaxRankRow> max_rank_search(const MaxRankSpec& spec) {
    if (spec.missing_rates.empty()) {
        throw std::invalid_argument("at least one missing rate required");
    }
    if (spec.trials < 1) {
        throw std::invalid_argument("at least one trial required");
    }
    std::vector<MaxRankRow> rows;
    for (double missing : spec.missing_rates) {
        MaxRankRow row;
        row.missing_rate = missing;
        row.trials = spec.trials;
        row.seed = spec.seed;
        for (int rank = 1; rank < spec.n; ++rank) {
            bool all_recovered = true;
            for (int trial = 0; trial < spec.trials && all_recovered; ++trial) {
                GeneratedProblem problem = generate_problem(
                    spec.n, rank, missing,
                    derive_seed(spec.seed, rate_tag(missing),
                                static_cast<std::uint64_t>(rank),
                                static_cast<std::uint64_t>(trial)));
                const Matrix observed = project_mask(problem.truth, problem.mask);
                CompletionConfig config;
                config.guess_rank = rank;
                config.tol = spec.solver_tol;
                config.max_iters = spec.max_iters;
                config.init = make_init(spec.init);
                CompletionResult sol = ap_complete(observed, problem.mask, config);
                const MetricsRecord metrics = completion_metrics(
                    sol.X_star, problem.truth, problem.mask, rank);
                const double error = spec.criterion == CompletionSuccess::MaxNorm
                                         ? metrics.mce
                                         : metrics.rel_fro;
                all_recovered = error < spec.success_tol;
            }
            if (!all_recovered) {
                break;
            }
            row.largest_rank = rank;
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<FrequencyRow> run_sparse_figure(const SparseFigureSpec& spec) {
    if (spec.s_values.empty()) {
        throw std::invalid_argument("at least one sparsity value required");
    }
    if (spec.trials < 1) {
        throw std::invalid_argument("at least one trial required");
    }
    return recovery_frequency(spec.n, spec.N, spec.s_values, spec.trials,
                              spec.ensemble, spec.seed, spec.success_tol,
                              spec.success, spec.solver);
}

ImageResult image_recover(const ImageJob& job) {
    const GrayImage& input = job.input;
    if (input.width <= 0 || input.height <= 0 ||
        input.pixels.size() != static_cast<std::size_t>(input.width) *
                                   static_cast<std::size_t>(input.height)) {
        throw std::invalid_argument("malformed input image");
    }
    if (!(job.missing_rate >= 0.0 && job.missing_rate < 1.0)) {
        throw std::invalid_argument("missing rate must lie in [0, 1)");
    }
    if (job.rank < 1 || job.rank > std::min(input.width, input.height)) {
        throw std::invalid_argument("rank outside range for this image");
    }
    const int rows = input.height;
    const int cols = input.width;
    Matrix M(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            M(i, j) = static_cast<double>(
                          input.pixels[static_cast<std::size_t>(i) * cols + j]) /
                      input.maxval;
        }
    }

    const int total = rows * cols;
    const int known_count = static_cast<int>(
        std::ceil((1.0 - job.missing_rate) * static_cast<double>(total)));
    auto engine = seeded_engine(derive_seed(job.seed, 0x1a64e));
    std::vector<int> cells(static_cast<std::size_t>(total));
    std::iota(cells.begin(), cells.end(), 0);
    for (int k = 0; k < known_count; ++k) {
        std::uniform_int_distribution<int> pick(k, total - 1);
        std::swap(cells[static_cast<std::size_t>(k)],
                  cells[static_cast<std::size_t>(pick(engine))]);
    }
    std::vector<std::pair<int, int>> known;
    known.reserve(static_cast<std::size_t>(known_count));
    for (int k = 0; k < known_count; ++k) {
        known.emplace_back(cells[static_cast<std::size_t>(k)] / cols,
                           cells[static_cast<std::size_t>(k)] % cols);
    }
    ObservationMask mask(rows, cols, std::move(known));
    const Matrix observed = project_mask(M, mask);

    CompletionConfig config;
    config.guess_rank = job.rank;
    config.tol = job.tol;
    config.max_iters = job.max_iters;
    config.init = make_init(job.init);
    CompletionResult sol = ap_complete(observed, mask, config);
    const Matrix recovered =
        sol.X_star.cwiseMax(0.0).cwiseMin(1.0);

    ImageResult result;
    result.rmse = std::sqrt((recovered - M).squaredNorm() / total);
    result.masked = input;
    result.recovered = input;
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            const std::size_t p = static_cast<std::size_t>(i) * cols + j;
            result.masked.pixels[p] =
                mask.contains(i, j) ? input.pixels[p] : 0;
            result.recovered.pixels[p] = static_cast<int>(
                std::lround(recovered(i, j) * input.maxval));
        }
    }
    return result;
}

GrayImage synthetic_low_rank_image(int n, int r, std::uint64_t seed) {
    if (n < 1 || r < 1 || r > n) {
        throw std::invalid_argument("synthetic image needs 1 <= r <= n");
    }
    auto engine = seeded_engine(derive_seed(seed, 0x517e));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Matrix L(n, r);
    Matrix R(n, r);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < r; ++j) {
            L(i, j) = uniform(engine);
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < r; ++j) {
            R(i, j) = uniform(engine);
        }
    }
    const Matrix A = L * R.transpose();
    const double top = A.maxCoeff();
    GrayImage image;
    image.width = n;
    image.height = n;
    image.maxval = 255;
    image.pixels.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            image.pixels.push_back(
                static_cast<int>(std::lround(255.0 * A(i, j) / top)));
        }
    }
    return image;
}

void write_table_csv(const std::string& path, const std::vector<TableRow>& rows) {
    auto out = std::ofstream(path);
    if (!out) {
        throw std::invalid_argument(path + ": cannot open for writing");
    }
    out << "rank,missing_rate,or_ratio,mce,are,time_s,seed,converged,trials\n";
    for (const auto& row : rows) {
        out << row.rank << ',' << format_real(row.missing_rate) << ','
            << format_real(row.or_ratio) << ',' << format_real(row.mce) << ','
            << format_real(row.are) << ',' << format_real(row.time_s) << ','
            << row.seed << ',' << row.converged << ',' << row.trials << '\n';
    }
}

void write_maxrank_csv(const std::string& path,
                       const std::vector<MaxRankRow>& rows) {
    auto out = std::ofstream(path);
    if (!out) {
        throw std::invalid_argument(path + ": cannot open for writing");
    }
    out << "missing_rate,largest_rank,trials,seed\n";
    for (const auto& row : rows) {
        out << format_real(row.missing_rate) << ',' << row.largest_rank << ','
            << row.trials << ',' << row.seed << '\n';
    }
}

} // namespace apkit
