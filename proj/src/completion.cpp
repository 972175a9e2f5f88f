#include "apkit/completion.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace apkit {

namespace {

double offmask_norm(const Matrix& D, const ObservationMask& mask) {
    double sum = D.squaredNorm();
    for (const auto& [i, j] : mask.known()) {
        sum -= D(i, j) * D(i, j);
    }
    return std::sqrt(std::max(sum, 0.0));
}

Matrix initial_matrix(const Matrix& observed, const ObservationMask& mask,
                      const CompletionConfig& config) {
    if (std::holds_alternative<MaskFillInit>(config.init)) {
        return project_mask(observed, mask);
    }
    if (const auto* pursuit = std::get_if<RankOnePursuitInit>(&config.init)) {
        const int steps = pursuit->steps > 0 ? pursuit->steps : config.guess_rank;
        return rank_one_pursuit_init(observed, mask, steps);
    }
    const auto& custom = std::get<CustomInit>(config.init);
    if (custom.X0.rows() != observed.rows() || custom.X0.cols() != observed.cols()) {
        throw std::invalid_argument("custom initial matrix has the wrong dimensions");
    }
    require_finite(custom.X0, "custom initial matrix");
    return custom.X0;
}

} // namespace

CompletionResult ap_complete(const Matrix& observed, const ObservationMask& mask,
                             const CompletionConfig& config) {
    require_finite(observed, "observed matrix");
    if (observed.rows() != mask.rows() || observed.cols() != mask.cols()) {
        throw std::invalid_argument("observed matrix and mask dimensions disagree");
    }
    if (config.guess_rank < 1 ||
        config.guess_rank > std::min(observed.rows(), observed.cols())) {
        throw std::invalid_argument("guess rank outside range");
    }
    if (!(config.tol > 0.0)) {
        throw std::invalid_argument("tolerance must be positive");
    }
    if (config.max_iters < 1) {
        throw std::invalid_argument("iteration budget must be positive");
    }
    if (config.truth && (config.truth->rows() != observed.rows() ||
                         config.truth->cols() != observed.cols())) {
        throw std::invalid_argument("truth matrix has the wrong dimensions");
    }

    CompletionResult result;
    CompletionTrace trace;

    // Make the start feasible so every recorded iterate lies in the data set.
    Matrix X = project_affine_mask(initial_matrix(observed, mask, config), mask,
                                   observed);
    Matrix Y;
    for (int k = 0; k < config.max_iters; ++k) {
        Y = svd_truncate(X, config.guess_rank).first;
        Matrix X_next = project_affine_mask(Y, mask, observed);
        const double step = (X_next - X).norm();
        if (config.record_trace) {
            trace.step_norm.push_back(step);
            trace.gap_norm.push_back((X - Y).norm());
            trace.offmask_gap.push_back(offmask_norm(X - Y, mask));
            trace.post_gap.push_back((X_next - Y).norm());
            if (config.truth) {
                trace.truth_mce.push_back(
                    (X_next - *config.truth).cwiseAbs().maxCoeff());
                trace.truth_fro.push_back((X_next - *config.truth).norm());
            }
        }
        X = std::move(X_next);
        result.iters = k + 1;
        if (step < config.tol) {
            result.converged = true;
            break;
        }
    }
    result.X_star = std::move(X);
    result.Y_star = std::move(Y);
    if (config.record_trace) {
        try {
            result.estimated_rate = fit_geometric_rate(trace.step_norm);
        } catch (const std::invalid_argument&) {
            // Too few decaying points to fit; leave the rate unset.
        }
        result.trace = std::move(trace);
    }
    return result;
}

Matrix rank_one_pursuit_init(const Matrix& observed, const ObservationMask& mask,
                             int r) {
    require_finite(observed, "observed matrix");
    if (observed.rows() != mask.rows() || observed.cols() != mask.cols()) {
        throw std::invalid_argument("observed matrix and mask dimensions disagree");
    }
    if (r < 1) {
        throw std::invalid_argument("pursuit needs at least one step");
    }
    const Matrix target = project_mask(observed, mask);
    const int m = mask.count();
    const auto& known = mask.known();

    Vector target_values(m);
    for (int a = 0; a < m; ++a) {
        target_values[a] = target(known[static_cast<std::size_t>(a)].first,
                                  known[static_cast<std::size_t>(a)].second);
    }

    std::vector<Matrix> basis;
    Matrix B(m, 0);  // basis elements sampled at the observed positions
    Matrix X = Matrix::Zero(observed.rows(), observed.cols());
    for (int step = 0; step < r; ++step) {
        const Matrix residual = project_mask(target - X, mask);
        if (residual.norm() <= 1e-15 * (1.0 + target.norm())) {
            break;  // observed entries already matched
        }
        Eigen::BDCSVD<Matrix> svd(residual,
                                  Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (svd.info() != Eigen::Success) {
            throw NumericalError("SVD failed to converge");
        }
        basis.push_back(svd.matrixU().col(0) * svd.matrixV().col(0).transpose());
        B.conservativeResize(m, static_cast<int>(basis.size()));
        const Matrix& newest = basis.back();
        for (int a = 0; a < m; ++a) {
            B(a, B.cols() - 1) = newest(known[static_cast<std::size_t>(a)].first,
                                        known[static_cast<std::size_t>(a)].second);
        }
        // Refit every weight on the observed entries; minimum-norm on rank
        // deficiency (a repeated direction must not blow up the weights).
        const Vector theta =
            B.completeOrthogonalDecomposition().solve(target_values);
        X.setZero();
        for (std::size_t t = 0; t < basis.size(); ++t) {
            X += theta[static_cast<int>(t)] * basis[t];
        }
    }
    return X;
}

double fit_geometric_rate(const std::vector<double>& errors) {
    std::vector<double> usable;
    usable.reserve(errors.size());
    for (double e : errors) {
        if (e > 1e-13) {
            usable.push_back(e);
        }
    }
    if (usable.size() < 10) {
        throw std::invalid_argument(
            "rate fit needs at least 10 points above 1e-13; got " +
            std::to_string(usable.size()));
    }
    const std::size_t window =
        std::max<std::size_t>(10, (usable.size() + 2) / 3);
    const std::size_t begin = usable.size() - window;
    // Least-squares slope of log(error) against the index.
    double mean_k = 0.0;
    double mean_log = 0.0;
    for (std::size_t t = 0; t < window; ++t) {
        mean_k += static_cast<double>(t);
        mean_log += std::log(usable[begin + t]);
    }
    mean_k /= static_cast<double>(window);
    mean_log /= static_cast<double>(window);
    double cov = 0.0;
    double var = 0.0;
    for (std::size_t t = 0; t < window; ++t) {
        const double dk = static_cast<double>(t) - mean_k;
        cov += dk * (std::log(usable[begin + t]) - mean_log);
        var += dk * dk;
    }
    return std::exp(cov / var);
}

double estimate_rate(const CompletionTrace& trace,
                     const std::vector<double>& truth_errors) {
    return fit_geometric_rate(truth_errors.empty() ? trace.step_norm
                                                   : truth_errors);
}

MetricsRecord completion_metrics(const Matrix& X, const Matrix& truth,
                                 const ObservationMask& mask, int r) {
    if (X.rows() != truth.rows() || X.cols() != truth.cols() ||
        X.rows() != mask.rows() || X.cols() != mask.cols()) {
        throw std::invalid_argument("metrics dimensions disagree");
    }
    if (X.rows() != X.cols()) {
        throw std::invalid_argument(
            "metrics assume a square matrix (the oversampling ratio is defined "
            "against the square-manifold dimension)");
    }
    if (r < 1 || r > X.rows()) {
        throw std::invalid_argument("rank outside range");
    }
    const int n = static_cast<int>(X.rows());
    const int m = mask.count();
    MetricsRecord rec;
    rec.mce = (X - truth).cwiseAbs().maxCoeff();
    const double observed_truth = project_mask(truth, mask).norm();
    const double observed_err = project_mask(X - truth, mask).norm();
    rec.are = observed_truth > 0.0 ? observed_err / observed_truth
                                   : (observed_err > 0.0 ? std::numeric_limits<double>::infinity()
                                                         : 0.0);
    rec.or_ratio = static_cast<double>(m) / (2.0 * n * r - static_cast<double>(r) * r);
    rec.missing_rate = static_cast<double>(n * n - m) / (static_cast<double>(n) * n);
    const double truth_norm = truth.norm();
    rec.rel_fro = truth_norm > 0.0 ? (X - truth).norm() / truth_norm
                                   : ((X - truth).norm() > 0.0
                                          ? std::numeric_limits<double>::infinity()
                                          : 0.0);
    return rec;
}

std::pair<double, double> fixed_point_residuals(const Matrix& X_star,
                                                const Matrix& Y_star) {
    if (X_star.rows() != Y_star.rows() || X_star.cols() != Y_star.cols()) {
        throw std::invalid_argument("iterate dimensions disagree");
    }
    const Matrix D = X_star - Y_star;
    return {(Y_star * D.transpose()).norm(), (Y_star.transpose() * D).norm()};
}

} // namespace apkit
