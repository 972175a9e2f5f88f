#include "apkit/bench.hpp"
#include "apkit/existence.hpp"
#include "apkit/io.hpp"
#include "apkit/tangent.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

void emit_json(const json& payload, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << payload.dump(2) << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) {
        throw std::invalid_argument(out_path + ": cannot open for writing");
    }
    out << payload.dump(2) << "\n";
}

apkit::CompletionInitKind parse_init_kind(const std::string& name) {
    if (name == "maskfill") {
        return apkit::CompletionInitKind::MaskFill;
    }
    return apkit::CompletionInitKind::RankOnePursuit;
}

// Sparsity sweeps accept "10:70:5" (inclusive range with step) or "3,5,9".
std::vector<int> parse_sparsity_sweep(const std::string& text) {
    std::vector<int> values;
    if (text.find(':') != std::string::npos) {
        int lo = 0, hi = 0, step = 1;
        char c1 = 0, c2 = 0;
        std::istringstream in(text);
        if (!(in >> lo >> c1 >> hi) || c1 != ':') {
            throw std::invalid_argument("cannot parse sparsity range '" + text + "'");
        }
        if (in >> c2 >> step) {
            if (c2 != ':') {
                throw std::invalid_argument("cannot parse sparsity range '" + text + "'");
            }
        }
        if (step < 1 || hi < lo) {
            throw std::invalid_argument("sparsity range '" + text + "' is empty");
        }
        for (int s = lo; s <= hi; s += step) {
            values.push_back(s);
        }
        return values;
    }
    std::istringstream in(text);
    std::string token;
    while (std::getline(in, token, ',')) {
        values.push_back(std::stoi(token));
    }
    if (values.empty()) {
        throw std::invalid_argument("no sparsity values in '" + text + "'");
    }
    return values;
}

void write_sparse_trace_csv(const std::string& path, const apkit::SparseTrace& trace) {
    std::ofstream out(path);
    if (!out) {
        throw std::invalid_argument(path + ": cannot open for writing");
    }
    out << "k,step_norm,gap_norm,support_changed\n";
    for (std::size_t k = 0; k < trace.size(); ++k) {
        out << k << ',' << apkit::format_real(trace.step_norm[k]) << ','
            << apkit::format_real(trace.gap_norm[k]) << ','
            << static_cast<int>(trace.support_changed[k]) << '\n';
    }
}

struct CompleteArgs {
    std::string observed_path;
    std::string mask_path;
    std::string out_path;
    std::string trace_path;
    std::string truth_path;
    std::string init = "maskfill";
    int rank = 1;
    double tol = 1e-6;
    int max_iters = 5000;
    bool escalate = false;
};

void run_complete(const CompleteArgs& args) {
    const apkit::Matrix observed = apkit::read_matrix_csv(args.observed_path);
    const apkit::ObservationMask mask = apkit::read_mask_file(
        args.mask_path, static_cast<int>(observed.rows()),
        static_cast<int>(observed.cols()));

    apkit::CompletionConfig config;
    config.tol = args.tol;
    config.max_iters = args.max_iters;
    config.record_trace = true;
    if (!args.truth_path.empty()) {
        config.truth = apkit::read_matrix_csv(args.truth_path);
    }

    const int max_rank =
        static_cast<int>(std::min(observed.rows(), observed.cols()));
    int rank = args.rank;
    // A converged run whose feasible and low-rank iterates stay apart means
    // the guess rank is too small; with --escalate we raise it and retry.
    const double gap_tol = 10.0 * args.tol * (1.0 + observed.norm());
    apkit::CompletionResult result;
    while (true) {
        config.guess_rank = rank;
        config.init = args.init == "maskfill"
                          ? apkit::CompletionInit{apkit::MaskFillInit{}}
                          : apkit::CompletionInit{apkit::RankOnePursuitInit{}};
        result = apkit::ap_complete(observed, mask, config);
        const double gap = (result.X_star - result.Y_star).norm();
        if (!args.escalate || rank >= max_rank ||
            (result.converged && gap <= gap_tol)) {
            break;
        }
        std::cout << "rank " << rank << " left a residual gap of "
                  << apkit::format_real(gap) << "; escalating\n";
        ++rank;
    }

    apkit::write_matrix_csv(args.out_path, result.X_star);
    if (!args.trace_path.empty() && result.trace) {
        apkit::write_trace_csv(args.trace_path, *result.trace);
    }

    std::cout << "rank " << rank << (result.converged ? " converged" : " stopped")
              << " after " << result.iters << " iterations\n";
    std::cout << "residual gap ||X-Y||_F = "
              << apkit::format_real((result.X_star - result.Y_star).norm()) << "\n";
    if (result.estimated_rate) {
        std::cout << "fitted contraction rate = "
                  << apkit::format_real(*result.estimated_rate) << "\n";
    }
    if (!result.converged) {
        std::cout << "hint: a persistent gap suggests raising --rank"
                  << (args.escalate ? "" : " or passing --escalate") << "\n";
    }
}

struct SparseArgs {
    std::string a_path;
    std::string b_path;
    std::string out_path;
    std::string trace_path;
    std::string init = "minnorm";
    int s = 1;
    double tol = 1e-6;
    int max_iters = 10000;
    std::uint64_t init_seed = 0;
    bool also_step_tol = false;
};

void run_sparse(const SparseArgs& args) {
    apkit::SparseProblem problem(apkit::read_matrix_csv(args.a_path),
                                 apkit::read_vector_file(args.b_path), args.s);
    apkit::SparseConfig config;
    config.tol = args.tol;
    config.max_iters = args.max_iters;
    config.also_step_tol = args.also_step_tol;
    config.record_trace = !args.trace_path.empty();
    if (args.init == "random") {
        config.init = apkit::SeededRandomFeasibleInit{args.init_seed};
    }
    const apkit::SparseResult result = apkit::ap_sparse(problem, config);
    apkit::write_vector_file(args.out_path, result.x);
    if (config.record_trace && result.trace) {
        write_sparse_trace_csv(args.trace_path, *result.trace);
    }
    std::cout << (result.converged ? "converged" : "stopped") << " after "
              << result.iters << " iterations\n";
    std::cout << "support:";
    for (int idx : result.support) {
        std::cout << ' ' << idx;
    }
    std::cout << "\n";
    if (result.tie_flag) {
        std::cout << "note: a thresholding step hit a magnitude tie; the "
                     "sparse projection was not unique\n";
    }
}

struct DiagnoseArgs {
    std::string matrix_path;
    std::string mask_path;
    std::string out_path;
    int rank = 1;
    bool lift = false;
};

void run_diagnose(const DiagnoseArgs& args) {
    apkit::Matrix M = apkit::read_matrix_csv(args.matrix_path);
    const apkit::ObservationMask mask = apkit::read_mask_file(
        args.mask_path, static_cast<int>(M.rows()), static_cast<int>(M.cols()));
    if (args.lift) {
        M = apkit::svd_truncate(M, args.rank).first;
    }
    const apkit::TransversalityReport report =
        apkit::transversality_report(M, mask, args.rank);
    json payload = {
        {"n", report.n},
        {"r", report.r},
        {"m", report.m},
        {"dim_manifold", report.dim_manifold},
        {"rank_T_omega", report.rank_T_omega},
        {"rank_V_omega", report.rank_V_omega},
        {"rowspace_inclusion_holds", report.rowspace_inclusion_holds},
        {"intersection_trivial", report.intersection_trivial},
        {"certified_linear", report.certified_linear},
    };
    emit_json(payload, args.out_path);
}

struct ExistenceArgs {
    int n = 1;
    int r = 1;
    int m = 0;
    std::string out_path;
};

void run_existence(const ExistenceArgs& args) {
    const apkit::ExistenceReport report =
        apkit::existence_report(args.n, args.r, args.m);
    // The count bound outgrows 64-bit integers quickly, so it travels as a
    // decimal string.
    json payload = {
        {"n", report.n},
        {"r", report.r},
        {"m", report.m},
        {"manifold_dim", report.manifold_dim},
        {"sample_ok", report.sample_ok},
        {"degree_bound", report.degree_bound.str()},
    };
    emit_json(payload, args.out_path);
}

struct TableArgs {
    int n = 100;
    std::vector<int> ranks;
    std::vector<double> missing;
    int trials = 20;
    std::uint64_t seed = 0;
    std::string init = "or1mp";
    double tol = 1e-6;
    int max_iters = 5000;
    std::string out_path;
};

void run_bench_table(const TableArgs& args) {
    apkit::TableSpec spec;
    spec.n = args.n;
    spec.ranks = args.ranks;
    spec.missing_rates = args.missing;
    spec.trials = args.trials;
    spec.seed = args.seed;
    spec.init = parse_init_kind(args.init);
    spec.tol = args.tol;
    spec.max_iters = args.max_iters;
    const std::vector<apkit::TableRow> rows = apkit::run_table(spec);
    apkit::write_table_csv(args.out_path, rows);
    for (const auto& row : rows) {
        std::cout << "rank " << row.rank << " missing "
                  << apkit::format_real(row.missing_rate) << ": mce "
                  << apkit::format_real(row.mce) << ", are "
                  << apkit::format_real(row.are) << ", " << row.converged << "/"
                  << row.trials << " converged\n";
    }
}

struct MaxRankArgs {
    int n = 100;
    std::vector<double> missing;
    double success_tol = 1e-3;
    std::string criterion = "maxnorm";
    int trials = 10;
    std::string init = "maskfill";
    std::uint64_t seed = 0;
    double solver_tol = 1e-5;
    int max_iters = 5000;
    std::string out_path;
};

void run_bench_maxrank(const MaxRankArgs& args) {
    apkit::MaxRankSpec spec;
    spec.n = args.n;
    spec.missing_rates = args.missing;
    spec.success_tol = args.success_tol;
    spec.criterion = args.criterion == "relfro" ? apkit::CompletionSuccess::RelFro
                                                : apkit::CompletionSuccess::MaxNorm;
    spec.trials = args.trials;
    spec.init = parse_init_kind(args.init);
    spec.seed = args.seed;
    spec.solver_tol = args.solver_tol;
    spec.max_iters = args.max_iters;
    const std::vector<apkit::MaxRankRow> rows = apkit::max_rank_search(spec);
    apkit::write_maxrank_csv(args.out_path, rows);
    for (const auto& row : rows) {
        std::cout << "missing " << apkit::format_real(row.missing_rate)
                  << ": largest recovered rank " << row.largest_rank << "\n";
    }
}

struct SparseBenchArgs {
    int n = 128;
    int N = 256;
    std::string sweep = "10:70:5";
    int trials = 50;
    std::string ensemble = "gaussian";
    std::uint64_t seed = 0;
    double success_tol = 1e-3;
    std::string success = "maxnorm";
    double solver_tol = 1e-6;
    int max_iters = 10000;
    std::string out_path;
};

void run_bench_sparse(const SparseBenchArgs& args) {
    apkit::SparseFigureSpec spec;
    spec.n = args.n;
    spec.N = args.N;
    spec.s_values = parse_sparsity_sweep(args.sweep);
    spec.trials = args.trials;
    spec.ensemble = args.ensemble == "uniform" ? apkit::SparseEnsemble::Uniform
                                               : apkit::SparseEnsemble::Gaussian;
    spec.seed = args.seed;
    spec.success_tol = args.success_tol;
    spec.success = args.success == "rell2" ? apkit::SuccessCriterion::RelL2
                                           : apkit::SuccessCriterion::MaxNorm;
    spec.solver.tol = args.solver_tol;
    spec.solver.max_iters = args.max_iters;
    const std::vector<apkit::FrequencyRow> rows = apkit::run_sparse_figure(spec);
    apkit::write_frequency_csv(args.out_path, rows);
    for (const auto& row : rows) {
        std::cout << "s=" << row.s << ": " << row.successes << "/" << row.trials
                  << " recovered (" << apkit::format_real(row.frequency) << ")\n";
    }
}

struct ImageArgs {
    std::string image_path;
    std::string out_path;
    std::string masked_path;
    int synthetic_n = 0;
    int synthetic_rank = 8;
    double missing = 0.5;
    int rank = 25;
    std::string init = "or1mp";
    std::uint64_t seed = 0;
    double tol = 1e-6;
    int max_iters = 5000;
};

void run_image(const ImageArgs& args) {
    apkit::ImageJob job;
    if (!args.image_path.empty()) {
        job.input = apkit::read_pgm(args.image_path);
    } else {
        job.input = apkit::synthetic_low_rank_image(args.synthetic_n,
                                                    args.synthetic_rank, args.seed);
    }
    job.missing_rate = args.missing;
    job.rank = args.rank;
    job.init = parse_init_kind(args.init);
    job.seed = args.seed;
    job.tol = args.tol;
    job.max_iters = args.max_iters;
    const apkit::ImageResult result = apkit::image_recover(job);
    apkit::write_pgm(args.out_path, result.recovered);
    if (!args.masked_path.empty()) {
        apkit::write_pgm(args.masked_path, result.masked);
    }
    std::cout << "rmse " << apkit::format_real(result.rmse) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Alternating projection toolkit: low-rank matrix completion, "
                 "sparse recovery, and transversality certificates"};
    app.require_subcommand(1);

    auto complete_args = std::make_shared<CompleteArgs>();
    CLI::App* complete =
        app.add_subcommand("complete", "Complete a partially observed matrix");
    complete->add_option("--observed", complete_args->observed_path,
                         "CSV with the observed matrix (values off the mask are ignored)")
        ->required();
    complete->add_option("--mask", complete_args->mask_path,
                         "CSV of observed positions, one 1-based 'i,j' per line")
        ->required();
    complete->add_option("--rank", complete_args->rank, "guess rank")->required();
    complete->add_option("--tol", complete_args->tol, "step-norm stopping tolerance");
    complete->add_option("--max-iters", complete_args->max_iters, "iteration budget");
    complete->add_option("--init", complete_args->init, "starting point")
        ->check(CLI::IsMember({"maskfill", "or1mp"}));
    complete->add_option("--trace", complete_args->trace_path,
                         "write the per-iteration trace CSV here");
    complete->add_option("--truth", complete_args->truth_path,
                         "ground-truth CSV; adds error columns to the trace");
    complete->add_option("--out", complete_args->out_path, "output CSV for the result")
        ->required();
    complete->add_flag("--escalate", complete_args->escalate,
                       "raise the rank and retry while the low-rank iterate "
                       "stays away from the data");
    complete->set_config("--config");
    complete->callback([complete_args] { run_complete(*complete_args); });

    auto sparse_args = std::make_shared<SparseArgs>();
    CLI::App* sparse =
        app.add_subcommand("sparse", "Recover a sparse solution of A x = b");
    sparse->add_option("--A", sparse_args->a_path, "CSV with the sensing matrix")
        ->required();
    sparse->add_option("--b", sparse_args->b_path, "measurements, one value per line")
        ->required();
    sparse->add_option("--s", sparse_args->s, "sparsity level")->required();
    sparse->add_option("--tol", sparse_args->tol,
                       "stopping tolerance on the N-s smallest magnitudes");
    sparse->add_option("--max-iters", sparse_args->max_iters, "iteration budget");
    sparse->add_option("--init", sparse_args->init, "starting point")
        ->check(CLI::IsMember({"minnorm", "random"}));
    sparse->add_option("--init-seed", sparse_args->init_seed,
                       "seed for the random feasible start");
    sparse->add_flag("--also-step-tol", sparse_args->also_step_tol,
                     "additionally require the step norm to fall below tol");
    sparse->add_option("--trace", sparse_args->trace_path,
                       "write the per-iteration trace CSV here");
    sparse->add_option("--out", sparse_args->out_path, "output file for x")->required();
    sparse->set_config("--config");
    sparse->callback([sparse_args] { run_sparse(*sparse_args); });

    auto diagnose_args = std::make_shared<DiagnoseArgs>();
    CLI::App* diagnose = app.add_subcommand(
        "diagnose",
        "Transversality certificate for a completion instance. Builds the "
        "dense tangent matrix, so n is capped at 64; the Gram certificate "
        "inside the report is the practical tool at larger sizes.");
    diagnose->add_option("--matrix", diagnose_args->matrix_path, "matrix CSV")
        ->required();
    diagnose->add_option("--mask", diagnose_args->mask_path, "observed positions CSV")
        ->required();
    diagnose->add_option("--rank", diagnose_args->rank, "rank of the matrix")
        ->required();
    diagnose->add_option("--out", diagnose_args->out_path,
                         "write the JSON report here (default: stdout)");
    diagnose->add_flag("--lift", diagnose_args->lift,
                       "truncate the input to the given rank first; use for "
                       "matrices typed in from a rounded printout");
    diagnose->set_config("--config");
    diagnose->callback([diagnose_args] { run_diagnose(*diagnose_args); });

    auto existence_args = std::make_shared<ExistenceArgs>();
    CLI::App* existence = app.add_subcommand(
        "existence", "Sampling diagnosis and completion-count bound");
    existence->add_option("--n", existence_args->n, "matrix size")->required();
    existence->add_option("--r", existence_args->r, "rank")->required();
    existence->add_option("--m", existence_args->m, "number of observed entries")
        ->required();
    existence->add_option("--out", existence_args->out_path,
                          "write the JSON report here (default: stdout)");
    existence->set_config("--config");
    existence->callback([existence_args] { run_existence(*existence_args); });

    auto table_args = std::make_shared<TableArgs>();
    CLI::App* bench_table = app.add_subcommand(
        "bench-table", "Completion error table over ranks and missing rates");
    bench_table->add_option("--n", table_args->n, "matrix size");
    bench_table->add_option("--ranks", table_args->ranks, "ranks to sweep")
        ->required()
        ->delimiter(',');
    bench_table->add_option("--missing", table_args->missing, "missing rates to sweep")
        ->required()
        ->delimiter(',');
    bench_table->add_option("--trials", table_args->trials, "trials per cell");
    bench_table->add_option("--seed", table_args->seed, "base seed");
    bench_table->add_option("--init", table_args->init, "starting point")
        ->check(CLI::IsMember({"maskfill", "or1mp"}));
    bench_table->add_option("--tol", table_args->tol, "solver tolerance");
    bench_table->add_option("--max-iters", table_args->max_iters, "iteration budget");
    bench_table->add_option("--out", table_args->out_path, "output CSV")->required();
    bench_table->set_config("--config");
    bench_table->callback([table_args] { run_bench_table(*table_args); });

    auto maxrank_args = std::make_shared<MaxRankArgs>();
    CLI::App* bench_maxrank = app.add_subcommand(
        "bench-maxrank", "Largest recoverable rank per missing rate");
    bench_maxrank->add_option("--n", maxrank_args->n, "matrix size");
    bench_maxrank->add_option("--missing", maxrank_args->missing,
                              "missing rates to sweep")
        ->required()
        ->delimiter(',');
    bench_maxrank->add_option("--success-tol", maxrank_args->success_tol,
                              "recovery tolerance");
    bench_maxrank->add_option("--criterion", maxrank_args->criterion,
                              "recovery criterion")
        ->check(CLI::IsMember({"maxnorm", "relfro"}));
    bench_maxrank->add_option("--trials", maxrank_args->trials, "trials per rank");
    bench_maxrank->add_option("--init", maxrank_args->init, "starting point")
        ->check(CLI::IsMember({"maskfill", "or1mp"}));
    bench_maxrank->add_option("--seed", maxrank_args->seed, "base seed");
    bench_maxrank->add_option("--solver-tol", maxrank_args->solver_tol,
                              "solver stopping tolerance");
    bench_maxrank->add_option("--max-iters", maxrank_args->max_iters,
                              "iteration budget");
    bench_maxrank->add_option("--out", maxrank_args->out_path, "output CSV")
        ->required();
    bench_maxrank->set_config("--config");
    bench_maxrank->callback([maxrank_args] { run_bench_maxrank(*maxrank_args); });

    auto sparse_bench_args = std::make_shared<SparseBenchArgs>();
    CLI::App* bench_sparse = app.add_subcommand(
        "bench-sparse", "Frequency of sparse recovery across sparsity levels");
    bench_sparse->alias("sparse-bench");
    bench_sparse->add_option("--n", sparse_bench_args->n, "measurement count");
    bench_sparse->add_option("--N", sparse_bench_args->N, "ambient dimension");
    bench_sparse->add_option("--s", sparse_bench_args->sweep,
                             "sparsity sweep, 'lo:hi:step' or comma list");
    bench_sparse->add_option("--trials", sparse_bench_args->trials,
                             "trials per sparsity");
    bench_sparse->add_option("--ensemble", sparse_bench_args->ensemble,
                             "random matrix ensemble")
        ->check(CLI::IsMember({"gaussian", "uniform"}));
    bench_sparse->add_option("--seed", sparse_bench_args->seed, "base seed");
    bench_sparse->add_option("--success-tol", sparse_bench_args->success_tol,
                             "recovery tolerance");
    bench_sparse->add_option("--success", sparse_bench_args->success,
                             "recovery criterion")
        ->check(CLI::IsMember({"maxnorm", "rell2"}));
    bench_sparse->add_option("--solver-tol", sparse_bench_args->solver_tol,
                             "solver stopping tolerance");
    bench_sparse->add_option("--max-iters", sparse_bench_args->max_iters,
                             "iteration budget");
    bench_sparse->add_option("--out", sparse_bench_args->out_path, "output CSV")
        ->required();
    bench_sparse->set_config("--config");
    bench_sparse->callback(
        [sparse_bench_args] { run_bench_sparse(*sparse_bench_args); });

    auto image_args = std::make_shared<ImageArgs>();
    CLI::App* image = app.add_subcommand(
        "image", "Drop random pixels from a grayscale image and complete them");
    auto* image_opt = image->add_option("--image", image_args->image_path,
                                        "input PGM (P2 or P5, maxval up to 255)");
    auto* synth_opt = image->add_option("--synthetic-n", image_args->synthetic_n,
                                        "use a synthetic low-rank image of this size");
    image_opt->excludes(synth_opt);
    synth_opt->excludes(image_opt);
    image->add_option("--synthetic-rank", image_args->synthetic_rank,
                      "rank of the synthetic image");
    image->add_option("--missing", image_args->missing, "fraction of pixels to drop");
    image->add_option("--rank", image_args->rank, "completion rank");
    image->add_option("--init", image_args->init, "starting point")
        ->check(CLI::IsMember({"maskfill", "or1mp"}));
    image->add_option("--seed", image_args->seed, "seed for the pixel mask");
    image->add_option("--tol", image_args->tol, "solver tolerance");
    image->add_option("--max-iters", image_args->max_iters, "iteration budget");
    image->add_option("--out", image_args->out_path, "recovered PGM")->required();
    image->add_option("--masked-out", image_args->masked_path,
                      "also write the masked preview PGM here");
    image->set_config("--config");
    image->callback([image_args, image_opt, synth_opt] {
        if (image_opt->count() == 0 && synth_opt->count() == 0) {
            throw CLI::ValidationError(
                "image", "pass either --image or --synthetic-n");
        }
        run_image(*image_args);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const apkit::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
