#include "apkit/bench.hpp"
#include "apkit/io.hpp"
#include "apkit/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace apkit;

namespace {

std::string tmp_path(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "apkit_unit";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

TEST_CASE("generate_problem is a pure function of its arguments") {
    GeneratedProblem a = generate_problem(12, 2, 0.4, 99);
    GeneratedProblem b = generate_problem(12, 2, 0.4, 99);
    CHECK((a.truth - b.truth).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(a.mask.count() == b.mask.count());
    for (int k = 0; k < a.mask.count(); ++k) {
        CHECK(a.mask.known()[static_cast<std::size_t>(k)] ==
              b.mask.known()[static_cast<std::size_t>(k)]);
    }
    GeneratedProblem c = generate_problem(12, 2, 0.4, 100);
    CHECK((a.truth - c.truth).cwiseAbs().maxCoeff() > 0.0);

    // Observed count: ceil of the kept fraction.
    CHECK(a.mask.count() == static_cast<int>(std::ceil(0.6 * 144)));
    // Exact factor rank.
    Eigen::JacobiSVD<Matrix> svd(a.truth);
    CHECK(svd.singularValues()(1) > 1e-10);
    CHECK(svd.singularValues()(2) <= 1e-10 * svd.singularValues()(0));
    CHECK_FALSE(a.undersampled);

    GeneratedProblem full = generate_problem(6, 1, 0.0, 7);
    CHECK(full.mask.full());
    GeneratedProblem starved = generate_problem(6, 2, 0.9, 7);
    // ceil(0.1 * 36) = 4 observed entries against a 20-dimensional manifold.
    CHECK(starved.undersampled);
}

TEST_CASE("run_table on an easy configuration reports small errors") {
    TableSpec spec;
    spec.n = 14;
    spec.ranks = {1};
    spec.missing_rates = {0.3};
    spec.trials = 2;
    spec.seed = 5;
    spec.init = CompletionInitKind::MaskFill;
    std::vector<TableRow> rows = run_table(spec);
    REQUIRE(rows.size() == 1);
    const TableRow& row = rows[0];
    CHECK(row.rank == 1);
    CHECK(row.missing_rate == 0.3);
    CHECK(row.trials == 2);
    CHECK(row.converged == 2);
    CHECK(row.mce <= 1e-3);
    CHECK(row.are <= 1e-3);
    CHECK(row.or_ratio > 1.0);
    CHECK(row.time_s >= 0.0);

    // Same spec, same numbers (wall time aside).
    std::vector<TableRow> again = run_table(spec);
    CHECK(again[0].mce == row.mce);
    CHECK(again[0].are == row.are);
    CHECK(again[0].converged == row.converged);
}

TEST_CASE("max_rank_search finds nothing at starvation and everything at full view") {
    MaxRankSpec starved;
    starved.n = 10;
    starved.missing_rates = {0.999};
    starved.trials = 2;
    starved.seed = 3;
    std::vector<MaxRankRow> rows = max_rank_search(starved);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].largest_rank == 0);

    MaxRankSpec full;
    full.n = 6;
    full.missing_rates = {0.0};
    full.trials = 2;
    full.seed = 3;
    std::vector<MaxRankRow> complete = max_rank_search(full);
    REQUIRE(complete.size() == 1);
    // Fully observed data recovers at every searched rank.
    CHECK(complete[0].largest_rank == 5);
}

TEST_CASE("run_sparse_figure delegates to the frequency counter") {
    SparseFigureSpec spec;
    spec.n = 12;
    spec.N = 24;
    spec.s_values = {2};
    spec.trials = 5;
    spec.seed = 11;
    std::vector<FrequencyRow> rows = run_sparse_figure(spec);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].s == 2);
    CHECK(rows[0].trials == 5);
    auto direct = recovery_frequency(12, 24, {2}, 5, spec.ensemble, 11, spec.success_tol,
                                     spec.success, spec.solver);
    CHECK(rows[0].successes == direct[0].successes);
}

TEST_CASE("synthetic_low_rank_image is deterministic and nearly low rank") {
    GrayImage img = synthetic_low_rank_image(48, 3, 21);
    CHECK(img.width == 48);
    CHECK(img.height == 48);
    CHECK(img.maxval == 255);
    REQUIRE(img.pixels.size() == 48u * 48u);
    for (int p : img.pixels) {
        CHECK(p >= 0);
        CHECK(p <= 255);
    }
    GrayImage again = synthetic_low_rank_image(48, 3, 21);
    CHECK(img.pixels == again.pixels);

    // Quantization aside, the pixel matrix is rank 3.
    Matrix M(48, 48);
    for (int i = 0; i < 48; ++i)
        for (int j = 0; j < 48; ++j)
            M(i, j) = img.pixels[static_cast<std::size_t>(i * 48 + j)] / 255.0;
    Eigen::JacobiSVD<Matrix> svd(M);
    CHECK(svd.singularValues()(3) <= 0.05 * svd.singularValues()(0));
}

TEST_CASE("image_recover restores a synthetic image from partial pixels") {
    ImageJob job;
    job.input = synthetic_low_rank_image(40, 2, 31);
    job.missing_rate = 0.4;
    job.rank = 2;
    job.seed = 32;
    ImageResult result = image_recover(job);
    CHECK(result.recovered.width == 40);
    CHECK(result.recovered.height == 40);
    CHECK(result.rmse <= 0.02);
    // Observed pixels survive in the masked preview; the rest are black.
    int black = 0;
    for (std::size_t p = 0; p < result.masked.pixels.size(); ++p) {
        int masked = result.masked.pixels[p];
        if (masked != 0) CHECK(masked == job.input.pixels[p]);
        if (masked == 0) ++black;
    }
    CHECK(black >= static_cast<int>(0.3 * 1600));
}

TEST_CASE("image_recover with nothing missing returns the input") {
    ImageJob job;
    job.input = synthetic_low_rank_image(24, 2, 41);
    job.missing_rate = 0.0;
    job.rank = 2;
    ImageResult result = image_recover(job);
    CHECK(result.rmse <= 1e-6);
    CHECK(result.recovered.pixels == job.input.pixels);
}

TEST_CASE("PGM files round-trip through write and read") {
    GrayImage img = synthetic_low_rank_image(17, 2, 51);
    const std::string path = tmp_path("roundtrip.pgm");
    write_pgm(path, img);
    GrayImage back = read_pgm(path);
    CHECK(back.width == img.width);
    CHECK(back.height == img.height);
    CHECK(back.maxval == img.maxval);
    CHECK(back.pixels == img.pixels);
}

TEST_CASE("ASCII PGM with comments is accepted") {
    const std::string path = tmp_path("ascii.pgm");
    {
        std::ofstream out(path);
        out << "P2 # plain text variant\n# full-line comment\n3 2\n255\n"
            << "0 128 255\n7 9 11\n";
    }
    GrayImage img = read_pgm(path);
    CHECK(img.width == 3);
    CHECK(img.height == 2);
    CHECK(img.pixels == std::vector<int>{0, 128, 255, 7, 9, 11});
}

TEST_CASE("malformed PGM files are rejected with the path in the message") {
    const std::string missing = tmp_path("nope.pgm");
    std::remove(missing.c_str());
    CHECK_THROWS_AS(read_pgm(missing), std::invalid_argument);

    const std::string bad_magic = tmp_path("bad_magic.pgm");
    {
        std::ofstream out(bad_magic);
        out << "P6\n2 2\n255\nxxxx";
    }
    CHECK_THROWS_AS(read_pgm(bad_magic), std::invalid_argument);

    const std::string deep = tmp_path("deep.pgm");
    {
        std::ofstream out(deep);
        out << "P2\n2 2\n65535\n0 1 2 3\n";
    }
    CHECK_THROWS_AS(read_pgm(deep), std::invalid_argument);

    const std::string truncated = tmp_path("short.pgm");
    {
        std::ofstream out(truncated, std::ios::binary);
        out << "P5\n4 4\n255\n";
        out << "abc";  // 3 of 16 payload bytes
    }
    CHECK_THROWS_AS(read_pgm(truncated), std::invalid_argument);

    try {
        read_pgm(truncated);
        FAIL("expected a throw");
    } catch (const std::invalid_argument& err) {
        CHECK(std::string(err.what()).find("short.pgm") != std::string::npos);
    }
}

TEST_CASE("matrix CSV round-trips doubles losslessly") {
    Matrix M(3, 3);
    M << 1.0 / 3.0, -2.718281828459045, 1e-17,
         6.02214076e23, -0.0001, 123456789.123456789,
         0.0, 5e-324, 1.7976931348623157e308;
    const std::string path = tmp_path("matrix.csv");
    write_matrix_csv(path, M);
    Matrix back = read_matrix_csv(path);
    REQUIRE(back.rows() == 3);
    REQUIRE(back.cols() == 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(back(i, j) == M(i, j));
}

TEST_CASE("matrix CSV reader rejects ragged and empty input") {
    const std::string ragged = tmp_path("ragged.csv");
    {
        std::ofstream out(ragged);
        out << "1,2,3\n4,5\n";
    }
    CHECK_THROWS_AS(read_matrix_csv(ragged), std::invalid_argument);

    const std::string empty = tmp_path("empty.csv");
    {
        std::ofstream out(empty);
    }
    CHECK_THROWS_AS(read_matrix_csv(empty), std::invalid_argument);

    const std::string garbled = tmp_path("garbled.csv");
    {
        std::ofstream out(garbled);
        out << "1,two,3\n";
    }
    CHECK_THROWS_AS(read_matrix_csv(garbled), std::invalid_argument);
}

TEST_CASE("vector files round-trip") {
    Vector v(4);
    v << 0.1, -2.5, 3e-9, 7.0;
    const std::string path = tmp_path("vector.txt");
    write_vector_file(path, v);
    Vector back = read_vector_file(path);
    REQUIRE(back.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(back(i) == v(i));
}

TEST_CASE("mask files are 1-based on disk and round-trip") {
    ObservationMask mask(3, 4, {{0, 0}, {1, 3}, {2, 2}});
    const std::string path = tmp_path("mask.csv");
    write_mask_file(path, mask);
    const std::string content = slurp(path);
    CHECK(content == "1,1\n2,4\n3,3\n");
    ObservationMask back = read_mask_file(path, 3, 4);
    CHECK(back.known() == mask.known());

    const std::string bad = tmp_path("bad_mask.csv");
    {
        std::ofstream out(bad);
        out << "4,1\n";  // row index beyond a 3-row matrix
    }
    CHECK_THROWS_AS(read_mask_file(bad, 3, 4), std::invalid_argument);
    {
        std::ofstream out(bad);
        out << "0,1\n";  // 1-based files cannot contain a zero
    }
    CHECK_THROWS_AS(read_mask_file(bad, 3, 4), std::invalid_argument);
}

TEST_CASE("trace CSV layout with and without truth columns") {
    CompletionTrace trace;
    trace.step_norm = {0.5, 0.25};
    trace.gap_norm = {1.0, 0.5};
    trace.offmask_gap = {0.5, 0.25};
    trace.post_gap = {0.8, 0.4};
    const std::string path = tmp_path("trace.csv");
    write_trace_csv(path, trace);
    CHECK(slurp(path) ==
          "k,step_norm,gap_norm,offmask_gap,truth_mce,truth_fro\n"
          "0,0.5,1,0.5,,\n"
          "1,0.25,0.5,0.25,,\n");

    trace.truth_mce = {0.1, 0.05};
    trace.truth_fro = {0.2, 0.1};
    write_trace_csv(path, trace);
    CHECK(slurp(path) ==
          "k,step_norm,gap_norm,offmask_gap,truth_mce,truth_fro\n"
          "0,0.5,1,0.5,0.1,0.2\n"
          "1,0.25,0.5,0.25,0.05,0.1\n");
}

TEST_CASE("frequency CSV layout") {
    std::vector<FrequencyRow> rows(2);
    rows[0] = {10, 45, 50, 0.9};
    rows[1] = {120, 2, 50, 0.04};
    const std::string path = tmp_path("freq.csv");
    write_frequency_csv(path, rows);
    CHECK(slurp(path) ==
          "s,successes,trials,frequency\n"
          "10,45,50,0.9\n"
          "120,2,50,0.04\n");
}

TEST_CASE("table and max-rank CSV headers are stable") {
    TableRow row;
    row.rank = 2;
    row.missing_rate = 0.8;
    row.or_ratio = 5.05;
    row.mce = 1e-4;
    row.are = 1e-5;
    row.time_s = 0.25;
    row.seed = 42;
    row.converged = 20;
    row.trials = 20;
    const std::string table_path = tmp_path("table.csv");
    write_table_csv(table_path, {row});
    const std::string table = slurp(table_path);
    CHECK(table.rfind("rank,missing_rate,or_ratio,mce,are,time_s,seed,converged,trials\n", 0) == 0);
    CHECK(table.find("\n2,0.8,5.05,") != std::string::npos);

    MaxRankRow mr;
    mr.missing_rate = 0.5;
    mr.largest_rank = 7;
    mr.trials = 10;
    mr.seed = 9;
    const std::string mr_path = tmp_path("maxrank.csv");
    write_maxrank_csv(mr_path, {mr});
    CHECK(slurp(mr_path) ==
          "missing_rate,largest_rank,trials,seed\n"
          "0.5,7,10,9\n");
}

TEST_CASE("format_real prints shortest lossless decimal") {
    CHECK(format_real(0.0) == "0");
    CHECK(format_real(1.0) == "1");
    CHECK(format_real(0.5) == "0.5");
    for (double v : {1.0 / 3.0, 2.5e-9, -7.625, 1e300, 5e-324}) {
        CHECK(std::stod(format_real(v)) == v);
    }
}
