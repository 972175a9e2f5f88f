#include "apkit/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace apkit {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& why) {
    throw std::invalid_argument(path + ": " + why);
}

std::ifstream open_in(const std::string& path, bool binary = false) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) {
        fail(path, "cannot open for reading");
    }
    return in;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) {
        fail(path, "cannot open for writing");
    }
    return out;
}

double parse_real(const std::string& token, const std::string& path, int line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        while (used < token.size() &&
               std::isspace(static_cast<unsigned char>(token[used]))) {
            ++used;
        }
        if (used != token.size()) {
            fail(path, "line " + std::to_string(line_no) + ": trailing characters in '" +
                           token + "'");
        }
        return v;
    } catch (const std::logic_error&) {
        fail(path, "line " + std::to_string(line_no) + ": cannot parse '" + token +
                       "' as a number");
    }
}

bool blank(const std::string& line) {
    return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

} // namespace

std::string format_real(double v) {
    char buffer[40];
    // Shortest of 15..17 significant digits that parses back to the same
    // double; 17 always does.
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buffer, sizeof(buffer), "%.*g", precision, v);
        if (std::strtod(buffer, nullptr) == v) {
            break;
        }
    }
    return buffer;
}

Matrix read_matrix_csv(const std::string& path) {
    auto in = open_in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) {
            continue;
        }
        std::vector<double> row;
        std::stringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            row.push_back(parse_real(cell, path, line_no));
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            fail(path, "line " + std::to_string(line_no) + ": expected " +
                           std::to_string(rows.front().size()) + " values, got " +
                           std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        fail(path, "no matrix rows found");
    }
    Matrix M(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (int i = 0; i < M.rows(); ++i) {
        for (int j = 0; j < M.cols(); ++j) {
            M(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    }
    require_finite(M, path);
    return M;
}

void write_matrix_csv(const std::string& path, const Matrix& A) {
    auto out = open_out(path);
    for (int i = 0; i < A.rows(); ++i) {
        for (int j = 0; j < A.cols(); ++j) {
            if (j > 0) {
                out << ',';
            }
            out << format_real(A(i, j));
        }
        out << '\n';
    }
}

Vector read_vector_file(const std::string& path) {
    auto in = open_in(path);
    std::vector<double> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) {
            continue;
        }
        values.push_back(parse_real(line, path, line_no));
    }
    if (values.empty()) {
        fail(path, "no values found");
    }
    Vector v(static_cast<int>(values.size()));
    for (int i = 0; i < v.size(); ++i) {
        v[i] = values[static_cast<std::size_t>(i)];
    }
    require_finite(v, path);
    return v;
}

void write_vector_file(const std::string& path, const Vector& v) {
    auto out = open_out(path);
    for (int i = 0; i < v.size(); ++i) {
        out << format_real(v[i]) << '\n';
    }
}

ObservationMask read_mask_file(const std::string& path, int rows, int cols) {
    auto in = open_in(path);
    std::vector<std::pair<int, int>> known;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) {
            continue;
        }
        std::stringstream cells(line);
        std::string cell;
        std::vector<long> pair;
        while (std::getline(cells, cell, ',')) {
            const double v = parse_real(cell, path, line_no);
            const long index = static_cast<long>(v);
            if (static_cast<double>(index) != v) {
                fail(path, "line " + std::to_string(line_no) + ": index '" + cell +
                               "' is not an integer");
            }
            pair.push_back(index);
        }
        if (pair.size() != 2) {
            fail(path, "line " + std::to_string(line_no) +
                           ": expected exactly 'i,j' (1-based)");
        }
        known.emplace_back(static_cast<int>(pair[0] - 1), static_cast<int>(pair[1] - 1));
    }
    if (known.empty()) {
        fail(path, "no mask positions found");
    }
    try {
        return ObservationMask(rows, cols, std::move(known));
    } catch (const std::invalid_argument& err) {
        fail(path, err.what());
    }
}

void write_mask_file(const std::string& path, const ObservationMask& mask) {
    auto out = open_out(path);
    for (const auto& [i, j] : mask.known()) {
        out << (i + 1) << ',' << (j + 1) << '\n';
    }
}

void write_trace_csv(const std::string& path, const CompletionTrace& trace) {
    auto out = open_out(path);
    out << "k,step_norm,gap_norm,offmask_gap,truth_mce,truth_fro\n";
    const bool with_truth = !trace.truth_mce.empty();
    for (std::size_t k = 0; k < trace.size(); ++k) {
        out << k << ',' << format_real(trace.step_norm[k]) << ','
            << format_real(trace.gap_norm[k]) << ','
            << format_real(trace.offmask_gap[k]) << ',';
        if (with_truth) {
            out << format_real(trace.truth_mce[k]) << ','
                << format_real(trace.truth_fro[k]);
        } else {
            out << ',';
        }
        out << '\n';
    }
}

void write_frequency_csv(const std::string& path,
                         const std::vector<FrequencyRow>& rows) {
    auto out = open_out(path);
    out << "s,successes,trials,frequency\n";
    for (const auto& row : rows) {
        out << row.s << ',' << row.successes << ',' << row.trials << ','
            << format_real(row.frequency) << '\n';
    }
}

GrayImage read_pgm(const std::string& path) {
    auto in = open_in(path, /*binary=*/true);
    // Header tokens (magic, width, height, maxval) separated by whitespace,
    // with '#' comments running to end of line.
    auto next_token = [&]() -> std::string {
        std::string token;
        int c;
        while ((c = in.get()) != EOF) {
            if (c == '#') {
                while ((c = in.get()) != EOF && c != '\n') {
                }
            } else if (!std::isspace(c)) {
                token.push_back(static_cast<char>(c));
                while ((c = in.get()) != EOF && !std::isspace(c) && c != '#') {
                    token.push_back(static_cast<char>(c));
                }
                if (c == '#') {
                    while ((c = in.get()) != EOF && c != '\n') {
                    }
                }
                return token;
            }
        }
        fail(path, "truncated PGM header");
    };
    const std::string magic = next_token();
    if (magic != "P2" && magic != "P5") {
        fail(path, "unsupported format '" + magic + "' (need P2 or P5 grayscale)");
    }
    auto next_int = [&](const char* what) {
        const std::string token = next_token();
        try {
            return std::stoi(token);
        } catch (const std::logic_error&) {
            fail(path, std::string("cannot parse ") + what + " from '" + token + "'");
        }
    };
    GrayImage image;
    image.width = next_int("width");
    image.height = next_int("height");
    image.maxval = next_int("maxval");
    if (image.width <= 0 || image.height <= 0) {
        fail(path, "image dimensions must be positive");
    }
    if (image.maxval <= 0 || image.maxval > 255) {
        fail(path, "maxval " + std::to_string(image.maxval) + " unsupported (need 1..255)");
    }
    const std::size_t total =
        static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.height);
    image.pixels.reserve(total);
    if (magic == "P2") {
        for (std::size_t k = 0; k < total; ++k) {
            image.pixels.push_back(next_int("pixel"));
        }
    } else {
        // The maxval token is followed by exactly one whitespace byte, already
        // consumed by the tokenizer.
        std::vector<char> raw(total);
        in.read(raw.data(), static_cast<std::streamsize>(total));
        if (static_cast<std::size_t>(in.gcount()) != total) {
            fail(path, "truncated P5 pixel data");
        }
        for (char byte : raw) {
            image.pixels.push_back(static_cast<unsigned char>(byte));
        }
    }
    for (int p : image.pixels) {
        if (p < 0 || p > image.maxval) {
            fail(path, "pixel value " + std::to_string(p) + " outside [0, maxval]");
        }
    }
    return image;
}

void write_pgm(const std::string& path, const GrayImage& image) {
    if (image.width <= 0 || image.height <= 0 || image.maxval <= 0 ||
        image.maxval > 255 ||
        image.pixels.size() != static_cast<std::size_t>(image.width) *
                                   static_cast<std::size_t>(image.height)) {
        throw std::invalid_argument("malformed image payload");
    }
    auto out = open_out(path, /*binary=*/true);
    out << "P5\n" << image.width << ' ' << image.height << '\n' << image.maxval << '\n';
    for (int p : image.pixels) {
        if (p < 0 || p > image.maxval) {
            throw std::invalid_argument("pixel value outside [0, maxval]");
        }
        out.put(static_cast<char>(p));
    }
}

} // namespace apkit
