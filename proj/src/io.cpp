#include "mvfuse/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace mvfuse::io {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

bool is_separator(char c) { return c == ',' || c == ' ' || c == '\t' || c == '\r' || c == ';'; }

template <typename T>
std::vector<T> parse_fields(const std::string& line, const std::filesystem::path& path, std::size_t line_no) {
    std::vector<T> out;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
        while (p < end && is_separator(*p)) ++p;
        if (p == end) break;
        const char* field_end = p;
        while (field_end < end && !is_separator(*field_end)) ++field_end;
        T value{};
        const char* first = (*p == '+') ? p + 1 : p;
        auto [ptr, ec] = std::from_chars(first, field_end, value);
        if (ec != std::errc() || ptr != field_end) {
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": cannot parse '" +
                             std::string(p, field_end) + "'");
        }
        out.push_back(value);
        p = field_end;
    }
    return out;
}

} // namespace

Matrix read_matrix_csv(const std::filesystem::path& path, bool skip_header) {
    auto in = open_input(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (skip_header && line_no == 1) continue;
        auto fields = parse_fields<double>(line, path, line_no);
        if (fields.empty()) continue;
        if (!rows.empty() && fields.size() != rows.front().size())
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(rows.front().size()) + " fields, found " + std::to_string(fields.size()));
        rows.push_back(std::move(fields));
    }
    if (rows.empty()) throw InputError("'" + path.string() + "' contains no data rows");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    if (!m.allFinite()) throw InputError("'" + path.string() + "' contains non-finite values");
    return m;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
    auto out = open_output(path);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c > 0) out << ',';
            out << format_double(m(r, c));
        }
        out << '\n';
    }
}

Labels read_labels(const std::filesystem::path& path) {
    auto in = open_input(path);
    Labels labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        for (int v : parse_fields<int>(line, path, line_no)) labels.push_back(v);
    }
    if (labels.empty()) throw InputError("'" + path.string() + "' contains no labels");
    return labels;
}

void write_labels(const std::filesystem::path& path, const Labels& labels) {
    auto out = open_output(path);
    for (int label : labels) out << label << '\n';
}

void write_edge_list(const std::filesystem::path& path, const graphs::SparseViewGraph& g) {
    auto out = open_output(path);
    for (const auto& e : g.edges()) out << e.i << '\t' << e.j << '\t' << format_double(e.weight) << '\n';
}

std::string format_double(double x) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    (void)ec;
    return std::string(buf.data(), ptr);
}

} // namespace mvfuse::io
