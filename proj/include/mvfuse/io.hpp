#pragma once

#include "mvfuse/common.hpp"
#include "mvfuse/graphs.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace mvfuse::io {

/// Unreadable or unparsable input file.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numeric CSV with rows of equal length. Commas, tabs or spaces separate
/// fields; blank lines are skipped; `skip_header` drops the first line.
Matrix read_matrix_csv(const std::filesystem::path& path, bool skip_header = false);

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

/// Integer labels separated by commas, whitespace or newlines.
Labels read_labels(const std::filesystem::path& path);

void write_labels(const std::filesystem::path& path, const Labels& labels);

/// `i<TAB>j<TAB>weight` per edge, 0-based, weight in shortest round-trip form.
void write_edge_list(const std::filesystem::path& path, const graphs::SparseViewGraph& g);

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

} // namespace mvfuse::io
