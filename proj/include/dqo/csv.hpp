#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "dqo/types.hpp"

namespace dqo::csv {

/// Shortest-round-trip is not guaranteed by every libc, so every value is
/// written with 17 significant digits, which always round-trips a double.
std::string format_double(double value);

/// Appends ",v1,v2,..." for each entry of the row.
void append_row(std::string& line, const Eigen::Ref<const RowVector>& row);

/// Plain matrix file: one line per row, comma separated, no header.
void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& path);
Matrix parse_matrix(std::string_view text);

}  // namespace dqo::csv
