#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <map>
#include <string>

namespace vamp::csv {

/// Parse a comma-separated numeric file into a matrix. Column count is
/// fixed by the first row; ragged rows or non-numeric cells are errors.
/// Fields are whitespace-trimmed and parsed locale-independently.
Eigen::MatrixXd read_matrix(const std::filesystem::path& file);

/// Write a matrix with shortest round-trip formatting, one row per line.
void write_matrix(const std::filesystem::path& file, const Eigen::MatrixXd& m);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

/// Locale-independent parse; throws data_error on failure.
double parse_double(std::string_view text);

/// Read `key=value` lines (e.g. meta.txt). Unknown keys are kept.
std::map<std::string, std::string> read_key_values(const std::filesystem::path& file);

void write_key_values(const std::filesystem::path& file,
                      const std::map<std::string, std::string>& entries);

} // namespace vamp::csv
