#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "explorer/core.hpp"

namespace explorer {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_number(double value);

/// Strict double parse of a whole field (surrounding blanks allowed).
/// Throws ErrorCode::kParse mentioning `context` on failure.
double parse_number(std::string_view field, std::string_view context);

std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Dense matrix as comma-separated rows, round-trip exact.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
/// `name` identifies the matrix in error messages.
Matrix read_matrix_csv(const std::filesystem::path& path, std::string_view name);

/// Trace CSV: header `t,x0..x{n-1},u0..u{w-1}`, one row per state, the final
/// row carrying empty input columns. A sidecar `<stem>.json` records n, w, dt,
/// seed and origin.
void write_trace(const std::filesystem::path& csv_path, const DataTrace& trace);
std::string trace_to_csv(const DataTrace& trace);
DataTrace read_trace(const std::filesystem::path& csv_path);
DataTrace parse_trace_csv(std::string_view text, std::string_view source);

std::filesystem::path trace_sidecar_path(const std::filesystem::path& csv_path);

}  // namespace explorer
