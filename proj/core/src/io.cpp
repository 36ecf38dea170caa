#include "explorer/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "explorer/error.hpp"

namespace explorer {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto pos = text.find('\n');
    lines.push_back(text.substr(0, pos));
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return lines;
}

}  // namespace

std::string format_number(double value) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw Error(ErrorCode::kNumerical, "failed to format number");
  return std::string(buf.data(), end);
}

double parse_number(std::string_view field, std::string_view context) {
  const auto t = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw Error(ErrorCode::kParse, std::string(context) + ": expected a number, got '" +
                                       std::string(t) + "'");
  }
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = line.find(sep);
    out.push_back(line.substr(0, pos));
    if (pos == std::string_view::npos) break;
    line.remove_prefix(pos + 1);
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  std::string text;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) text += ',';
      text += format_number(m(r, c));
    }
    text += '\n';
  }
  write_text_file(path, text);
}

Matrix read_matrix_csv(const std::filesystem::path& path, std::string_view name) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kIo, "matrix " + std::string(name) + ": " + e.what());
  }
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  for (auto line : split_lines(text)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<double> row;
    for (auto field : split_fields(line)) {
      row.push_back(parse_number(field, "matrix " + std::string(name) + " line " +
                                            std::to_string(line_no)));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::kParse, "matrix " + std::string(name) + " line " +
                                         std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  const auto cols = rows.empty() ? 0 : rows.front().size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

std::filesystem::path trace_sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  return p;
}

std::string trace_to_csv(const DataTrace& trace) {
  const auto n = trace.state_dim();
  const auto w = trace.input_dim();
  std::string text = "t";
  for (std::size_t i = 0; i < n; ++i) text += ",x" + std::to_string(i);
  for (std::size_t i = 0; i < w; ++i) text += ",u" + std::to_string(i);
  text += '\n';
  for (std::size_t k = 0; k < trace.states.size(); ++k) {
    text += format_number(static_cast<double>(k) * trace.dt);
    for (Eigen::Index i = 0; i < trace.states[k].size(); ++i) {
      text += ',' + format_number(trace.states[k][i]);
    }
    for (std::size_t i = 0; i < w; ++i) {
      text += ',';
      if (k < trace.inputs.size()) text += format_number(trace.inputs[k][static_cast<Eigen::Index>(i)]);
    }
    text += '\n';
  }
  return text;
}

void write_trace(const std::filesystem::path& csv_path, const DataTrace& trace) {
  trace.validate();
  write_text_file(csv_path, trace_to_csv(trace));
  nlohmann::ordered_json manifest;
  manifest["n"] = trace.state_dim();
  manifest["w"] = trace.input_dim();
  manifest["dt"] = trace.dt;
  manifest["seed"] = trace.seed;
  manifest["origin"] = std::string(to_string(trace.origin));
  write_text_file(trace_sidecar_path(csv_path), manifest.dump(2) + "\n");
}

DataTrace parse_trace_csv(std::string_view text, std::string_view source) {
  const auto lines = split_lines(text);
  const auto where = [&](std::size_t row) {
    return std::string(source) + " row " + std::to_string(row);
  };
  if (lines.empty() || trim(lines.front()).empty()) {
    throw Error(ErrorCode::kParse, std::string(source) + ": missing header");
  }
  const auto header = split_fields(trim(lines.front()));
  if (trim(header.front()) != "t") {
    throw Error(ErrorCode::kParse, where(1) + ": header must start with 't'");
  }
  std::size_t n = 0;
  std::size_t w = 0;
  for (std::size_t i = 1; i < header.size(); ++i) {
    const auto name = trim(header[i]);
    if (w == 0 && name == "x" + std::to_string(n)) {
      ++n;
    } else if (name == "u" + std::to_string(w)) {
      ++w;
    } else {
      throw Error(ErrorCode::kParse, where(1) + ": unexpected column '" + std::string(name) + "'");
    }
  }
  if (n == 0) throw Error(ErrorCode::kParse, where(1) + ": no state columns");

  DataTrace trace;
  std::vector<double> times;
  bool ended = false;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto line = trim(lines[li]);
    if (line.empty()) continue;
    const auto row = li + 1;
    if (ended) throw Error(ErrorCode::kParse, where(row) + ": row after the final (input-free) row");
    const auto fields = split_fields(line);
    if (fields.size() != 1 + n + w) {
      throw Error(ErrorCode::kParse, where(row) + ": expected " + std::to_string(1 + n + w) +
                                         " fields, got " + std::to_string(fields.size()));
    }
    times.push_back(parse_number(fields[0], where(row)));
    State x(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) x[static_cast<Eigen::Index>(i)] = parse_number(fields[1 + i], where(row));
    trace.states.push_back(std::move(x));
    std::size_t empty = 0;
    for (std::size_t i = 0; i < w; ++i) empty += trim(fields[1 + n + i]).empty() ? 1 : 0;
    if (w > 0 && empty == w) {
      ended = true;
    } else if (empty != 0) {
      throw Error(ErrorCode::kParse, where(row) + ": partially empty input columns");
    } else if (w > 0) {
      ControlInput u(static_cast<Eigen::Index>(w));
      for (std::size_t i = 0; i < w; ++i) u[static_cast<Eigen::Index>(i)] = parse_number(fields[1 + n + i], where(row));
      trace.inputs.push_back(std::move(u));
    }
  }
  if (trace.states.empty()) throw Error(ErrorCode::kParse, std::string(source) + ": no data rows");
  if (w > 0 && !ended) {
    throw Error(ErrorCode::kParse, std::string(source) + ": final row must have empty input columns");
  }
  if (w == 0) {
    // Input-free traces (e.g. bare state sets) carry zero-width inputs.
    trace.inputs.assign(trace.states.size() - 1, ControlInput(0));
  }
  trace.dt = times.size() >= 2 && times[1] > times[0] ? times[1] - times[0] : 1.0;
  return trace;
}

DataTrace read_trace(const std::filesystem::path& csv_path) {
  auto trace = parse_trace_csv(read_text_file(csv_path), csv_path.string());
  const auto sidecar = trace_sidecar_path(csv_path);
  if (std::filesystem::exists(sidecar)) {
    nlohmann::json manifest;
    try {
      manifest = nlohmann::json::parse(read_text_file(sidecar));
      if (manifest.at("n").get<std::size_t>() != trace.state_dim() ||
          (trace.steps() > 0 && manifest.at("w").get<std::size_t>() != trace.input_dim())) {
        throw Error(ErrorCode::kDimensionMismatch,
                    sidecar.string() + ": manifest dimensions disagree with the CSV header");
      }
      trace.dt = manifest.at("dt").get<double>();
      trace.seed = manifest.at("seed").get<std::uint64_t>();
      trace.origin = parse_trace_origin(manifest.at("origin").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, sidecar.string() + ": " + e.what());
    }
  }
  trace.validate();
  return trace;
}

}  // namespace explorer
