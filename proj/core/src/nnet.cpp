#include "explorer/nnet.hpp"

#include <algorithm>
#include <optional>

#include "explorer/error.hpp"
#include "explorer/io.hpp"

namespace explorer {

namespace {

struct NumberLine {
  std::size_t line_no = 0;
  std::vector<double> values;
};

std::vector<NumberLine> numeric_lines(std::string_view text) {
  std::vector<NumberLine> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto pos = text.find('\n');
    auto line = text.substr(0, pos);
    text = pos == std::string_view::npos ? std::string_view{} : text.substr(pos + 1);
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (line.empty() || line.starts_with("//")) continue;
    NumberLine nl{line_no, {}};
    auto fields = split_fields(line);
    if (!fields.empty() && fields.back().find_first_not_of(" \t") == std::string_view::npos) fields.pop_back();
    for (auto f : fields) nl.values.push_back(parse_number(f, "nnet line " + std::to_string(line_no)));
    out.push_back(std::move(nl));
  }
  return out;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kParse, "nnet line " + std::to_string(line_no) + ": " + what);
}

std::size_t as_count(double v, std::size_t line_no) {
  if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v))) fail(line_no, "expected a positive integer");
  return static_cast<std::size_t>(v);
}

}  // namespace

void NNetNetwork::validate() const {
  if (layer_sizes.size() < 2) throw Error(ErrorCode::kParse, "network needs at least an input and an output layer");
  if (weights.size() + 1 != layer_sizes.size() || biases.size() + 1 != layer_sizes.size()) {
    throw Error(ErrorCode::kParse, "network layer count does not match its weights");
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (static_cast<std::size_t>(weights[i].rows()) != layer_sizes[i + 1] ||
        static_cast<std::size_t>(weights[i].cols()) != layer_sizes[i] ||
        static_cast<std::size_t>(biases[i].size()) != layer_sizes[i + 1]) {
      throw Error(ErrorCode::kParse, "layer " + std::to_string(i) + " breaks the dimension chain");
    }
  }
  const auto in = static_cast<Eigen::Index>(input_size());
  if (input_min.size() != in || input_max.size() != in || input_mean.size() != in || input_range.size() != in) {
    throw Error(ErrorCode::kParse, "normalisation vectors must match the input size");
  }
}

Vector NNetNetwork::normalize(const Vector& x) const {
  if (x.size() != input_min.size()) throw Error(ErrorCode::kDimensionMismatch, "network input has the wrong size");
  Vector z(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double clipped = std::clamp(x[i], input_min[i], input_max[i]);
    z[i] = (clipped - input_mean[i]) / input_range[i];
  }
  return z;
}

Vector NNetNetwork::evaluate_normalized(const Vector& z) const {
  if (static_cast<std::size_t>(z.size()) != input_size()) {
    throw Error(ErrorCode::kDimensionMismatch, "network input has the wrong size");
  }
  Vector a = z;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    a = weights[i] * a + biases[i];
    if (i + 1 < weights.size()) a = a.cwiseMax(0.0);
  }
  return a * output_range + Vector::Constant(a.size(), output_mean);
}

Vector NNetNetwork::evaluate(const Vector& x) const { return evaluate_normalized(normalize(x)); }

NNetNetwork parse_nnet(std::string_view text) {
  const auto lines = numeric_lines(text);
  std::size_t cursor = 0;
  const auto next = [&](const char* what) -> const NumberLine& {
    if (cursor >= lines.size()) {
      const auto last = lines.empty() ? 0 : lines.back().line_no;
      fail(last + 1, std::string("unexpected end of file, expected ") + what);
    }
    return lines[cursor++];
  };

  NNetNetwork net;
  const auto& head = next("header");
  if (head.values.size() < 4) fail(head.line_no, "header needs numLayers,inputSize,outputSize,maxLayerSize");
  const auto layers = as_count(head.values[0], head.line_no);
  const auto inputs = as_count(head.values[1], head.line_no);
  const auto outputs = as_count(head.values[2], head.line_no);

  const auto& sizes = next("layer sizes");
  if (sizes.values.size() != layers + 1) {
    fail(sizes.line_no, "expected " + std::to_string(layers + 1) + " layer sizes, got " +
                            std::to_string(sizes.values.size()));
  }
  for (double v : sizes.values) net.layer_sizes.push_back(as_count(v, sizes.line_no));
  if (net.layer_sizes.front() != inputs || net.layer_sizes.back() != outputs) {
    fail(sizes.line_no, "layer sizes disagree with the header");
  }
  next("legacy flag line");

  const auto read_norm = [&](const char* what, bool with_output) {
    const auto& nl = next(what);
    const bool has_output = nl.values.size() == inputs + 1;
    if (nl.values.size() != inputs && !(with_output && has_output)) {
      fail(nl.line_no, std::string(what) + ": expected " + std::to_string(inputs) + " values, got " +
                           std::to_string(nl.values.size()));
    }
    Vector v(static_cast<Eigen::Index>(inputs));
    for (std::size_t i = 0; i < inputs; ++i) v[static_cast<Eigen::Index>(i)] = nl.values[i];
    return std::pair{v, has_output ? nl.values.back() : std::optional<double>{}};
  };
  net.input_min = read_norm("input minimums", false).first;
  net.input_max = read_norm("input maximums", false).first;
  auto [mean, out_mean] = read_norm("input means", true);
  auto [range, out_range] = read_norm("input ranges", true);
  net.input_mean = mean;
  net.input_range = range;
  net.output_mean = out_mean.value_or(0.0);
  net.output_range = out_range.value_or(1.0);

  for (std::size_t layer = 0; layer < layers; ++layer) {
    const auto rows = net.layer_sizes[layer + 1];
    const auto cols = net.layer_sizes[layer];
    Matrix W(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
      const auto& nl = next("weight row");
      if (nl.values.size() != cols) {
        fail(nl.line_no, "weight row of layer " + std::to_string(layer) + " has " + std::to_string(nl.values.size()) +
                             " values, expected " + std::to_string(cols));
      }
      for (std::size_t c = 0; c < cols; ++c) W(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = nl.values[c];
    }
    Vector b(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
      const auto& nl = next("bias");
      if (nl.values.size() != 1) fail(nl.line_no, "bias line must hold exactly one value");
      b[static_cast<Eigen::Index>(r)] = nl.values.front();
    }
    net.weights.push_back(std::move(W));
    net.biases.push_back(std::move(b));
  }
  if (cursor != lines.size()) fail(lines[cursor].line_no, "trailing data after the last layer");
  net.validate();
  return net;
}

NNetNetwork load_nnet(const std::string& path) {
  try {
    return parse_nnet(read_text_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string to_nnet_text(const NNetNetwork& network, std::string_view comment) {
  network.validate();
  std::string text;
  if (!comment.empty()) text += "// " + std::string(comment) + "\n";
  std::size_t widest = 0;
  for (auto s : network.layer_sizes) widest = std::max(widest, s);
  text += std::to_string(network.weights.size()) + "," + std::to_string(network.input_size()) + "," +
          std::to_string(network.output_size()) + "," + std::to_string(widest) + ",\n";
  for (auto s : network.layer_sizes) text += std::to_string(s) + ",";
  text += "\n0,\n";
  const auto row = [&](const Vector& v, std::optional<double> extra) {
    for (Eigen::Index i = 0; i < v.size(); ++i) text += format_number(v[i]) + ",";
    if (extra) text += format_number(*extra) + ",";
    text += "\n";
  };
  row(network.input_min, {});
  row(network.input_max, {});
  row(network.input_mean, network.output_mean);
  row(network.input_range, network.output_range);
  for (std::size_t l = 0; l < network.weights.size(); ++l) {
    for (Eigen::Index r = 0; r < network.weights[l].rows(); ++r) row(network.weights[l].row(r).transpose(), {});
    for (Eigen::Index r = 0; r < network.biases[l].size(); ++r) text += format_number(network.biases[l][r]) + ",\n";
  }
  return text;
}

}  // namespace explorer
