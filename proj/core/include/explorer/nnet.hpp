#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "explorer/core.hpp"

namespace explorer {

/// Fully connected ReLU network in the NNet interchange layout: ReLU on
/// hidden layers, linear output, min/max clipping and mean/range scaling of
/// the inputs, mean/range rescaling of the outputs.
struct NNetNetwork {
  std::vector<std::size_t> layer_sizes;  // input, hidden..., output
  std::vector<Matrix> weights;           // weights[i]: sizes[i+1] x sizes[i]
  std::vector<Vector> biases;
  Vector input_min;
  Vector input_max;
  Vector input_mean;
  Vector input_range;
  double output_mean = 0.0;
  double output_range = 1.0;

  std::size_t input_size() const { return layer_sizes.front(); }
  std::size_t output_size() const { return layer_sizes.back(); }

  /// Throws ErrorCode::kParse when the layer chain or normalisation sizes
  /// are inconsistent.
  void validate() const;

  /// Clip to [min, max], then (x - mean) / range.
  Vector normalize(const Vector& x) const;
  /// Forward pass on already-normalised inputs, outputs rescaled.
  Vector evaluate_normalized(const Vector& z) const;
  Vector evaluate(const Vector& x) const;
};

/// Parses NNet text. Errors name the offending line.
NNetNetwork parse_nnet(std::string_view text);
NNetNetwork load_nnet(const std::string& path);

/// Serialises a network in the same layout parse_nnet reads.
std::string to_nnet_text(const NNetNetwork& network, std::string_view comment = {});

}  // namespace explorer
