#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "asyncopt/rng.hpp"

namespace asyncopt::net {

/// Nonlinearity applied after every hidden layer. The last layer is always
/// linear.
enum class Activation { Tanh, Relu, Identity };

const char* to_string(Activation activation);
Activation activation_from_string(const std::string& name);

/// One dense layer: `rows` outputs, `cols` inputs.
struct LayerShape {
  int rows = 0;
  int cols = 0;
  bool has_bias = true;

  std::size_t parameter_count() const {
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) +
           (has_bias ? static_cast<std::size_t>(rows) : 0);
  }
  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

/// Flat parameter vector of a feedforward net plus its shape manifest.
///
/// Layout: for each layer in order, the row-major weight matrix
/// (rows x cols) followed by the bias vector (rows) when present.
struct ParamSet {
  std::vector<double> values;
  std::vector<LayerShape> shapes;
  Activation activation = Activation::Tanh;

  std::size_t size() const { return values.size(); }
  int input_size() const;
  int output_size() const;

  /// Throws DimensionError if `values` disagrees with the manifest or
  /// consecutive layers do not chain.
  void validate() const;

  static std::size_t expected_length(std::span<const LayerShape> shapes);
};

/// Same length and layout as the ParamSet it was computed for.
struct Gradient {
  std::vector<double> values;

  static Gradient zeros_like(const ParamSet& params) {
    return Gradient{std::vector<double>(params.size(), 0.0)};
  }
};

/// Per-layer outputs retained by a forward pass; `layers[0]` is the input and
/// `layers.back()` the network output. Hidden entries hold post-activation
/// values.
struct ForwardTrace {
  std::vector<std::vector<double>> layers;

  const std::vector<double>& output() const { return layers.back(); }
};

std::vector<double> forward(const ParamSet& params, std::span<const double> input);

ForwardTrace forward_trace(const ParamSet& params, std::span<const double> input);

/// Gradient of <forward(params, input), output_grad> with respect to every
/// parameter.
Gradient backward(const ParamSet& params, std::span<const double> input,
                  std::span<const double> output_grad);

/// Accumulates the same gradient into `grad` (which must have the ParamSet's
/// length) reusing an existing trace.
void backward_accumulate(const ParamSet& params, const ForwardTrace& trace,
                         std::span<const double> output_grad, std::span<double> grad);

/// Builds an MLP with layer widths `widths` (input first, output last).
/// Weights are drawn uniformly with variance gain^2 / fan_in; biases start at
/// zero. `output_gain` replaces `hidden_gain` on the last layer.
ParamSet make_mlp(std::span<const int> widths, Activation activation, double hidden_gain,
                  double output_gain, Rng& rng);

}  // namespace asyncopt::net
