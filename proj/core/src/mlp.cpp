#include "asyncopt/net/mlp.hpp"

#include <cmath>

#include <fmt/format.h>

#include "asyncopt/error.hpp"

namespace asyncopt::net {

namespace {

double activate(Activation activation, double x) {
  switch (activation) {
    case Activation::Tanh:
      return std::tanh(x);
    case Activation::Relu:
      return x > 0.0 ? x : 0.0;
    case Activation::Identity:
      return x;
  }
  return x;
}

// Derivative expressed through the post-activation value y.
double activate_derivative(Activation activation, double y) {
  switch (activation) {
    case Activation::Tanh:
      return 1.0 - y * y;
    case Activation::Relu:
      return y > 0.0 ? 1.0 : 0.0;
    case Activation::Identity:
      return 1.0;
  }
  return 1.0;
}

}  // namespace

const char* to_string(Activation activation) {
  switch (activation) {
    case Activation::Tanh:
      return "tanh";
    case Activation::Relu:
      return "relu";
    case Activation::Identity:
      return "identity";
  }
  return "unknown";
}

Activation activation_from_string(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "relu") return Activation::Relu;
  if (name == "identity") return Activation::Identity;
  throw ConfigError(fmt::format("unknown activation '{}'", name));
}

std::size_t ParamSet::expected_length(std::span<const LayerShape> shapes) {
  std::size_t total = 0;
  for (const auto& shape : shapes) total += shape.parameter_count();
  return total;
}

int ParamSet::input_size() const { return shapes.empty() ? 0 : shapes.front().cols; }

int ParamSet::output_size() const { return shapes.empty() ? 0 : shapes.back().rows; }

void ParamSet::validate() const {
  if (shapes.empty()) throw DimensionError("parameter set has no layers");
  for (std::size_t l = 0; l < shapes.size(); ++l) {
    if (shapes[l].rows <= 0 || shapes[l].cols <= 0) {
      throw DimensionError(fmt::format("layer {} has non-positive shape {}x{}", l,
                                       shapes[l].rows, shapes[l].cols));
    }
    if (l > 0 && shapes[l].cols != shapes[l - 1].rows) {
      throw DimensionError(fmt::format("layer {} expects {} inputs but layer {} emits {}", l,
                                       shapes[l].cols, l - 1, shapes[l - 1].rows));
    }
  }
  const auto expected = expected_length(shapes);
  if (values.size() != expected) {
    throw DimensionError(fmt::format("parameter vector has length {}, shape manifest implies {}",
                                     values.size(), expected));
  }
}

ForwardTrace forward_trace(const ParamSet& params, std::span<const double> input) {
  if (params.shapes.empty()) throw DimensionError("parameter set has no layers");
  if (static_cast<int>(input.size()) != params.input_size()) {
    throw DimensionError(fmt::format("input width mismatch: expected {}, got {}",
                                     params.input_size(), input.size()));
  }
  ForwardTrace trace;
  trace.layers.reserve(params.shapes.size() + 1);
  trace.layers.emplace_back(input.begin(), input.end());

  const double* p = params.values.data();
  for (std::size_t l = 0; l < params.shapes.size(); ++l) {
    const auto& shape = params.shapes[l];
    const bool last = l + 1 == params.shapes.size();
    const auto& x = trace.layers.back();
    std::vector<double> y(static_cast<std::size_t>(shape.rows));
    const double* bias = p + static_cast<std::size_t>(shape.rows) * shape.cols;
    for (int r = 0; r < shape.rows; ++r) {
      const double* row = p + static_cast<std::size_t>(r) * shape.cols;
      double acc = shape.has_bias ? bias[r] : 0.0;
      for (int c = 0; c < shape.cols; ++c) acc += row[c] * x[static_cast<std::size_t>(c)];
      y[static_cast<std::size_t>(r)] = last ? acc : activate(params.activation, acc);
    }
    p += shape.parameter_count();
    trace.layers.push_back(std::move(y));
  }
  return trace;
}

std::vector<double> forward(const ParamSet& params, std::span<const double> input) {
  auto trace = forward_trace(params, input);
  return std::move(trace.layers.back());
}

void backward_accumulate(const ParamSet& params, const ForwardTrace& trace,
                         std::span<const double> output_grad, std::span<double> grad) {
  if (static_cast<int>(output_grad.size()) != params.output_size()) {
    throw DimensionError(fmt::format("output gradient width mismatch: expected {}, got {}",
                                     params.output_size(), output_grad.size()));
  }
  if (grad.size() != params.values.size()) {
    throw DimensionError(fmt::format("gradient buffer has length {}, parameters have {}",
                                     grad.size(), params.values.size()));
  }

  // Offsets of each layer's block in the flat vector.
  std::vector<std::size_t> offsets(params.shapes.size());
  std::size_t offset = 0;
  for (std::size_t l = 0; l < params.shapes.size(); ++l) {
    offsets[l] = offset;
    offset += params.shapes[l].parameter_count();
  }

  // delta holds d<out, g>/d(pre-activation) of the current layer.
  std::vector<double> delta(output_grad.begin(), output_grad.end());
  for (std::size_t li = params.shapes.size(); li-- > 0;) {
    const auto& shape = params.shapes[li];
    const auto& x = trace.layers[li];
    const double* w = params.values.data() + offsets[li];
    double* gw = grad.data() + offsets[li];
    double* gb = gw + static_cast<std::size_t>(shape.rows) * shape.cols;

    for (int r = 0; r < shape.rows; ++r) {
      const double d = delta[static_cast<std::size_t>(r)];
      if (d == 0.0) continue;
      double* grow = gw + static_cast<std::size_t>(r) * shape.cols;
      for (int c = 0; c < shape.cols; ++c) grow[c] += d * x[static_cast<std::size_t>(c)];
      if (shape.has_bias) gb[r] += d;
    }
    if (li == 0) break;

    std::vector<double> upstream(static_cast<std::size_t>(shape.cols), 0.0);
    for (int r = 0; r < shape.rows; ++r) {
      const double d = delta[static_cast<std::size_t>(r)];
      if (d == 0.0) continue;
      const double* row = w + static_cast<std::size_t>(r) * shape.cols;
      for (int c = 0; c < shape.cols; ++c) upstream[static_cast<std::size_t>(c)] += d * row[c];
    }
    for (std::size_t c = 0; c < upstream.size(); ++c) {
      upstream[c] *= activate_derivative(params.activation, x[c]);
    }
    delta = std::move(upstream);
  }
}

Gradient backward(const ParamSet& params, std::span<const double> input,
                  std::span<const double> output_grad) {
  const auto trace = forward_trace(params, input);
  auto grad = Gradient::zeros_like(params);
  backward_accumulate(params, trace, output_grad, grad.values);
  return grad;
}

ParamSet make_mlp(std::span<const int> widths, Activation activation, double hidden_gain,
                  double output_gain, Rng& rng) {
  if (widths.size() < 2) throw DimensionError("an MLP needs at least input and output widths");
  ParamSet params;
  params.activation = activation;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    params.shapes.push_back(LayerShape{widths[l + 1], widths[l], true});
  }
  params.values.reserve(ParamSet::expected_length(params.shapes));
  for (std::size_t l = 0; l < params.shapes.size(); ++l) {
    const auto& shape = params.shapes[l];
    const double gain = l + 1 == params.shapes.size() ? output_gain : hidden_gain;
    const double bound = gain * std::sqrt(3.0 / static_cast<double>(shape.cols));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (int i = 0; i < shape.rows * shape.cols; ++i) params.values.push_back(dist(rng));
    if (shape.has_bias) params.values.insert(params.values.end(), shape.rows, 0.0);
  }
  params.validate();
  return params;
}

}  // namespace asyncopt::net
