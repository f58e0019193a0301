#include "asyncopt/net/serialize.hpp"

#include "asyncopt/error.hpp"

namespace asyncopt::net {

void to_json(nlohmann::json& j, const ParamSet& params) {
  auto layers = nlohmann::json::array();
  for (const auto& shape : params.shapes) {
    layers.push_back({shape.rows, shape.cols, shape.has_bias});
  }
  j = nlohmann::json{{"activation", to_string(params.activation)},
                     {"layers", std::move(layers)},
                     {"values", params.values}};
}

void from_json(const nlohmann::json& j, ParamSet& params) {
  try {
    params.activation = activation_from_string(j.at("activation").get<std::string>());
    params.shapes.clear();
    for (const auto& layer : j.at("layers")) {
      params.shapes.push_back(
          LayerShape{layer.at(0).get<int>(), layer.at(1).get<int>(), layer.at(2).get<bool>()});
    }
    params.values = j.at("values").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed parameter set: ") + e.what());
  }
  params.validate();
}

void to_json(nlohmann::json& j, const OptimizerState& state) {
  j = nlohmann::json{{"step", state.step},
                     {"step_size", state.step_size},
                     {"beta1", state.beta1},
                     {"beta2", state.beta2},
                     {"epsilon", state.epsilon},
                     {"first_moment", state.first_moment},
                     {"second_moment", state.second_moment}};
}

void from_json(const nlohmann::json& j, OptimizerState& state) {
  try {
    state.step = j.at("step").get<std::int64_t>();
    state.step_size = j.at("step_size").get<double>();
    state.beta1 = j.at("beta1").get<double>();
    state.beta2 = j.at("beta2").get<double>();
    state.epsilon = j.at("epsilon").get<double>();
    state.first_moment = j.at("first_moment").get<std::vector<double>>();
    state.second_moment = j.at("second_moment").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed optimizer state: ") + e.what());
  }
  if (state.step < 0) throw ConfigError("optimizer step counter is negative");
  if (state.first_moment.size() != state.second_moment.size()) {
    throw DimensionError("optimizer moment vectors differ in length");
  }
}

}  // namespace asyncopt::net
