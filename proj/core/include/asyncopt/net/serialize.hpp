#pragma once

#include <nlohmann/json.hpp>

#include "asyncopt/net/adam.hpp"
#include "asyncopt/net/mlp.hpp"

namespace asyncopt::net {

// JSON forms used inside checkpoints. Doubles are written with the shortest
// representation that parses back to the same bits.
//
//   ParamSet:       {"activation": "tanh", "layers": [[rows, cols, has_bias], ...],
//                    "values": [...]}
//   OptimizerState: {"step": n, "step_size": a, "beta1": b1, "beta2": b2,
//                    "epsilon": e, "first_moment": [...], "second_moment": [...]}

void to_json(nlohmann::json& j, const ParamSet& params);
void from_json(const nlohmann::json& j, ParamSet& params);

void to_json(nlohmann::json& j, const OptimizerState& state);
void from_json(const nlohmann::json& j, OptimizerState& state);

}  // namespace asyncopt::net
