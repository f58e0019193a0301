#pragma once

#include <ostream>

#include "asyncopt/rollout/records.hpp"

namespace asyncopt::rollout {

/// Writes one JSON object per decision record, one per line:
///   {"episode":0,"k":12,"deciding":[1],"options":[4,0],"segment_reward":-3.9,"gap":4}
void dump_trajectory(std::ostream& out, const OptionTrajectory& trajectory, int episode);

}  // namespace asyncopt::rollout
