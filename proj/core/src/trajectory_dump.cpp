#include "asyncopt/rollout/trajectory_dump.hpp"

#include <nlohmann/json.hpp>

namespace asyncopt::rollout {

void dump_trajectory(std::ostream& out, const OptionTrajectory& trajectory, int episode) {
  for (const auto& record : trajectory.records) {
    nlohmann::json line{{"episode", episode},
                        {"k", record.k},
                        {"deciding", record.decision.deciding},
                        {"options", record.options},
                        {"segment_reward", record.segment_reward},
                        {"gap", record.gap}};
    out << line.dump() << '\n';
  }
}

}  // namespace asyncopt::rollout
