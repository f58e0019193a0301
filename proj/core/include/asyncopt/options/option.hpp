#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace asyncopt::options {

/// How agents whose options have not finished are treated when another
/// agent's option terminates.
enum class ExecutionStrategy {
  SyncCut,        // any termination interrupts and re-chooses for everyone
  SyncWait,       // finished agents idle until every option is done
  AsyncContinue,  // only finished agents choose; nobody is interrupted
  End2End,        // primitive actions, everyone chooses every step
};

std::string_view to_string(ExecutionStrategy strategy);

/// Accepts "async", "async_continue", "sync_cut", "sync_wait", "end2end".
ExecutionStrategy parse_strategy(std::string_view name);

/// The option an agent is currently executing.
struct OngoingOption {
  int option_id = -1;
  std::int64_t start_step = 0;
  /// Low-level steps executed so far under this option.
  int elapsed = 0;

  bool active() const { return option_id >= 0; }
};

/// Partition of the agents at a decision point.
struct DecisionSet {
  std::int64_t step = 0;
  std::vector<int> deciding;
  std::vector<int> continuing;

  bool is_deciding(int agent) const;
};

/// An option over environment state type `State`: initiation predicate,
/// deterministic goal predicate, scripted inner policy emitting primitive
/// action ids, and a step cap after which the option is force-terminated.
template <class State>
struct OptionDef {
  int id = 0;
  std::string name;
  std::function<bool(const State&, int agent)> initiation;
  std::function<bool(const State&, int agent, const OngoingOption&)> goal;
  std::function<int(const State&, int agent, const OngoingOption&)> inner_policy;
  int max_duration = 1;
};

}  // namespace asyncopt::options
