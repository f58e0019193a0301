#include "asyncopt/rollout/collector.hpp"

#include <fmt/format.h>

#include "asyncopt/error.hpp"
#include "asyncopt/log.hpp"
#include "asyncopt/rollout/gae.hpp"

namespace asyncopt::rollout {

using options::ExecutionStrategy;
using policy::PolicyMode;

policy::ConditionAssignment DecisionRecord::fixed() const {
  policy::ConditionAssignment assignment;
  for (int agent : decision.continuing) {
    assignment.emplace(agent, options[static_cast<std::size_t>(agent)]);
  }
  return assignment;
}

bool DecisionRecord::head_active(int head, PolicyMode mode) const {
  return mode == PolicyMode::Centralized || decision.is_deciding(head);
}

policy::ConditionalQuery DecisionRecord::query(int head, PolicyMode mode) const {
  policy::ConditionalQuery q;
  q.fixed = fixed();
  if (mode == PolicyMode::Centralized) {
    q.targets = decision.deciding;
  } else {
    if (!decision.is_deciding(head)) {
      throw Error(fmt::format("agent {} is continuing at k={}; its head scores nothing", head, k));
    }
    q.targets = {head};
  }
  for (int agent : q.targets) q.available.push_back(available[static_cast<std::size_t>(agent)]);
  return q;
}

std::size_t DecisionRecord::choice(int head, PolicyMode mode) const {
  const auto q = query(head, mode);
  std::size_t flat = 0;
  for (std::size_t t = 0; t < q.targets.size(); ++t) {
    flat = flat * q.available[t].size() +
           static_cast<std::size_t>(options[static_cast<std::size_t>(q.targets[t])]);
  }
  return flat;
}

std::vector<int> head_input_sizes(const options::MultiAgentEnv& env, PolicyMode mode) {
  int context = 0;
  for (int i = 0; i < env.num_agents(); ++i) context += env.num_options(i);
  if (mode == PolicyMode::Centralized) {
    int total = context;
    for (int i = 0; i < env.num_agents(); ++i) total += env.observation_size(i);
    return {total};
  }
  std::vector<int> sizes;
  for (int i = 0; i < env.num_agents(); ++i) sizes.push_back(env.observation_size(i) + context);
  return sizes;
}

std::vector<std::vector<double>> build_head_inputs(
    const options::MultiAgentEnv& env, PolicyMode mode,
    const std::vector<options::OngoingOption>& ongoing, const std::vector<bool>& continuing) {
  const int n = env.num_agents();
  std::vector<double> context;
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const auto offset = context.size();
    context.resize(offset + static_cast<std::size_t>(env.num_options(i)), 0.0);
    if (continuing[ui] && ongoing[ui].active()) {
      context[offset + static_cast<std::size_t>(ongoing[ui].option_id)] = 1.0;
    }
  }
  std::vector<std::vector<double>> inputs;
  if (mode == PolicyMode::Centralized) {
    auto joint = env.observe_joint();
    joint.insert(joint.end(), context.begin(), context.end());
    inputs.push_back(std::move(joint));
  } else {
    for (int i = 0; i < n; ++i) {
      auto local = env.observe(i);
      local.insert(local.end(), context.begin(), context.end());
      inputs.push_back(std::move(local));
    }
  }
  return inputs;
}

namespace {

// Picks options for the deciding agents and fills the record's choice fields.
void choose(const policy::ActorCritic& policy, DecisionRecord& record, bool greedy, Rng& rng) {
  const auto pick = [&](const policy::JointCategorical& dist) {
    return greedy ? policy::argmax(dist) : policy::sample(dist, rng);
  };
  if (policy.mode == PolicyMode::Centralized) {
    const auto logits = policy.logits(0, record.inputs[0]);
    const auto q = record.query(0, policy.mode);
    const auto dist = policy::conditional_distribution(logits, policy.option_counts, q);
    const auto flat = pick(dist);
    const auto chosen = dist.unravel(flat);
    for (std::size_t t = 0; t < q.targets.size(); ++t) {
      record.options[static_cast<std::size_t>(q.targets[t])] = chosen[t];
    }
    record.log_probs[0] = dist.log_probs[flat];
    return;
  }
  // Each deciding agent conditions its own head on the continuing agents'
  // options; agents deciding at the same step choose independently.
  for (int agent : record.decision.deciding) {
    const auto logits = policy.logits(agent, record.inputs[static_cast<std::size_t>(agent)]);
    const auto q = record.query(agent, policy.mode);
    const auto dist = policy::conditional_distribution(logits, policy.option_counts, q);
    const auto flat = pick(dist);
    record.options[static_cast<std::size_t>(agent)] = static_cast<int>(flat);
    record.log_probs[static_cast<std::size_t>(agent)] = dist.log_probs[flat];
  }
}

std::vector<double> head_values(const policy::ActorCritic& policy,
                                const std::vector<std::vector<double>>& inputs) {
  std::vector<double> values;
  for (int h = 0; h < policy.num_heads(); ++h) {
    values.push_back(policy.value(h, inputs[static_cast<std::size_t>(h)]));
  }
  return values;
}

}  // namespace

OptionTrajectory collect_episode(options::MultiAgentEnv& env, const policy::ActorCritic& policy,
                                 const CollectOptions& opts, std::uint64_t seed, Rng& rng,
                                 CollectResult* stats) {
  const int n = env.num_agents();
  if (policy.num_agents() != n) {
    throw DimensionError(fmt::format("policy covers {} agents, environment has {}",
                                     policy.num_agents(), n));
  }
  env.reset(seed);
  options::OptionScheduler scheduler(opts.strategy, n);
  OptionTrajectory traj;
  std::vector<double> pending;  // rewards since the last decision point

  const auto close_record = [&](std::int64_t k_now) {
    if (traj.records.empty()) return;
    auto& last = traj.records.back();
    last.gap = static_cast<int>(k_now - last.k);
    last.segment_reward = aggregate_segment_reward(pending, opts.gamma);
    pending.clear();
  };

  std::int64_t k = 0;
  while (true) {
    const auto interruptions_before = scheduler.interruptions();
    std::optional<options::DecisionSet> decision = scheduler.decision_point();
    if (decision && decision->deciding.empty()) decision.reset();
    if (decision) {
      close_record(k);
      DecisionRecord record;
      record.k = k;
      record.decision = *decision;
      record.options.assign(static_cast<std::size_t>(n), -1);
      record.available.resize(static_cast<std::size_t>(n));
      std::vector<bool> continuing(static_cast<std::size_t>(n), false);
      for (int agent : decision->continuing) {
        continuing[static_cast<std::size_t>(agent)] = true;
        record.options[static_cast<std::size_t>(agent)] =
            scheduler.ongoing()[static_cast<std::size_t>(agent)].option_id;
      }
      for (int agent : decision->deciding) {
        auto& mask = record.available[static_cast<std::size_t>(agent)];
        for (int o = 0; o < env.num_options(agent); ++o) mask.push_back(env.can_initiate(agent, o));
      }
      record.inputs = build_head_inputs(env, policy.mode, scheduler.ongoing(), continuing);
      record.values = head_values(policy, record.inputs);
      record.log_probs.assign(static_cast<std::size_t>(policy.num_heads()), 0.0);
      choose(policy, record, opts.greedy, rng);
      for (int agent : decision->deciding) {
        scheduler.start(env, agent, record.options[static_cast<std::size_t>(agent)], k);
      }
      traj.records.push_back(std::move(record));
      if (stats) ++stats->decision_points;
    }

    options::LowLevelStep step;
    try {
      step = scheduler.advance(env);
    } catch (const Error& e) {
      log_warning(fmt::format("{}: environment fault at step {}: {}", env.id(), k, e.what()));
      traj.faulted = true;
      if (!traj.records.empty()) {
        // The open segment never completed; cut back to the last full record
        // and bootstrap it from the dropped record's estimate.
        auto dropped = std::move(traj.records.back());
        traj.records.pop_back();
        traj.bootstrap_values = dropped.values;
        if (stats) --stats->decision_points;
      }
      break;
    }
    pending.push_back(step.result.reward);
    traj.low_level_rewards.push_back(step.result.reward);
    traj.episode_return += step.result.reward;
    ++k;

    if (opts.on_step) {
      StepTrace trace{k - 1, decision, scheduler.ongoing(), step,
                      scheduler.interruptions() - interruptions_before};
      opts.on_step(trace);
    }

    if (step.result.done()) {
      close_record(k);
      traj.terminal = step.result.terminal;
      if (traj.terminal) {
        traj.bootstrap_values.assign(static_cast<std::size_t>(policy.num_heads()), 0.0);
      } else {
        std::vector<bool> continuing(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
          continuing[static_cast<std::size_t>(i)] = !scheduler.finished()[static_cast<std::size_t>(i)];
        }
        traj.bootstrap_values = head_values(
            policy, build_head_inputs(env, policy.mode, scheduler.ongoing(), continuing));
      }
      break;
    }
  }
  traj.low_level_steps = k;
  if (stats) {
    stats->low_level_steps += k;
    stats->interruptions += scheduler.interruptions();
    stats->forced_terminations += scheduler.forced_terminations();
  }
  return traj;
}

CollectResult collect(options::MultiAgentEnv& env, const policy::ActorCritic& policy,
                      const CollectOptions& opts, Rng& rng) {
  CollectResult result;
  while (result.low_level_steps < opts.min_steps) {
    const std::uint64_t seed = rng();
    result.trajectories.push_back(collect_episode(env, policy, opts, seed, rng, &result));
    if (result.trajectories.back().low_level_steps == 0) break;
  }
  return result;
}

}  // namespace asyncopt::rollout
