#include "asyncopt/train/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "asyncopt/error.hpp"
#include "asyncopt/log.hpp"
#include "asyncopt/rollout/gae.hpp"

namespace asyncopt::train {

using policy::PolicyMode;

PpoBatch build_batch(const std::vector<rollout::OptionTrajectory>& trajectories, PolicyMode mode,
                     double gamma, double lambda, bool normalize) {
  PpoBatch batch;
  for (const auto& traj : trajectories) {
    const auto& records = traj.records;
    if (records.empty()) continue;
    const std::size_t heads = records.front().values.size();
    if (traj.bootstrap_values.size() != heads) {
      throw DimensionError(fmt::format("trajectory has {} bootstrap values for {} heads",
                                       traj.bootstrap_values.size(), heads));
    }
    std::vector<double> rewards;
    std::vector<int> gaps;
    for (const auto& r : records) {
      rewards.push_back(r.segment_reward);
      gaps.push_back(r.gap);
    }
    const std::size_t first = batch.samples.size();
    for (const auto& r : records) batch.samples.push_back(Sample{&r, {}, {}});
    for (std::size_t h = 0; h < heads; ++h) {
      std::vector<double> values;
      for (const auto& r : records) values.push_back(r.values[h]);
      const auto gae =
          rollout::compute_gae(rewards, gaps, values, traj.bootstrap_values[h], gamma, lambda);
      for (std::size_t t = 0; t < records.size(); ++t) {
        batch.samples[first + t].advantages.push_back(gae.advantages[t]);
        batch.samples[first + t].returns.push_back(gae.returns[t]);
      }
    }
  }

  if (normalize) {
    std::vector<double> scored;
    for (const auto& s : batch.samples) {
      for (std::size_t h = 0; h < s.advantages.size(); ++h) {
        if (s.record->head_active(static_cast<int>(h), mode)) scored.push_back(s.advantages[h]);
      }
    }
    const auto normalized = rollout::normalize(scored);
    std::size_t i = 0;
    for (auto& s : batch.samples) {
      for (std::size_t h = 0; h < s.advantages.size(); ++h) {
        if (s.record->head_active(static_cast<int>(h), mode)) s.advantages[h] = normalized[i++];
      }
    }
  }
  return batch;
}

namespace {

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

PpoStats ppo_update(policy::ActorCritic& policy, std::vector<net::OptimizerState>& actor_opt,
                    std::vector<net::OptimizerState>& critic_opt, const PpoBatch& batch,
                    const PpoSettings& settings, Rng& rng) {
  PpoStats stats;
  const int heads = policy.num_heads();
  const auto mode = policy.mode;
  const auto& counts = policy.option_counts;
  if (static_cast<int>(actor_opt.size()) != heads || static_cast<int>(critic_opt.size()) != heads) {
    throw DimensionError(fmt::format("{} heads but {} actor and {} critic optimizer states", heads,
                                     actor_opt.size(), critic_opt.size()));
  }
  const std::size_t n = batch.samples.size();
  if (n == 0) return stats;

  for (const auto& s : batch.samples) {
    const auto& rec = *s.record;
    for (int h = 0; h < heads; ++h) {
      if (!rec.head_active(h, mode)) continue;
      ++stats.policy_samples;
      const auto uh = static_cast<std::size_t>(h);
      const auto logits = policy.logits(h, rec.inputs[uh]);
      const auto ev = policy::evaluate_conditional(logits, counts, rec.query(h, mode),
                                                   rec.choice(h, mode));
      stats.on_policy_gap = std::max(stats.on_policy_gap, std::abs(ev.log_prob - rec.log_probs[uh]));
    }
  }

  const auto saved_policy = policy;
  const auto saved_actor_opt = actor_opt;
  const auto saved_critic_opt = critic_opt;
  const auto abort = [&](const std::string& why) {
    policy = saved_policy;
    actor_opt = saved_actor_opt;
    critic_opt = saved_critic_opt;
    stats.aborted = true;
    log_error(fmt::format("update aborted, parameters kept: {}", why));
    return stats;
  };

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t num_mb = std::min<std::size_t>(static_cast<std::size_t>(settings.minibatches), n);

  double policy_loss_sum = 0.0;
  double value_loss_sum = 0.0;
  double entropy_sum = 0.0;
  double log_prob_sum = 0.0;
  std::int64_t policy_terms = 0;
  std::int64_t value_terms = 0;
  const double lo = 1.0 - settings.clip_ratio;
  const double hi = 1.0 + settings.clip_ratio;

  for (int epoch = 0; epoch < settings.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t mb = 0; mb < num_mb; ++mb) {
      const std::size_t begin = mb * n / num_mb;
      const std::size_t end = (mb + 1) * n / num_mb;

      std::vector<std::int64_t> mb_policy(static_cast<std::size_t>(heads), 0);
      for (std::size_t i = begin; i < end; ++i) {
        for (int h = 0; h < heads; ++h) {
          mb_policy[static_cast<std::size_t>(h)] += batch.samples[order[i]].record->head_active(h, mode);
        }
      }
      const auto mb_value = static_cast<std::int64_t>(end - begin);

      std::vector<net::Gradient> actor_grad;
      std::vector<net::Gradient> critic_grad;
      for (int h = 0; h < heads; ++h) {
        actor_grad.push_back(net::Gradient::zeros_like(policy.actors[static_cast<std::size_t>(h)]));
        critic_grad.push_back(net::Gradient::zeros_like(policy.critics[static_cast<std::size_t>(h)]));
      }
      double mb_policy_loss = 0.0;
      double mb_value_loss = 0.0;

      for (std::size_t i = begin; i < end; ++i) {
        const auto& sample = batch.samples[order[i]];
        const auto& rec = *sample.record;
        for (int h = 0; h < heads; ++h) {
          const auto uh = static_cast<std::size_t>(h);
          const auto& actor = policy.actors[uh];
          const auto trace = net::forward_trace(actor, rec.inputs[uh]);

          if (!rec.head_active(h, mode)) {
            // The agent keeps its ongoing option with probability exactly 1,
            // so this term is constant in the head's parameters.
            const int held = rec.options[uh];
            const double prob = policy::partially_centralized_prob(h, trace.output(), counts,
                                                                   rec.fixed(), held);
            ++stats.continuing_samples;
            stats.continuing_prob_min = std::min(stats.continuing_prob_min, prob);
            stats.continuing_prob_max = std::max(stats.continuing_prob_max, prob);
            const double ratio = prob / std::exp(rec.log_probs[uh]);
            if (ratio != 1.0) {
              return abort(fmt::format("continuing agent {} has ratio {}", h, ratio));
            }
            std::vector<double> zero(trace.output().size(), 0.0);
            auto scratch = net::Gradient::zeros_like(actor);
            net::backward_accumulate(actor, trace, zero, scratch.values);
            for (double g : scratch.values) stats.continuing_grad_abs += std::abs(g);
          } else {
            const auto ev = policy::evaluate_conditional(trace.output(), counts,
                                                         rec.query(h, mode), rec.choice(h, mode));
            const double adv = sample.advantages[uh];
            double objective = 0.0;
            double dobj_dlogp = 0.0;
            if (settings.vanilla_pg) {
              objective = ev.log_prob * adv;
              dobj_dlogp = adv;
            } else {
              const double ratio = std::exp(ev.log_prob - rec.log_probs[uh]);
              const double unclipped = ratio * adv;
              const double clipped = std::clamp(ratio, lo, hi) * adv;
              objective = std::min(unclipped, clipped);
              const bool inside = ratio >= lo && ratio <= hi;
              dobj_dlogp = (unclipped <= clipped || inside) ? ratio * adv : 0.0;
            }
            const double loss = -objective - settings.entropy_coef * ev.entropy;
            mb_policy_loss += loss;
            policy_loss_sum += -objective;
            entropy_sum += ev.entropy;
            log_prob_sum += ev.log_prob;
            ++policy_terms;

            std::vector<double> dlogits(ev.grad_log_prob.size());
            for (std::size_t j = 0; j < dlogits.size(); ++j) {
              dlogits[j] = -(dobj_dlogp * ev.grad_log_prob[j] +
                             settings.entropy_coef * ev.grad_entropy[j]) /
                           static_cast<double>(mb_policy[uh]);
            }
            net::backward_accumulate(actor, trace, dlogits, actor_grad[uh].values);
          }

          if (settings.update_critic) {
            const auto& critic = policy.critics[uh];
            const auto vtrace = net::forward_trace(critic, rec.inputs[uh]);
            const double err = vtrace.output()[0] - sample.returns[uh];
            mb_value_loss += err * err;
            value_loss_sum += err * err;
            ++value_terms;
            const double dv = 2.0 * settings.value_coef * err / static_cast<double>(mb_value);
            net::backward_accumulate(critic, vtrace, std::span<const double>(&dv, 1),
                                     critic_grad[uh].values);
          }
        }
      }

      if (!std::isfinite(mb_policy_loss) || !std::isfinite(mb_value_loss)) {
        return abort(fmt::format("non-finite loss in epoch {} minibatch {}", epoch, mb));
      }
      try {
        for (int h = 0; h < heads; ++h) {
          const auto uh = static_cast<std::size_t>(h);
          if (!all_finite(actor_grad[uh].values) || !all_finite(critic_grad[uh].values)) {
            throw NumericError(fmt::format("non-finite gradient for head {}", h));
          }
          if (mb_policy[uh] > 0) {
            net::clip_grad_norm(actor_grad[uh], settings.max_grad_norm);
            net::apply_optimizer_step(policy.actors[uh], actor_grad[uh], actor_opt[uh]);
          }
          if (settings.update_critic) {
            net::clip_grad_norm(critic_grad[uh], settings.max_grad_norm);
            net::apply_optimizer_step(policy.critics[uh], critic_grad[uh], critic_opt[uh]);
          }
        }
      } catch (const NumericError& e) {
        return abort(e.what());
      }
    }
  }

  if (policy_terms > 0) {
    stats.policy_loss = policy_loss_sum / static_cast<double>(policy_terms);
    stats.entropy = entropy_sum / static_cast<double>(policy_terms);
    stats.mean_log_prob = log_prob_sum / static_cast<double>(policy_terms);
  }
  if (value_terms > 0) stats.value_loss = value_loss_sum / static_cast<double>(value_terms);
  return stats;
}

}  // namespace asyncopt::train
