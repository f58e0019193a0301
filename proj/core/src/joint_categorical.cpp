#include "asyncopt/policy/joint_categorical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "asyncopt/error.hpp"
#include "asyncopt/policy/conditional.hpp"

namespace asyncopt::policy {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

std::size_t cell_count(std::span<const int> counts) {
  std::size_t total = 1;
  for (int c : counts) {
    if (c <= 0) throw DimensionError(fmt::format("option count must be positive, got {}", c));
    total *= static_cast<std::size_t>(c);
  }
  return total;
}

double log_sum_exp(std::span<const double> x) {
  double m = kNegInf;
  for (double v : x) m = std::max(m, v);
  if (m == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double v : x) sum += std::exp(v - m);
  return m + std::log(sum);
}

std::vector<double> JointCategorical::probabilities() const {
  std::vector<double> p(log_probs.size());
  std::transform(log_probs.begin(), log_probs.end(), p.begin(),
                 [](double lp) { return std::exp(lp); });
  return p;
}

std::size_t JointCategorical::stride(int axis) const {
  std::size_t s = 1;
  for (int a = num_agents() - 1; a > axis; --a) s *= static_cast<std::size_t>(counts[a]);
  return s;
}

std::size_t JointCategorical::flat_index(std::span<const int> per_agent) const {
  if (static_cast<int>(per_agent.size()) != num_agents()) {
    throw DimensionError(fmt::format("expected {} per-agent indices, got {}", num_agents(),
                                     per_agent.size()));
  }
  std::size_t flat = 0;
  for (int a = 0; a < num_agents(); ++a) {
    const int i = per_agent[static_cast<std::size_t>(a)];
    if (i < 0 || i >= counts[static_cast<std::size_t>(a)]) {
      throw DimensionError(fmt::format("index {} out of range for axis {} with {} options", i, a,
                                       counts[static_cast<std::size_t>(a)]));
    }
    flat = flat * static_cast<std::size_t>(counts[static_cast<std::size_t>(a)]) +
           static_cast<std::size_t>(i);
  }
  return flat;
}

std::vector<int> JointCategorical::unravel(std::size_t flat) const {
  std::vector<int> idx(counts.size());
  for (std::size_t a = counts.size(); a-- > 0;) {
    const auto c = static_cast<std::size_t>(counts[a]);
    idx[a] = static_cast<int>(flat % c);
    flat /= c;
  }
  return idx;
}

JointCategorical logits_to_joint(std::span<const double> logits, std::vector<int> counts) {
  const auto expected = cell_count(counts);
  if (logits.size() != expected) {
    throw DimensionError(fmt::format("net output has length {}, option counts imply {}",
                                     logits.size(), expected));
  }
  const double z = log_sum_exp(logits);
  if (!std::isfinite(z)) throw NumericError("joint logits have no finite normalizer");
  JointCategorical joint;
  joint.counts = std::move(counts);
  joint.log_probs.reserve(logits.size());
  for (double l : logits) joint.log_probs.push_back(l - z);
  return joint;
}

JointCategorical condition(const JointCategorical& joint, const ConditionAssignment& fixed) {
  ConditionalQuery query;
  query.fixed = fixed;
  for (int a = 0; a < joint.num_agents(); ++a) {
    if (fixed.count(a) == 0) query.targets.push_back(a);
  }
  return conditional_distribution(joint.log_probs, joint.counts, query);
}

JointCategorical marginal(const JointCategorical& joint, std::span<const int> agents) {
  ConditionalQuery query;
  query.targets.assign(agents.begin(), agents.end());
  std::sort(query.targets.begin(), query.targets.end());
  query.targets.erase(std::unique(query.targets.begin(), query.targets.end()),
                      query.targets.end());
  return conditional_distribution(joint.log_probs, joint.counts, query);
}

JointCategorical restrict_to(const JointCategorical& dist,
                             const std::vector<std::vector<bool>>& available) {
  ConditionalQuery query;
  for (int a = 0; a < dist.num_agents(); ++a) query.targets.push_back(a);
  query.available = available;
  return conditional_distribution(dist.log_probs, dist.counts, query);
}

std::size_t sample(const JointCategorical& dist, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < dist.log_probs.size(); ++i) {
    const double p = std::exp(dist.log_probs[i]);
    if (p <= 0.0) continue;
    last_positive = i;
    acc += p;
    if (u < acc) return i;
  }
  // Rounding left the cumulative sum just below u.
  return last_positive;
}

std::size_t argmax(const JointCategorical& dist) {
  return static_cast<std::size_t>(
      std::max_element(dist.log_probs.begin(), dist.log_probs.end()) - dist.log_probs.begin());
}

double log_prob(const JointCategorical& dist, std::size_t choice) {
  if (choice >= dist.size()) {
    throw DimensionError(fmt::format("choice {} out of range for {} cells", choice, dist.size()));
  }
  const double lp = dist.log_probs[choice] - log_sum_exp(dist.log_probs);
  if (lp == kNegInf) throw NumericError(fmt::format("cell {} has probability zero", choice));
  return lp;
}

double entropy(const JointCategorical& dist) {
  const double z = log_sum_exp(dist.log_probs);
  double h = 0.0;
  for (double lp : dist.log_probs) {
    if (lp == kNegInf) continue;
    const double l = lp - z;
    h -= std::exp(l) * l;
  }
  return h;
}

}  // namespace asyncopt::policy
