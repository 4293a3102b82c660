#include "rlopt/query_bandit.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rlopt/errors.hpp"
#include "rlopt/normal.hpp"

namespace rlopt {

ArmStats update_arm(ArmStats arm, double reward) {
  if (!std::isfinite(reward)) throw UsageError("update_arm: non-finite reward");
  arm.pulls += 1;
  const double delta = reward - arm.mean;
  arm.mean += delta / static_cast<double>(arm.pulls);
  arm.m2 += delta * (reward - arm.mean);
  return arm;
}

double ucb1_score(const ArmStats& arm, double t) {
  if (arm.pulls <= 0) return std::numeric_limits<double>::infinity();
  if (!(t >= static_cast<double>(arm.pulls))) throw UsageError("ucb1_score: t smaller than the arm's pull count");
  const double n = static_cast<double>(arm.pulls);
  return arm.mean + std::sqrt(2.0 * std::log(t) / n);
}

double ucb1tuned_score(const ArmStats& arm, double t) {
  if (arm.pulls <= 0) return std::numeric_limits<double>::infinity();
  if (!(t >= static_cast<double>(arm.pulls))) throw UsageError("ucb1tuned_score: t smaller than the arm's pull count");
  const double n = static_cast<double>(arm.pulls);
  const double log_t = std::log(t);
  const double v = arm.variance() + std::sqrt(2.0 * log_t / n);
  return arm.mean + std::sqrt(log_t / n * std::min(0.25, v));
}

void BanditPolicy::validate() const {
  if (kind == Kind::kEpsilonGreedy && !(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw UsageError("egreedy epsilon must lie in [0, 1]");
  }
  if (kind == Kind::kSoftmax && !(tau > 0.0 && std::isfinite(tau))) {
    throw UsageError("softmax tau must be positive");
  }
}

std::string_view to_string(BanditPolicy::Kind kind) {
  switch (kind) {
    case BanditPolicy::Kind::kNone: return "none";
    case BanditPolicy::Kind::kGreedy: return "greedy";
    case BanditPolicy::Kind::kEpsilonGreedy: return "egreedy";
    case BanditPolicy::Kind::kSoftmax: return "softmax";
    case BanditPolicy::Kind::kUcb1: return "ucb1";
    case BanditPolicy::Kind::kUcb1Tuned: return "ucb1tuned";
  }
  return "?";
}

BanditPolicy::Kind parse_policy_kind(std::string_view name) {
  using K = BanditPolicy::Kind;
  for (K k : {K::kNone, K::kGreedy, K::kEpsilonGreedy, K::kSoftmax, K::kUcb1, K::kUcb1Tuned}) {
    if (to_string(k) == name) return k;
  }
  throw UsageError("unknown bandit policy '" + std::string(name) + "'");
}

double softmax_resample_probability(const QOState& state, double tau) {
  // exp(tau m_r) / (exp(tau m_r) + exp(tau m_s)) as a logistic for stability.
  return 1.0 / (1.0 + std::exp(tau * (state.stop.mean - state.resample.mean)));
}

namespace {

Arm argmax_arm(double stop_value, double resample_value, bool ties_resample) {
  if (resample_value > stop_value) return Arm::kResample;
  if (stop_value > resample_value) return Arm::kStop;
  return ties_resample ? Arm::kResample : Arm::kStop;
}

}  // namespace

Arm select_arm(const BanditPolicy& policy, const QOState& state, Rng& rng) {
  using K = BanditPolicy::Kind;
  switch (policy.kind) {
    case K::kNone:
    case K::kGreedy:
      return argmax_arm(state.stop.mean, state.resample.mean, policy.ties_resample);
    case K::kEpsilonGreedy:
      if (uniform01(rng) < policy.epsilon) return uniform_index(rng, 2) == 0 ? Arm::kStop : Arm::kResample;
      return argmax_arm(state.stop.mean, state.resample.mean, policy.ties_resample);
    case K::kSoftmax:
      return uniform01(rng) < softmax_resample_probability(state, policy.tau) ? Arm::kResample : Arm::kStop;
    case K::kUcb1:
      return argmax_arm(ucb1_score(state.stop, state.total_pulls), ucb1_score(state.resample, state.total_pulls),
                        policy.ties_resample);
    case K::kUcb1Tuned:
      return argmax_arm(ucb1tuned_score(state.stop, state.total_pulls),
                        ucb1tuned_score(state.resample, state.total_pulls), policy.ties_resample);
  }
  return Arm::kStop;
}

double quality_reward(std::span<const double> samples, std::span<const double> prior_averages,
                      Direction direction) {
  if (samples.empty()) throw UsageError("quality_reward: no samples");
  const double current = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  double z = 0.0;
  if (prior_averages.size() >= 2) {
    const double n = static_cast<double>(prior_averages.size());
    const double mean = std::accumulate(prior_averages.begin(), prior_averages.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : prior_averages) ss += (v - mean) * (v - mean);
    const double sd = std::max(std::sqrt(ss / (n - 1.0)), 1e-9);
    z = (current - mean) / sd;
    if (direction == Direction::kMinimize) z = -z;
  }
  return normal_cdf(z);
}

void QueryBounds::validate() const {
  if (min_runs < 1) throw UsageError("min_runs must be >= 1");
  if (min_runs > max_runs) throw UsageError("min_runs must not exceed max_runs");
}

bool decide_if_next_query(std::span<const double> samples, std::span<const double> prior_averages,
                          QOState& state, const BanditPolicy& policy, const QueryBounds& bounds,
                          Direction direction, Rng& rng) {
  bounds.validate();
  if (samples.empty()) throw UsageError("decide_if_next_query: no samples for the current configuration");
  const auto count = static_cast<long>(samples.size());
  if (count >= bounds.max_runs) return false;
  if (policy.kind == BanditPolicy::Kind::kNone) return true;
  if (count < bounds.min_runs) return true;

  const double r = quality_reward(samples, prior_averages, direction);
  state.resample = update_arm(state.resample, r);
  state.stop = update_arm(state.stop, 1.0 - r);
  state.total_pulls += 2;
  return select_arm(policy, state, rng) == Arm::kResample;
}

}  // namespace rlopt
