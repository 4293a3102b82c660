#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "rlopt/random.hpp"

namespace rlopt {

enum class Direction : std::uint8_t { kMaximize, kMinimize };

/// Streaming pull count, mean and sum of squared deviations of one arm.
struct ArmStats {
  long pulls = 0;
  double mean = 0.0;
  double m2 = 0.0;

  /// Sample variance m2 / (pulls - 1); 0 below two pulls.
  double variance() const noexcept { return pulls >= 2 ? m2 / static_cast<double>(pulls - 1) : 0.0; }
  bool operator==(const ArmStats&) const = default;
};

/// Welford update with one reward.
ArmStats update_arm(ArmStats arm, double reward);

/// mean + sqrt(2 ln t / n); +infinity for an unpulled arm. t is the total
/// pull count; it is real-valued only so that hand cases like t = e work.
double ucb1_score(const ArmStats& arm, double t);

/// mean + sqrt((ln t / n) min(1/4, V)),  V = variance + sqrt(2 ln t / n);
/// +infinity for an unpulled arm.
double ucb1tuned_score(const ArmStats& arm, double t);

struct BanditPolicy {
  enum class Kind : std::uint8_t { kNone, kGreedy, kEpsilonGreedy, kSoftmax, kUcb1, kUcb1Tuned };

  Kind kind = Kind::kNone;
  double epsilon = 0.2;         // kEpsilonGreedy
  double tau = 1.0;             // kSoftmax
  bool ties_resample = true;    // tie resolution for the argmax policies

  static BanditPolicy none() { return {}; }
  static BanditPolicy greedy() { return {Kind::kGreedy}; }
  static BanditPolicy epsilon_greedy(double eps = 0.2) { return {Kind::kEpsilonGreedy, eps}; }
  static BanditPolicy softmax(double tau = 1.0) { return {Kind::kSoftmax, 0.2, tau}; }
  static BanditPolicy ucb1() { return {Kind::kUcb1}; }
  static BanditPolicy ucb1tuned() { return {Kind::kUcb1Tuned}; }

  void validate() const;
  bool operator==(const BanditPolicy&) const = default;
};

std::string_view to_string(BanditPolicy::Kind kind);
/// Accepts none, greedy, egreedy, softmax, ucb1, ucb1tuned.
BanditPolicy::Kind parse_policy_kind(std::string_view name);

enum class Arm : std::uint8_t { kStop, kResample };

/// Two-armed bandit state; persists across the meta-episodes of one run.
struct QOState {
  ArmStats stop;
  ArmStats resample;
  long total_pulls = 0;

  const ArmStats& arm(Arm a) const noexcept { return a == Arm::kStop ? stop : resample; }
  bool operator==(const QOState&) const = default;
};

/// Probability of choosing the resample arm under softmax: P(i) ~ exp(tau mean_i).
double softmax_resample_probability(const QOState& state, double tau);

Arm select_arm(const BanditPolicy& policy, const QOState& state, Rng& rng);

/// Quality reward of the current configuration: Phi(z) with z the
/// standardized score of mean(samples) against the prior meta-episode
/// averages (negated when minimizing; 0 with fewer than two priors).
double quality_reward(std::span<const double> samples, std::span<const double> prior_averages,
                      Direction direction);

struct QueryBounds {
  int min_runs = 2;
  int max_runs = 5;
  void validate() const;
};

/// Whether to query f again under the same configuration.
///
/// Below min_runs samples: always true. At max_runs or more: always false.
/// In between, credits quality_reward r to the resample arm and 1 - r to
/// the stop arm, then asks the policy. With Kind::kNone the bandit is
/// bypassed and exactly max_runs queries are made.
bool decide_if_next_query(std::span<const double> samples, std::span<const double> prior_averages,
                          QOState& state, const BanditPolicy& policy, const QueryBounds& bounds,
                          Direction direction, Rng& rng);

}  // namespace rlopt
