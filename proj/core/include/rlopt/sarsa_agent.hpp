#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "rlopt/gridworld.hpp"
#include "rlopt/random.hpp"

namespace rlopt {

/// Agent hyper-parameters searched by the optimizer; each lies in [0, 1].
struct HyperParams {
  double alpha = 0.0;    // step size
  double epsilon = 0.0;  // exploration rate
  double gamma = 0.0;    // discount factor
  double lambda = 0.0;   // trace decay

  static constexpr std::size_t kDim = 4;

  std::array<double, kDim> to_array() const { return {alpha, epsilon, gamma, lambda}; }
  static HyperParams from_span(std::span<const double> v);
  /// Throws UsageError when a component leaves [0, 1] or is not finite.
  void validate() const;

  bool operator==(const HyperParams&) const = default;
};

/// SARSA(lambda) defaults of the Soar cognitive architecture.
inline constexpr HyperParams kSoarDefaults{0.3, 0.1, 0.9, 0.001};

/// Dense Q(s, a) over grid states x 4 actions; unseen pairs read as 0.
class QTable {
 public:
  QTable() = default;
  explicit QTable(int num_states);

  int num_states() const noexcept { return num_states_; }
  double operator()(int state, Action a) const { return values_[slot(state, a)]; }
  double& at(int state, Action a) { return values_[slot(state, a)]; }
  std::span<const double, kNumActions> row(int state) const {
    return std::span<const double, kNumActions>(values_.data() + slot(state, Action::kUp), kNumActions);
  }
  std::span<const double> values() const noexcept { return values_; }

  bool operator==(const QTable&) const = default;

 private:
  std::size_t slot(int state, Action a) const noexcept {
    return static_cast<std::size_t>(state) * kNumActions + static_cast<std::size_t>(a);
  }

  int num_states_ = 0;
  std::vector<double> values_;
};

/// Eligibility traces kept sparse: only pairs with a live trace are stored.
class TraceTable {
 public:
  struct Entry {
    std::size_t slot;
    double value;
  };

  static constexpr double kPruneBelow = 1e-8;

  TraceTable() = default;
  explicit TraceTable(int num_states);

  double operator()(int state, Action a) const;
  std::size_t active_count() const noexcept { return entries_.size(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  void clear() noexcept;
  /// Adds `amount` to e(s, a), creating the entry if needed.
  void accumulate(int state, Action a, double amount);
  /// Sets e(s, a) = value, creating the entry if needed.
  void replace(int state, Action a, double value);
  /// Multiplies every trace by `factor` and drops those below kPruneBelow.
  void decay(double factor);

 private:
  Entry& entry_for(std::size_t slot);

  std::vector<int> position_;  // slot -> index into entries_, or -1
  std::vector<Entry> entries_;
};

enum class TraceMode { kAccumulating, kReplacing };

struct Transition {
  int state = 0;
  Action action = Action::kUp;
  double reward = 0.0;
  int next_state = 0;
  Action next_action = Action::kUp;
  bool terminal = false;
};

struct AgentTables {
  QTable q;
  TraceTable traces;
};

struct EpisodeResult {
  int steps = 0;
  bool success = false;
  int episode_index = 0;
  double reward = 0.0;  // undiscounted return of the episode
  bool operator==(const EpisodeResult&) const = default;
};

/// Fresh tables sized for `spec`. Hyper-parameters never seed knowledge.
AgentTables init_agent(const GridSpec& spec, const HyperParams& hp);

/// Uniform random action with probability epsilon, otherwise a greedy one;
/// greedy ties are broken uniformly at random.
Action select_action_egreedy(const QTable& q, int state, double epsilon, Rng& rng);

/// Boltzmann distribution over the 4 actions at temperature tau > 0.
std::array<double, kNumActions> softmax_probs(const QTable& q, int state, double tau);
Action select_action_softmax(const QTable& q, int state, double tau, Rng& rng);

/// One SARSA(lambda) backup:
///   delta = r + gamma * Q(s', a') - Q(s, a)     (Q(s', a') = 0 when terminal)
///   e(s, a) += 1                                (or = 1 for replacing traces)
///   for every live trace:  Q += alpha * delta * e;  e *= gamma * lambda
void sarsa_lambda_update(QTable& q, TraceTable& traces, const Transition& t, const HyperParams& hp,
                         TraceMode mode = TraceMode::kAccumulating);

struct EpisodeOptions {
  int cutoff = 400;
  TraceMode trace_mode = TraceMode::kAccumulating;
};

/// Runs one episode under epsilon-greedy selection, learning online. Traces
/// are cleared on entry; Q persists in `tables`. The episode is a success
/// only when the goal is entered in fewer than `cutoff` steps.
EpisodeResult run_episode(const GridSpec& spec, AgentTables& tables, const HyperParams& hp, int episode_index,
                          const EpisodeOptions& options, Rng& rng);

}  // namespace rlopt
