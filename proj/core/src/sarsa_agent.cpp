#include "rlopt/sarsa_agent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rlopt/errors.hpp"

namespace rlopt {

HyperParams HyperParams::from_span(std::span<const double> v) {
  if (v.size() != kDim) throw UsageError("HyperParams: expected 4 components, got " + std::to_string(v.size()));
  return {v[0], v[1], v[2], v[3]};
}

void HyperParams::validate() const {
  const std::array<const char*, kDim> names{"alpha", "epsilon", "gamma", "lambda"};
  const auto values = to_array();
  for (std::size_t i = 0; i < kDim; ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0 || values[i] > 1.0) {
      throw UsageError(std::string("HyperParams: ") + names[i] + " must lie in [0, 1]");
    }
  }
}

QTable::QTable(int num_states)
    : num_states_(num_states), values_(static_cast<std::size_t>(num_states) * kNumActions, 0.0) {}

TraceTable::TraceTable(int num_states) : position_(static_cast<std::size_t>(num_states) * kNumActions, -1) {
  entries_.reserve(64);
}

double TraceTable::operator()(int state, Action a) const {
  const auto slot = static_cast<std::size_t>(state) * kNumActions + static_cast<std::size_t>(a);
  const int pos = position_[slot];
  return pos < 0 ? 0.0 : entries_[static_cast<std::size_t>(pos)].value;
}

void TraceTable::clear() noexcept {
  for (const auto& e : entries_) position_[e.slot] = -1;
  entries_.clear();
}

TraceTable::Entry& TraceTable::entry_for(std::size_t slot) {
  int& pos = position_[slot];
  if (pos < 0) {
    pos = static_cast<int>(entries_.size());
    entries_.push_back({slot, 0.0});
  }
  return entries_[static_cast<std::size_t>(pos)];
}

void TraceTable::accumulate(int state, Action a, double amount) {
  entry_for(static_cast<std::size_t>(state) * kNumActions + static_cast<std::size_t>(a)).value += amount;
}

void TraceTable::replace(int state, Action a, double value) {
  entry_for(static_cast<std::size_t>(state) * kNumActions + static_cast<std::size_t>(a)).value = value;
}

void TraceTable::decay(double factor) {
  std::size_t kept = 0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    Entry e = entries_[i];
    e.value *= factor;
    if (e.value < kPruneBelow) {
      position_[e.slot] = -1;
      continue;
    }
    position_[e.slot] = static_cast<int>(kept);
    entries_[kept++] = e;
  }
  entries_.resize(kept);
}

AgentTables init_agent(const GridSpec& spec, const HyperParams& hp) {
  hp.validate();
  return {QTable(spec.num_cells()), TraceTable(spec.num_cells())};
}

namespace {

Action greedy_action(const QTable& q, int state, Rng& rng) {
  const auto row = q.row(state);
  const double best = *std::max_element(row.begin(), row.end());
  std::array<Action, kNumActions> ties{};
  std::size_t n_ties = 0;
  for (Action a : kAllActions) {
    if (row[static_cast<std::size_t>(a)] == best) ties[n_ties++] = a;
  }
  return n_ties == 1 ? ties[0] : ties[uniform_index(rng, n_ties)];
}

}  // namespace

Action select_action_egreedy(const QTable& q, int state, double epsilon, Rng& rng) {
  if (uniform01(rng) < epsilon) return kAllActions[uniform_index(rng, kNumActions)];
  return greedy_action(q, state, rng);
}

std::array<double, kNumActions> softmax_probs(const QTable& q, int state, double tau) {
  if (!(tau > 0.0)) throw UsageError("softmax_probs: temperature must be positive");
  const auto row = q.row(state);
  const double top = *std::max_element(row.begin(), row.end());
  std::array<double, kNumActions> p{};
  double total = 0.0;
  for (std::size_t i = 0; i < kNumActions; ++i) {
    p[i] = std::exp((row[i] - top) / tau);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

Action select_action_softmax(const QTable& q, int state, double tau, Rng& rng) {
  const auto p = softmax_probs(q, state, tau);
  const double u = uniform01(rng);
  double cumulative = 0.0;
  for (std::size_t i = 0; i < kNumActions; ++i) {
    cumulative += p[i];
    if (u < cumulative) return kAllActions[i];
  }
  return kAllActions.back();
}

void sarsa_lambda_update(QTable& q, TraceTable& traces, const Transition& t, const HyperParams& hp,
                         TraceMode mode) {
  const double next_value = t.terminal ? 0.0 : q(t.next_state, t.next_action);
  const double delta = t.reward + hp.gamma * next_value - q(t.state, t.action);
  if (mode == TraceMode::kAccumulating) {
    traces.accumulate(t.state, t.action, 1.0);
  } else {
    traces.replace(t.state, t.action, 1.0);
  }
  const double step = hp.alpha * delta;
  for (const auto& e : traces.entries()) {
    const int state = static_cast<int>(e.slot / kNumActions);
    const auto action = static_cast<Action>(e.slot % kNumActions);
    q.at(state, action) += step * e.value;
  }
  traces.decay(hp.gamma * hp.lambda);
}

EpisodeResult run_episode(const GridSpec& spec, AgentTables& tables, const HyperParams& hp, int episode_index,
                          const EpisodeOptions& options, Rng& rng) {
  if (options.cutoff < 1) throw UsageError("run_episode: cutoff must be >= 1");
  tables.traces.clear();

  EnvState env = reset(spec, episode_index);
  int state = spec.index(env.position);
  Action action = select_action_egreedy(tables.q, state, hp.epsilon, rng);
  double episode_return = 0.0;

  while (true) {
    const StepResult out = step(spec, env, action);
    env = out.state;
    episode_return += out.reward;
    const int next_state = spec.index(env.position);

    Transition t{state, action, out.reward, next_state, action, out.terminal};
    if (!out.terminal) t.next_action = select_action_egreedy(tables.q, next_state, hp.epsilon, rng);
    sarsa_lambda_update(tables.q, tables.traces, t, hp, options.trace_mode);

    if (out.terminal || env.step_count >= options.cutoff) break;
    state = next_state;
    action = t.next_action;
  }

  EpisodeResult result;
  result.episode_index = episode_index;
  result.success = env.position == spec.goal && env.step_count < options.cutoff;
  result.steps = result.success ? env.step_count : options.cutoff;
  result.reward = episode_return;
  return result;
}

}  // namespace rlopt
