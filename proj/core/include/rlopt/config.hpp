#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rlopt/bayes_opt.hpp"
#include "rlopt/gaussian_process.hpp"
#include "rlopt/query_bandit.hpp"
#include "rlopt/sarsa_agent.hpp"

namespace rlopt {

enum class Metric : std::uint8_t { kSuccessRate, kStepsPerEpisode };

/// success_rate is maximized, steps_per_episode minimized.
constexpr Direction direction_of(Metric metric) noexcept {
  return metric == Metric::kSuccessRate ? Direction::kMaximize : Direction::kMinimize;
}
std::string_view to_string(Metric metric);

enum class Algorithm : std::uint8_t { kBayesOpt, kRandomSearch };
std::string_view to_string(Algorithm algorithm);

/// Every knob of one experiment. Defaults reproduce the reference protocol:
/// 30 meta-episodes of 50 agent episodes, cutoff 400, 2..5 queries per
/// configuration, kernel (0.8, 0.17, 0.12), 10 executions.
struct ExperimentConfig {
  Metric metric = Metric::kSuccessRate;
  Algorithm algorithm = Algorithm::kBayesOpt;
  int episodes_bo = 30;
  int episodes_a = 50;
  int cutoff = 400;
  int min_runs = 2;
  int max_runs = 5;
  BanditPolicy bandit;
  KernelParams kernel;
  int init_lh = 0;
  int n_executions = 10;
  std::uint64_t base_seed = 1;
  std::string layout;       // empty: built-in double-blocking layout
  std::string prior_data;   // optional dataset CSV of raw metric values
  AcquisitionConfig acquisition;
  TraceMode trace_mode = TraceMode::kAccumulating;
  int replay_repetitions = 20;

  QueryBounds bounds() const { return {min_runs, max_runs}; }
  bool operator==(const ExperimentConfig&) const = default;
};

/// Documented key names, in canonical output order.
const std::vector<std::string>& config_keys();

/// Applies one `key = value` setting. Throws ConfigError naming the key for
/// unknown keys and unparsable values.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Checks all invariants; throws ConfigError naming the offending key(s).
void validate(const ExperimentConfig& config);

/// Parses `key = value` lines ('#' starts a comment), starting from the
/// defaults, then validates.
ExperimentConfig parse_config(std::string_view text);

/// As above, with `overrides` applied after the text and before validation.
using Setting = std::pair<std::string, std::string>;
ExperimentConfig parse_config(std::string_view text, std::span<const Setting> overrides);

/// parse_config on a file; a missing file is a ConfigError on key "config".
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical `key = value` text; parse_config(format_config(c)) == c.
std::string format_config(const ExperimentConfig& config);

/// FNV-1a 64 of format_config, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

}  // namespace rlopt
