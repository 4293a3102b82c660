#include "rlopt/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rlopt/csv.hpp"
#include "rlopt/errors.hpp"

namespace rlopt {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename Int>
Int parse_integer(std::string_view key, std::string_view value) {
  Int out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (value.empty() || ec != std::errc{} || ptr != end) {
    throw ConfigError(std::string(key), "expected an integer, got '" + std::string(value) + "'");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  try {
    return csv::parse_double(value);
  } catch (const UsageError&) {
    throw ConfigError(std::string(key), "expected a number, got '" + std::string(value) + "'");
  }
}

std::vector<double> parse_real_list(std::string_view key, std::string_view value) {
  std::vector<double> out;
  for (const auto& field : csv::split(value)) out.push_back(parse_real(key, trim(field)));
  return out;
}

std::string format_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) s += ",";
    s += csv::format_double(v[i]);
  }
  return s;
}

}  // namespace

std::string_view to_string(Metric metric) {
  return metric == Metric::kSuccessRate ? "success_rate" : "steps_per_episode";
}

std::string_view to_string(Algorithm algorithm) {
  return algorithm == Algorithm::kBayesOpt ? "bo" : "random_search";
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "metric",           "algorithm",         "episodes_bo",      "episodes_a",
      "cutoff",           "min_runs",          "max_runs",         "bandit_policy",
      "bandit_epsilon",   "bandit_tau",        "bandit_ties",      "sigma_f2",
      "sigma_n2",         "lengthscales",      "init_lh",          "n_executions",
      "base_seed",        "layout",            "prior_data",       "acq_random_starts",
      "acq_local_refine", "acq_refine_iterations", "trace_mode",   "replay_repetitions",
  };
  return keys;
}

void apply_setting(ExperimentConfig& c, std::string_view key_view, std::string_view raw) {
  const std::string key(trim(key_view));
  const std::string_view value = trim(raw);

  if (key == "metric") {
    if (value == "success_rate") c.metric = Metric::kSuccessRate;
    else if (value == "steps_per_episode") c.metric = Metric::kStepsPerEpisode;
    else throw ConfigError(key, "expected success_rate or steps_per_episode");
  } else if (key == "algorithm") {
    if (value == "bo") c.algorithm = Algorithm::kBayesOpt;
    else if (value == "random_search") c.algorithm = Algorithm::kRandomSearch;
    else throw ConfigError(key, "expected bo or random_search");
  } else if (key == "episodes_bo") {
    c.episodes_bo = parse_integer<int>(key, value);
  } else if (key == "episodes_a") {
    c.episodes_a = parse_integer<int>(key, value);
  } else if (key == "cutoff") {
    c.cutoff = parse_integer<int>(key, value);
  } else if (key == "min_runs") {
    c.min_runs = parse_integer<int>(key, value);
  } else if (key == "max_runs") {
    c.max_runs = parse_integer<int>(key, value);
  } else if (key == "bandit_policy") {
    try {
      c.bandit.kind = parse_policy_kind(value);
    } catch (const UsageError& e) {
      throw ConfigError(key, e.what());
    }
  } else if (key == "bandit_epsilon") {
    c.bandit.epsilon = parse_real(key, value);
  } else if (key == "bandit_tau") {
    c.bandit.tau = parse_real(key, value);
  } else if (key == "bandit_ties") {
    if (value == "resample") c.bandit.ties_resample = true;
    else if (value == "stop") c.bandit.ties_resample = false;
    else throw ConfigError(key, "expected resample or stop");
  } else if (key == "sigma_f2") {
    c.kernel.signal_variance = parse_real(key, value);
  } else if (key == "sigma_n2") {
    c.kernel.noise_variance = parse_real(key, value);
  } else if (key == "lengthscales") {
    auto l = parse_real_list(key, value);
    if (l.size() == 1) l.assign(HyperParams::kDim, l.front());
    c.kernel.lengthscales = std::move(l);
  } else if (key == "init_lh") {
    c.init_lh = parse_integer<int>(key, value);
  } else if (key == "n_executions") {
    c.n_executions = parse_integer<int>(key, value);
  } else if (key == "base_seed") {
    c.base_seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "layout") {
    c.layout = std::string(value);
  } else if (key == "prior_data") {
    c.prior_data = std::string(value);
  } else if (key == "acq_random_starts") {
    c.acquisition.n_random_starts = parse_integer<std::size_t>(key, value);
  } else if (key == "acq_local_refine") {
    c.acquisition.n_local_refine = parse_integer<std::size_t>(key, value);
  } else if (key == "acq_refine_iterations") {
    c.acquisition.refine_iterations = parse_integer<std::size_t>(key, value);
  } else if (key == "trace_mode") {
    if (value == "accumulating") c.trace_mode = TraceMode::kAccumulating;
    else if (value == "replacing") c.trace_mode = TraceMode::kReplacing;
    else throw ConfigError(key, "expected accumulating or replacing");
  } else if (key == "replay_repetitions") {
    c.replay_repetitions = parse_integer<int>(key, value);
  } else {
    throw ConfigError(key, "unknown configuration key");
  }
}

void validate(const ExperimentConfig& c) {
  const auto require_positive = [](const char* key, long long v) {
    if (v < 1) throw ConfigError(key, "must be >= 1");
  };
  require_positive("episodes_bo", c.episodes_bo);
  require_positive("episodes_a", c.episodes_a);
  require_positive("cutoff", c.cutoff);
  require_positive("min_runs", c.min_runs);
  require_positive("max_runs", c.max_runs);
  require_positive("n_executions", c.n_executions);
  require_positive("replay_repetitions", c.replay_repetitions);
  if (c.init_lh < 0) throw ConfigError("init_lh", "must be >= 0");
  if (c.min_runs > c.max_runs) throw ConfigError("min_runs/max_runs", "min_runs must not exceed max_runs");
  if (!(c.bandit.epsilon >= 0.0 && c.bandit.epsilon <= 1.0)) {
    throw ConfigError("bandit_epsilon", "must lie in [0, 1]");
  }
  if (!(c.bandit.tau > 0.0) || !std::isfinite(c.bandit.tau)) throw ConfigError("bandit_tau", "must be positive");
  if (!(c.kernel.signal_variance > 0.0) || !std::isfinite(c.kernel.signal_variance)) {
    throw ConfigError("sigma_f2", "must be positive");
  }
  if (!(c.kernel.noise_variance >= 0.0) || !std::isfinite(c.kernel.noise_variance)) {
    throw ConfigError("sigma_n2", "must be non-negative");
  }
  if (c.kernel.lengthscales.size() != HyperParams::kDim) {
    throw ConfigError("lengthscales", "expected 1 or 4 values");
  }
  for (double l : c.kernel.lengthscales) {
    if (l == 0.0 || !std::isfinite(l)) throw ConfigError("lengthscales", "must be finite and nonzero");
  }
  require_positive("acq_random_starts", static_cast<long long>(c.acquisition.n_random_starts));
  require_positive("acq_refine_iterations", static_cast<long long>(c.acquisition.refine_iterations));
}

ExperimentConfig parse_config(std::string_view text) { return parse_config(text, {}); }

ExperimentConfig parse_config(std::string_view text, std::span<const Setting> overrides) {
  ExperimentConfig config;
  std::istringstream in{std::string(text)};
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    }
    apply_setting(config, view.substr(0, eq), view.substr(eq + 1));
  }
  for (const auto& [key, value] : overrides) apply_setting(config, key, value);
  validate(config);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string format_config(const ExperimentConfig& c) {
  std::ostringstream out;
  const auto put = [&](std::string_view key, const std::string& value) { out << key << " = " << value << '\n'; };
  put("metric", std::string(to_string(c.metric)));
  put("algorithm", std::string(to_string(c.algorithm)));
  put("episodes_bo", std::to_string(c.episodes_bo));
  put("episodes_a", std::to_string(c.episodes_a));
  put("cutoff", std::to_string(c.cutoff));
  put("min_runs", std::to_string(c.min_runs));
  put("max_runs", std::to_string(c.max_runs));
  put("bandit_policy", std::string(to_string(c.bandit.kind)));
  put("bandit_epsilon", csv::format_double(c.bandit.epsilon));
  put("bandit_tau", csv::format_double(c.bandit.tau));
  put("bandit_ties", c.bandit.ties_resample ? "resample" : "stop");
  put("sigma_f2", csv::format_double(c.kernel.signal_variance));
  put("sigma_n2", csv::format_double(c.kernel.noise_variance));
  put("lengthscales", format_list(c.kernel.lengthscales));
  put("init_lh", std::to_string(c.init_lh));
  put("n_executions", std::to_string(c.n_executions));
  put("base_seed", std::to_string(c.base_seed));
  put("layout", c.layout);
  put("prior_data", c.prior_data);
  put("acq_random_starts", std::to_string(c.acquisition.n_random_starts));
  put("acq_local_refine", std::to_string(c.acquisition.n_local_refine));
  put("acq_refine_iterations", std::to_string(c.acquisition.refine_iterations));
  put("trace_mode", c.trace_mode == TraceMode::kAccumulating ? "accumulating" : "replacing");
  put("replay_repetitions", std::to_string(c.replay_repetitions));
  return out.str();
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : format_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rlopt
