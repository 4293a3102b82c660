// rlopt: command-line front end for batch optimization, replay and bandit sweeps.
//
// Every subcommand accepts --config FILE plus one --<key> flag per config key
// (see `rlopt validate-config --help`); flags win over the file.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rlopt/config.hpp"
#include "rlopt/csv.hpp"
#include "rlopt/errors.hpp"
#include "rlopt/experiment.hpp"

namespace fs = std::filesystem;
using namespace rlopt;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  unsigned threads = 0;
  std::map<std::string, std::string> values;  // key -> raw flag value
  std::map<std::string, CLI::Option*> options;
  CLI::Option* seed = nullptr;
  std::string seed_value;
};

void add_common(CLI::App& cmd, CommonArgs& args) {
  cmd.add_option("--config", args.config_path, "key = value configuration file");
  cmd.add_option("--out-dir", args.out_dir, "directory for CSV artifacts and the manifest")->capture_default_str();
  cmd.add_option("--threads", args.threads, "worker threads (0: one per core)")->capture_default_str();
  args.seed = cmd.add_option("--seed", args.seed_value, "alias of --base_seed");
  for (const auto& key : config_keys()) {
    args.options[key] = cmd.add_option("--" + key, args.values[key], "override config key '" + key + "'");
  }
}

ExperimentConfig resolve_config(const CommonArgs& args) {
  std::string text;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) throw ConfigError("config", "cannot open '" + args.config_path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    text = buffer.str();
  }
  std::vector<Setting> overrides;
  for (const auto& key : config_keys()) {
    if (args.options.at(key)->count() > 0) overrides.emplace_back(key, args.values.at(key));
  }
  if (args.seed->count() > 0) overrides.emplace_back("base_seed", args.seed_value);
  return parse_config(text, overrides);
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

void finish_file(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

template <typename Writer>
void write_artifact(const fs::path& dir, const std::string& name, Writer&& writer) {
  const fs::path path = dir / name;
  auto out = open_output(path);
  writer(out);
  finish_file(out, path);
  std::cout << "wrote " << path.string() << '\n';
}

fs::path prepare_out_dir(const std::string& dir) {
  fs::create_directories(dir);
  return dir;
}

HyperParams parse_theta(const std::string& text) {
  const auto fields = csv::split(text);
  if (fields.size() != HyperParams::kDim) throw UsageError("--theta expects 4 comma-separated values");
  std::array<double, HyperParams::kDim> v{};
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = csv::parse_double(fields[i]);
  HyperParams theta = HyperParams::from_span(v);
  theta.validate();
  return theta;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int cmd_batch(const CommonArgs& args, const std::string& command, bool force_random) {
  ExperimentConfig config = resolve_config(args);
  if (force_random) config.algorithm = Algorithm::kRandomSearch;
  const GridSpec spec = resolve_layout(config);
  const auto dir = prepare_out_dir(args.out_dir);

  const auto start = Clock::now();
  const auto runs = run_batch(config, spec, args.threads);
  const double wall = seconds_since(start);
  const auto curves = aggregate_curves(runs);

  write_artifact(dir, "runs.csv", [&](std::ostream& out) { write_runs_csv(out, runs); });
  write_artifact(dir, "curves.csv", [&](std::ostream& out) { write_curves_csv(out, curves, runs.size()); });
  write_artifact(dir, "manifest", [&](std::ostream& out) { write_manifest(out, config, command, wall); });

  const auto& last = curves.back();
  std::cout << to_string(config.algorithm) << ' ' << to_string(config.metric) << ": final best mean "
            << csv::format_double(last.mean) << " +/- " << csv::format_double(last.half_width) << " over "
            << runs.size() << " executions\n";
  return 0;
}

int cmd_replay(const CommonArgs& args, const std::string& command, const std::string& runs_path,
               const std::string& theta_text, bool with_default) {
  const ExperimentConfig config = resolve_config(args);
  const GridSpec spec = resolve_layout(config);

  HyperParams theta;
  if (!theta_text.empty()) {
    theta = parse_theta(theta_text);
  } else {
    std::ifstream in(runs_path);
    if (!in) throw UsageError("cannot open '" + runs_path + "'");
    theta = best_theta(read_runs_csv(in), config.metric);
  }
  const auto dir = prepare_out_dir(args.out_dir);

  const auto start = Clock::now();
  const auto curves = replay_best(config, spec, theta, with_default);
  const double wall = seconds_since(start);

  write_artifact(dir, "replay.csv", [&](std::ostream& out) { write_replay_csv(out, curves); });
  write_artifact(dir, "manifest", [&](std::ostream& out) { write_manifest(out, config, command, wall); });
  for (const auto& c : curves) {
    std::cout << c.label << ": success " << csv::format_double(c.overall_success) << ", steps "
              << csv::format_double(c.overall_steps) << '\n';
  }
  return 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& command) {
  const ExperimentConfig config = resolve_config(args);
  const GridSpec spec = resolve_layout(config);
  const auto dir = prepare_out_dir(args.out_dir);

  const auto start = Clock::now();
  const auto rows = bandit_sweep(config, spec, args.threads);
  const double wall = seconds_since(start);

  write_artifact(dir, "sweep.csv", [&](std::ostream& out) { write_sweep_csv(out, rows); });
  write_artifact(dir, "manifest", [&](std::ostream& out) { write_manifest(out, config, command, wall); });
  for (const auto& r : rows) {
    std::cout << to_string(r.policy.kind) << ": " << csv::format_double(r.avg_total_queries) << " queries ("
              << csv::format_double(r.query_reduction_pct) << "% fewer)\n";
  }
  return 0;
}

int cmd_validate(const CommonArgs& args) {
  const ExperimentConfig config = resolve_config(args);
  resolve_layout(config);  // layout errors surface here too
  std::cout << "# config_hash: " << config_hash(config) << '\n' << format_config(config);
  return 0;
}

std::string join_command(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i > 0) out += ' ';
    out += argv[i];
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian hyper-parameter optimization for a SARSA(lambda) gridworld agent"};
  app.require_subcommand(1);

  CommonArgs optimize_args, random_args, replay_args, sweep_args, validate_args;
  auto* optimize = app.add_subcommand("optimize", "run the configured algorithm over n_executions seeds");
  add_common(*optimize, optimize_args);
  auto* random = app.add_subcommand("random-search", "same protocol with uniformly drawn configurations");
  add_common(*random, random_args);

  auto* replay = app.add_subcommand("replay-best", "replay a configuration with fresh agents");
  add_common(*replay, replay_args);
  std::string runs_path, theta_text;
  bool with_default = false;
  auto* runs_opt = replay->add_option("--runs", runs_path, "runs.csv to take the best configuration from");
  auto* theta_opt = replay->add_option("--theta", theta_text, "alpha,epsilon,gamma,lambda");
  runs_opt->excludes(theta_opt);
  replay->add_flag("--with-default", with_default, "also replay the Soar defaults (0.3, 0.1, 0.9, 0.001)");
  replay->callback([&] {
    if (runs_opt->count() == 0 && theta_opt->count() == 0) throw CLI::RequiredError("--runs or --theta");
  });

  auto* sweep = app.add_subcommand("bandit-sweep", "compare query counts across bandit policies");
  add_common(*sweep, sweep_args);
  auto* check = app.add_subcommand("validate-config", "validate and print the effective configuration");
  add_common(*check, validate_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const std::string command = join_command(argc, argv);
  try {
    if (*optimize) return cmd_batch(optimize_args, command, false);
    if (*random) return cmd_batch(random_args, command, true);
    if (*replay) return cmd_replay(replay_args, command, runs_path, theta_text, with_default);
    if (*sweep) return cmd_sweep(sweep_args, command);
    if (*check) return cmd_validate(validate_args);
  } catch (const std::exception& e) {
    std::cerr << "rlopt: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
