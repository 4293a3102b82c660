#include "rlopt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <ostream>
#include <thread>

#include "rlopt/csv.hpp"
#include "rlopt/errors.hpp"

namespace rlopt {
namespace {

std::string_view source_name(MetaEpisodeRecord::Source s) {
  return s == MetaEpisodeRecord::Source::kInitialDesign ? "initial_design" : "proposal";
}

CurveStats stats_of(const std::vector<double>& values) {
  CurveStats s;
  const double n = static_cast<double>(values.size());
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / n;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
    s.half_width = 1.96 * s.std / std::sqrt(n);
  }
  // Rounding in the mean can step outside [min, max] by an ulp.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

}  // namespace

GridSpec resolve_layout(const ExperimentConfig& config) {
  return config.layout.empty() ? default_layout() : load_layout(config.layout);
}

std::optional<GPDataset> resolve_prior(const ExperimentConfig& config) {
  if (config.prior_data.empty()) return std::nullopt;
  std::ifstream in(config.prior_data);
  if (!in) throw ConfigError("prior_data", "cannot open '" + config.prior_data + "'");
  return read_dataset_csv(in);
}

std::vector<OptimizerRun> run_batch(const ExperimentConfig& config, const GridSpec& spec, unsigned threads) {
  validate(config);
  const auto prior = resolve_prior(config);
  const auto n = static_cast<std::size_t>(config.n_executions);
  std::vector<OptimizerRun> runs(n);
  std::vector<std::exception_ptr> errors(n);

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        runs[i] = run_execution(config, spec, config.base_seed + i, prior ? &*prior : nullptr);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    const std::string seed = std::to_string(config.base_seed + i);
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error("execution with seed " + seed + " failed: " + e.what());
    }
  }
  return runs;
}

std::vector<CurveStats> aggregate_curves(const std::vector<OptimizerRun>& runs) {
  if (runs.empty()) throw UsageError("aggregate_curves: no runs");
  const std::size_t length = runs.front().best_curve.size();
  for (const auto& r : runs) {
    if (r.best_curve.size() != length) throw UsageError("aggregate_curves: runs have different lengths");
  }
  std::vector<CurveStats> out;
  out.reserve(length);
  std::vector<double> column(runs.size());
  for (std::size_t k = 0; k < length; ++k) {
    for (std::size_t i = 0; i < runs.size(); ++i) column[i] = runs[i].best_curve[k];
    out.push_back(stats_of(column));
  }
  return out;
}

void write_runs_csv(std::ostream& out, const std::vector<OptimizerRun>& runs) {
  csv::write_row(out, {"execution", "seed", "meta_episode", "source", "alpha", "epsilon", "gamma", "lambda",
                       "query_count", "query_values", "f_avg", "best_so_far"});
  for (std::size_t e = 0; e < runs.size(); ++e) {
    const auto& run = runs[e];
    for (std::size_t k = 0; k < run.records.size(); ++k) {
      const auto& r = run.records[k];
      std::string values;
      for (std::size_t q = 0; q < r.query_values.size(); ++q) {
        if (q > 0) values += ';';
        values += csv::format_double(r.query_values[q]);
      }
      csv::write_row(out, {std::to_string(e), std::to_string(run.seed), std::to_string(k),
                           std::string(source_name(r.source)), csv::format_double(r.theta.alpha),
                           csv::format_double(r.theta.epsilon), csv::format_double(r.theta.gamma),
                           csv::format_double(r.theta.lambda), std::to_string(r.query_count), values,
                           csv::format_double(r.f_avg), csv::format_double(run.best_curve[k])});
    }
  }
}

void write_curves_csv(std::ostream& out, const std::vector<CurveStats>& curves, std::size_t n_runs) {
  csv::write_row(out, {"meta_episode", "mean", "std", "ci95_half_width", "min", "max", "n"});
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& c = curves[k];
    csv::write_row(out, {std::to_string(k), csv::format_double(c.mean), csv::format_double(c.std),
                         csv::format_double(c.half_width), csv::format_double(c.min), csv::format_double(c.max),
                         std::to_string(n_runs)});
  }
}

std::vector<RunRow> read_runs_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw UsageError("runs CSV: missing header");
  const auto header = csv::split(line);
  const auto column = [&](std::string_view name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw UsageError("runs CSV: missing column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_exec = column("execution"), c_meta = column("meta_episode"), c_a = column("alpha"),
                    c_e = column("epsilon"), c_g = column("gamma"), c_l = column("lambda"),
                    c_q = column("query_count"), c_f = column("f_avg"), c_b = column("best_so_far");
  std::vector<RunRow> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = csv::split(line);
    if (f.size() != header.size()) throw UsageError("runs CSV: ragged row");
    RunRow r;
    r.execution = static_cast<int>(csv::parse_double(f[c_exec]));
    r.meta_episode = static_cast<int>(csv::parse_double(f[c_meta]));
    r.theta = {csv::parse_double(f[c_a]), csv::parse_double(f[c_e]), csv::parse_double(f[c_g]),
               csv::parse_double(f[c_l])};
    r.query_count = static_cast<int>(csv::parse_double(f[c_q]));
    r.f_avg = csv::parse_double(f[c_f]);
    r.best_so_far = csv::parse_double(f[c_b]);
    rows.push_back(r);
  }
  return rows;
}

HyperParams best_theta(const std::vector<RunRow>& rows, Metric metric) {
  if (rows.empty()) throw UsageError("best_theta: no rows");
  const bool maximize = direction_of(metric) == Direction::kMaximize;
  const auto it = std::min_element(rows.begin(), rows.end(), [&](const RunRow& a, const RunRow& b) {
    return maximize ? a.f_avg > b.f_avg : a.f_avg < b.f_avg;
  });
  return it->theta;
}

ReplayCurve replay(const ExperimentConfig& config, const GridSpec& spec, const HyperParams& theta,
                   const std::string& label, int repetitions) {
  if (repetitions < 1) throw UsageError("replay: repetitions must be >= 1");
  theta.validate();
  const auto episodes = static_cast<std::size_t>(config.episodes_a);
  ReplayCurve curve;
  curve.label = label;
  curve.theta = theta;
  curve.mean_reward.assign(episodes, 0.0);
  curve.mean_steps.assign(episodes, 0.0);
  curve.success_rate.assign(episodes, 0.0);

  std::vector<EpisodeResult> all;
  all.reserve(episodes * static_cast<std::size_t>(repetitions));
  for (int r = 0; r < repetitions; ++r) {
    Rng rng(derive_seed(config.base_seed, stream::kReplay, static_cast<std::uint64_t>(r)));
    const auto results = run_query(theta, spec, config.episodes_a, config.cutoff, config.trace_mode, rng);
    for (std::size_t ep = 0; ep < episodes; ++ep) {
      curve.mean_reward[ep] += results[ep].reward;
      curve.mean_steps[ep] += results[ep].steps;
      curve.success_rate[ep] += results[ep].success ? 1.0 : 0.0;
    }
    all.insert(all.end(), results.begin(), results.end());
  }
  const double reps = repetitions;
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    curve.mean_reward[ep] /= reps;
    curve.mean_steps[ep] /= reps;
    curve.success_rate[ep] /= reps;
  }
  curve.overall_success = metric_success(all);
  curve.overall_steps = metric_steps(all);
  return curve;
}

std::vector<ReplayCurve> replay_best(const ExperimentConfig& config, const GridSpec& spec, const HyperParams& theta,
                                     bool include_default) {
  validate(config);
  std::vector<ReplayCurve> curves;
  curves.push_back(replay(config, spec, theta, "best", config.replay_repetitions));
  if (include_default) curves.push_back(replay(config, spec, kSoarDefaults, "soar_default", config.replay_repetitions));
  return curves;
}

void write_replay_csv(std::ostream& out, const std::vector<ReplayCurve>& curves) {
  csv::write_row(out, {"label", "alpha", "epsilon", "gamma", "lambda", "episode", "mean_reward", "mean_steps",
                       "success_rate"});
  for (const auto& c : curves) {
    for (std::size_t ep = 0; ep < c.mean_steps.size(); ++ep) {
      csv::write_row(out, {c.label, csv::format_double(c.theta.alpha), csv::format_double(c.theta.epsilon),
                           csv::format_double(c.theta.gamma), csv::format_double(c.theta.lambda),
                           std::to_string(ep), csv::format_double(c.mean_reward[ep]),
                           csv::format_double(c.mean_steps[ep]), csv::format_double(c.success_rate[ep])});
    }
  }
}

std::vector<SweepRow> bandit_sweep(const ExperimentConfig& config, const GridSpec& spec, unsigned threads) {
  validate(config);
  using K = BanditPolicy::Kind;
  std::vector<SweepRow> rows;
  for (K kind : {K::kNone, K::kSoftmax, K::kEpsilonGreedy, K::kGreedy, K::kUcb1, K::kUcb1Tuned}) {
    ExperimentConfig variant = config;
    variant.bandit.kind = kind;
    const auto runs = run_batch(variant, spec, threads);

    SweepRow row;
    row.policy = variant.bandit;
    std::vector<double> finals;
    for (const auto& r : runs) {
      row.avg_total_queries += static_cast<double>(r.total_queries);
      row.avg_wall_time_s += r.wall_time.count();
      finals.push_back(r.best_curve.back());
    }
    row.avg_total_queries /= static_cast<double>(runs.size());
    row.avg_wall_time_s /= static_cast<double>(runs.size());
    row.final_best = stats_of(finals);
    rows.push_back(row);
  }
  const double baseline = rows.front().avg_total_queries;
  for (auto& row : rows) row.query_reduction_pct = (1.0 - row.avg_total_queries / baseline) * 100.0;
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  csv::write_row(out, {"policy", "avg_total_queries", "query_reduction_pct", "final_best_mean", "final_best_std",
                       "final_best_ci95_half_width", "final_best_min", "final_best_max", "avg_wall_time_s"});
  for (const auto& r : rows) {
    csv::write_row(out, {std::string(to_string(r.policy.kind)), csv::format_double(r.avg_total_queries),
                         csv::format_double(r.query_reduction_pct), csv::format_double(r.final_best.mean),
                         csv::format_double(r.final_best.std), csv::format_double(r.final_best.half_width),
                         csv::format_double(r.final_best.min), csv::format_double(r.final_best.max),
                         csv::format_double(r.avg_wall_time_s)});
  }
}

void write_manifest(std::ostream& out, const ExperimentConfig& config, const std::string& command,
                    double wall_time_s) {
  out << "# command: " << command << '\n';
  out << "# config_hash: " << config_hash(config) << '\n';
  out << "# wall_time_s: " << csv::format_double(wall_time_s) << '\n';
  out << format_config(config);
}

}  // namespace rlopt
