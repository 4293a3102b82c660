#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rlopt/config.hpp"
#include "rlopt/gridworld.hpp"
#include "rlopt/optimizer.hpp"

namespace rlopt {

/// Grid for a config: the layout file when set, else the built-in layout.
GridSpec resolve_layout(const ExperimentConfig& config);

/// Prior dataset for a config, when prior_data is set.
std::optional<GPDataset> resolve_prior(const ExperimentConfig& config);

/// Runs n_executions independent executions with seeds base_seed + i, on up
/// to `threads` workers (0: hardware concurrency). Results are ordered by
/// execution index. The first failure is rethrown with its seed attached.
std::vector<OptimizerRun> run_batch(const ExperimentConfig& config, const GridSpec& spec, unsigned threads = 0);

/// Across-execution statistics of best_curve at one meta-episode index.
struct CurveStats {
  double mean = 0.0;
  double std = 0.0;         // sample standard deviation, 0 for one run
  double half_width = 0.0;  // 1.96 std / sqrt(n) for n >= 2, else 0
  double min = 0.0;
  double max = 0.0;
};

/// Throws UsageError on an empty batch or ragged curve lengths.
std::vector<CurveStats> aggregate_curves(const std::vector<OptimizerRun>& runs);

// runs.csv columns:
//   execution,seed,meta_episode,source,alpha,epsilon,gamma,lambda,
//   query_count,query_values,f_avg,best_so_far
// query_values is ';'-separated.
void write_runs_csv(std::ostream& out, const std::vector<OptimizerRun>& runs);

// curves.csv columns: meta_episode,mean,std,ci95_half_width,min,max,n
void write_curves_csv(std::ostream& out, const std::vector<CurveStats>& curves, std::size_t n_runs);

/// One row of runs.csv, as read back.
struct RunRow {
  int execution = 0;
  int meta_episode = 0;
  HyperParams theta;
  int query_count = 0;
  double f_avg = 0.0;
  double best_so_far = 0.0;
};
std::vector<RunRow> read_runs_csv(std::istream& in);

/// Best configuration across all rows for the metric's direction.
HyperParams best_theta(const std::vector<RunRow>& rows, Metric metric);

/// Learning curve of one configuration averaged over repetitions.
struct ReplayCurve {
  std::string label;
  HyperParams theta;
  std::vector<double> mean_reward;   // per episode index
  std::vector<double> mean_steps;
  std::vector<double> success_rate;
  double overall_success = 0.0;      // metric_success over all episodes
  double overall_steps = 0.0;        // metric_steps over all episodes

  double overall(Metric metric) const { return metric == Metric::kSuccessRate ? overall_success : overall_steps; }
};

/// `repetitions` fresh agents x episodes_a episodes under theta. Repetition
/// r uses the same seed for every theta so curves are paired.
ReplayCurve replay(const ExperimentConfig& config, const GridSpec& spec, const HyperParams& theta,
                   const std::string& label, int repetitions);

/// Replays `theta` (label "best") and, when requested, the Soar defaults
/// (label "soar_default") with config.replay_repetitions repetitions.
std::vector<ReplayCurve> replay_best(const ExperimentConfig& config, const GridSpec& spec, const HyperParams& theta,
                                     bool include_default);

// replay.csv columns:
//   label,alpha,epsilon,gamma,lambda,episode,mean_reward,mean_steps,success_rate
void write_replay_csv(std::ostream& out, const std::vector<ReplayCurve>& curves);

struct SweepRow {
  BanditPolicy policy;
  double avg_total_queries = 0.0;
  double avg_wall_time_s = 0.0;
  double query_reduction_pct = 0.0;  // (1 - queries / no-bandit queries) * 100
  CurveStats final_best;
};

/// The batch once per policy in {none, softmax, egreedy, greedy, ucb1,
/// ucb1tuned} with shared seeds. epsilon and tau come from the config.
std::vector<SweepRow> bandit_sweep(const ExperimentConfig& config, const GridSpec& spec, unsigned threads = 0);

// sweep.csv columns:
//   policy,avg_total_queries,query_reduction_pct,final_best_mean,
//   final_best_std,final_best_ci95_half_width,final_best_min,final_best_max,
//   avg_wall_time_s
// Every column except avg_wall_time_s is a deterministic function of the config.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Manifest: the canonical config text (loadable with load_config) preceded
/// by '#' comment lines with the command, config hash and wall time.
void write_manifest(std::ostream& out, const ExperimentConfig& config, const std::string& command,
                    double wall_time_s);

}  // namespace rlopt
