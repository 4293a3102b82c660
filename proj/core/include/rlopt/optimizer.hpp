#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rlopt/config.hpp"
#include "rlopt/gaussian_process.hpp"
#include "rlopt/gridworld.hpp"
#include "rlopt/query_bandit.hpp"
#include "rlopt/sarsa_agent.hpp"

namespace rlopt {

/// Fraction of successful episodes. Throws UsageError on empty input.
double metric_success(std::span<const EpisodeResult> results);

/// Mean steps per episode, cutoff counted for failures. Throws on empty input.
double metric_steps(std::span<const EpisodeResult> results);

double evaluate_metric(Metric metric, std::span<const EpisodeResult> results);

/// z-standardizes (sample std, floored at 1e-9) and negates for
/// minimization so that larger is always better.
std::vector<double> y_transform(std::span<const double> raw, Direction direction);

/// One query of f: the averaged outcome of a single configuration.
struct MetaEpisodeRecord {
  enum class Source : std::uint8_t { kInitialDesign, kProposal };

  HyperParams theta;
  std::vector<double> query_values;  // metric of each query
  double f_avg = 0.0;                // mean of query_values
  int query_count = 0;
  int episodes_per_query = 0;
  std::uint64_t seed = 0;
  Source source = Source::kProposal;
};

struct OptimizerRun {
  std::vector<MetaEpisodeRecord> records;
  std::vector<double> best_curve;  // running optimum of f_avg
  long total_queries = 0;
  std::uint64_t seed = 0;
  Metric metric = Metric::kSuccessRate;
  Algorithm algorithm = Algorithm::kBayesOpt;
  std::chrono::duration<double> wall_time{0};

  /// Record holding the optimum of f_avg (earliest on ties).
  const MetaEpisodeRecord& best_record() const;
};

struct MetaEpisodeOptions {
  Metric metric = Metric::kSuccessRate;
  int episodes_a = 50;
  int cutoff = 400;
  TraceMode trace_mode = TraceMode::kAccumulating;
  BanditPolicy policy;
  QueryBounds bounds;
};

MetaEpisodeOptions meta_episode_options(const ExperimentConfig& config);

/// Runs queries of `episodes_a` episodes under theta. Every query starts
/// from a fresh agent; Q persists across the episodes of one query and the
/// obstacle schedule follows the episode index within the query. The bandit
/// in `qo` decides between queries. Agent and bandit randomness derive from
/// `seed` only.
MetaEpisodeRecord run_meta_episode(const HyperParams& theta, const GridSpec& spec, const MetaEpisodeOptions& options,
                                   std::span<const double> prior_averages, QOState& qo, std::uint64_t seed);

/// Agent-only query: runs episodes_a episodes from a fresh agent and returns
/// the per-episode results.
std::vector<EpisodeResult> run_query(const HyperParams& theta, const GridSpec& spec, int episodes_a, int cutoff,
                                     TraceMode trace_mode, Rng& rng);

/// Bayesian optimization over the 4 agent hyper-parameters.
///
/// When `prior` is given its rows seed the dataset (raw metric values) and
/// the Latin-hypercube design is skipped; otherwise init_lh design points are
/// evaluated first. Each of the episodes_bo meta-episodes then fits the GP on
/// y_transform'ed data, maximizes EI and evaluates the proposal. Throws
/// UsageError for a zero budget.
OptimizerRun run_optimizer(const ExperimentConfig& config, const GridSpec& spec, std::uint64_t seed,
                           const GPDataset* prior = nullptr);

/// Same protocol and accounting with theta drawn uniformly from [0, 1]^4.
OptimizerRun run_random_search(const ExperimentConfig& config, const GridSpec& spec, std::uint64_t seed);

/// Dispatches on config.algorithm.
OptimizerRun run_execution(const ExperimentConfig& config, const GridSpec& spec, std::uint64_t seed,
                           const GPDataset* prior = nullptr);

}  // namespace rlopt
