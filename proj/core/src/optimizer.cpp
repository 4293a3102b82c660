#include "rlopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rlopt/bayes_opt.hpp"
#include "rlopt/errors.hpp"

namespace rlopt {
namespace {

bool better(double candidate, double incumbent, Direction direction) {
  return direction == Direction::kMaximize ? candidate > incumbent : candidate < incumbent;
}

void finalize(OptimizerRun& run) {
  const Direction direction = direction_of(run.metric);
  run.best_curve.clear();
  run.total_queries = 0;
  for (const auto& r : run.records) {
    const double best = run.best_curve.empty() || better(r.f_avg, run.best_curve.back(), direction)
                            ? r.f_avg
                            : run.best_curve.back();
    run.best_curve.push_back(best);
    run.total_queries += r.query_count;
  }
}

// Shared evaluation loop of both search algorithms: owns the bandit state,
// the history of averages and the meta-episode seed sequence.
class Evaluator {
 public:
  Evaluator(const ExperimentConfig& config, const GridSpec& spec, std::uint64_t seed)
      : spec_(spec), options_(meta_episode_options(config)), seed_(seed) {}

  const MetaEpisodeRecord& evaluate(const HyperParams& theta, MetaEpisodeRecord::Source source,
                                    OptimizerRun& run) {
    MetaEpisodeRecord record = run_meta_episode(theta, spec_, options_, history_, qo_,
                                                derive_seed(seed_, stream::kMetaEpisode, next_index_++));
    record.source = source;
    history_.push_back(record.f_avg);
    run.records.push_back(std::move(record));
    return run.records.back();
  }

  void add_history(double f_avg) { history_.push_back(f_avg); }

 private:
  const GridSpec& spec_;
  MetaEpisodeOptions options_;
  std::uint64_t seed_;
  std::uint64_t next_index_ = 0;
  std::vector<double> history_;
  QOState qo_;
};

void check_budget(const ExperimentConfig& config) {
  validate(config);
  if (config.episodes_bo < 1) throw UsageError("optimizer budget must be at least one meta-episode");
}

}  // namespace

double metric_success(std::span<const EpisodeResult> results) {
  if (results.empty()) throw UsageError("metric_success: no episodes");
  const auto successes = std::count_if(results.begin(), results.end(), [](const auto& r) { return r.success; });
  return static_cast<double>(successes) / static_cast<double>(results.size());
}

double metric_steps(std::span<const EpisodeResult> results) {
  if (results.empty()) throw UsageError("metric_steps: no episodes");
  double total = 0.0;
  for (const auto& r : results) total += r.steps;
  return total / static_cast<double>(results.size());
}

double evaluate_metric(Metric metric, std::span<const EpisodeResult> results) {
  return metric == Metric::kSuccessRate ? metric_success(results) : metric_steps(results);
}

std::vector<double> y_transform(std::span<const double> raw, Direction direction) {
  if (raw.empty()) throw UsageError("y_transform: empty input");
  const double n = static_cast<double>(raw.size());
  const double mean = std::accumulate(raw.begin(), raw.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : raw) ss += (v - mean) * (v - mean);
  const double sd = raw.size() > 1 ? std::max(std::sqrt(ss / (n - 1.0)), 1e-9) : 1e-9;
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double z = (raw[i] - mean) / sd;
    out[i] = direction == Direction::kMinimize ? -z : z;
  }
  return out;
}

const MetaEpisodeRecord& OptimizerRun::best_record() const {
  if (records.empty()) throw UsageError("best_record: run has no records");
  const Direction direction = direction_of(metric);
  std::size_t best = 0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (better(records[i].f_avg, records[best].f_avg, direction)) best = i;
  }
  return records[best];
}

MetaEpisodeOptions meta_episode_options(const ExperimentConfig& config) {
  MetaEpisodeOptions o;
  o.metric = config.metric;
  o.episodes_a = config.episodes_a;
  o.cutoff = config.cutoff;
  o.trace_mode = config.trace_mode;
  o.policy = config.bandit;
  o.bounds = config.bounds();
  return o;
}

std::vector<EpisodeResult> run_query(const HyperParams& theta, const GridSpec& spec, int episodes_a, int cutoff,
                                     TraceMode trace_mode, Rng& rng) {
  if (episodes_a < 1) throw UsageError("run_query: episodes_a must be >= 1");
  AgentTables tables = init_agent(spec, theta);
  const EpisodeOptions options{cutoff, trace_mode};
  std::vector<EpisodeResult> results;
  results.reserve(static_cast<std::size_t>(episodes_a));
  for (int ep = 0; ep < episodes_a; ++ep) results.push_back(run_episode(spec, tables, theta, ep, options, rng));
  return results;
}

MetaEpisodeRecord run_meta_episode(const HyperParams& theta, const GridSpec& spec, const MetaEpisodeOptions& options,
                                   std::span<const double> prior_averages, QOState& qo, std::uint64_t seed) {
  theta.validate();
  options.policy.validate();
  options.bounds.validate();
  if (options.episodes_a < 1) throw UsageError("run_meta_episode: episodes_a must be >= 1");

  Rng agent_rng(derive_seed(seed, stream::kAgent, 0));
  Rng bandit_rng(derive_seed(seed, stream::kBandit, 0));
  const Direction direction = direction_of(options.metric);

  MetaEpisodeRecord record;
  record.theta = theta;
  record.episodes_per_query = options.episodes_a;
  record.seed = seed;
  do {
    const auto results = run_query(theta, spec, options.episodes_a, options.cutoff, options.trace_mode, agent_rng);
    record.query_values.push_back(evaluate_metric(options.metric, results));
  } while (decide_if_next_query(record.query_values, prior_averages, qo, options.policy, options.bounds, direction,
                                bandit_rng));

  record.query_count = static_cast<int>(record.query_values.size());
  record.f_avg = std::accumulate(record.query_values.begin(), record.query_values.end(), 0.0) /
                 static_cast<double>(record.query_count);
  return record;
}

OptimizerRun run_optimizer(const ExperimentConfig& config, const GridSpec& spec, std::uint64_t seed,
                           const GPDataset* prior) {
  check_budget(config);
  const auto started = std::chrono::steady_clock::now();
  const Direction direction = direction_of(config.metric);

  OptimizerRun run;
  run.seed = seed;
  run.metric = config.metric;
  run.algorithm = Algorithm::kBayesOpt;

  Rng proposal_rng(derive_seed(seed, stream::kProposal, 0));
  Evaluator evaluator(config, spec, seed);
  GPDataset data(HyperParams::kDim);

  if (prior != nullptr && !prior->empty()) {
    if (prior->dim() != HyperParams::kDim) throw UsageError("prior dataset must have 4 input columns");
    for (std::size_t i = 0; i < prior->size(); ++i) {
      data.add(prior->input(i), prior->targets()[i]);
      evaluator.add_history(prior->targets()[i]);
    }
  } else if (config.init_lh > 0) {
    for (const auto& x : latin_hypercube(static_cast<std::size_t>(config.init_lh), HyperParams::kDim, proposal_rng)) {
      const auto& record = evaluator.evaluate(HyperParams::from_span(x), MetaEpisodeRecord::Source::kInitialDesign, run);
      data.add(x, record.f_avg);
    }
  }

  for (int n = 0; n < config.episodes_bo; ++n) {
    GPDataset standardized = data;
    if (!standardized.empty()) standardized.set_targets(y_transform(data.targets(), direction));
    const double f_best = standardized.empty()
                              ? 0.0
                              : *std::max_element(standardized.targets().begin(), standardized.targets().end());
    const GPModel model = GPModel::fit(std::move(standardized), config.kernel);
    const Candidate next = propose_next(model, f_best, config.acquisition, proposal_rng);
    const auto& record = evaluator.evaluate(HyperParams::from_span(next.theta), MetaEpisodeRecord::Source::kProposal, run);
    data.add(next.theta, record.f_avg);
  }

  finalize(run);
  run.wall_time = std::chrono::steady_clock::now() - started;
  return run;
}

OptimizerRun run_random_search(const ExperimentConfig& config, const GridSpec& spec, std::uint64_t seed) {
  check_budget(config);
  const auto started = std::chrono::steady_clock::now();

  OptimizerRun run;
  run.seed = seed;
  run.metric = config.metric;
  run.algorithm = Algorithm::kRandomSearch;

  Rng proposal_rng(derive_seed(seed, stream::kProposal, 0));
  Evaluator evaluator(config, spec, seed);
  for (int n = 0; n < config.episodes_bo; ++n) {
    std::array<double, HyperParams::kDim> x{};
    for (double& v : x) v = uniform01(proposal_rng);
    evaluator.evaluate(HyperParams::from_span(x), MetaEpisodeRecord::Source::kProposal, run);
  }

  finalize(run);
  run.wall_time = std::chrono::steady_clock::now() - started;
  return run;
}

OptimizerRun run_execution(const ExperimentConfig& config, const GridSpec& spec, std::uint64_t seed,
                           const GPDataset* prior) {
  return config.algorithm == Algorithm::kBayesOpt ? run_optimizer(config, spec, seed, prior)
                                                  : run_random_search(config, spec, seed);
}

}  // namespace rlopt
