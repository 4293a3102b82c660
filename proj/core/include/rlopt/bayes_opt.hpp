#pragma once

#include <cstddef>
#include <vector>

#include "rlopt/gaussian_process.hpp"
#include "rlopt/random.hpp"

namespace rlopt {

/// Inner optimizer settings for maximizing the acquisition over [0, 1]^d.
struct AcquisitionConfig {
  std::size_t n_random_starts = 10'000;
  std::size_t n_local_refine = 5;
  std::size_t refine_iterations = 100;

  void validate() const;
  bool operator==(const AcquisitionConfig&) const = default;
};

struct Candidate {
  std::vector<double> theta;
  double acquisition_value = 0.0;
};

/// Expected improvement of a maximization objective:
///   (mean - f_best) Phi(Z) + std phi(Z),  Z = (mean - f_best) / std,
/// and max(mean - f_best, 0) when std == 0.
double expected_improvement(double mean, double std, double f_best);

/// EI of the model's posterior at x.
double expected_improvement_at(const GPModel& model, std::span<const double> x, double f_best);

/// argmax of EI over the unit box of the model's dimension. Scores
/// n_random_starts uniform points, refines the n_local_refine best by
/// coordinate-wise golden-section passes and returns the best point seen
/// (ties resolved to the earliest evaluation). An empty model returns a
/// uniform random point of dimension `dim`.
Candidate propose_next(const GPModel& model, double f_best, const AcquisitionConfig& config, Rng& rng);

/// n points in [0, 1)^d with exactly one point per stratum [i/n, (i+1)/n)
/// in every dimension.
std::vector<std::vector<double>> latin_hypercube(std::size_t n, std::size_t d, Rng& rng);

}  // namespace rlopt
