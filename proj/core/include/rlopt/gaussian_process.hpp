#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace rlopt {

/// Squared-exponential kernel hyper-parameters.
struct KernelParams {
  double signal_variance = 0.8;  // sigma_f^2
  double noise_variance = 0.17;  // sigma_n^2
  std::vector<double> lengthscales = std::vector<double>(4, -0.12);

  /// Throws UsageError unless signal_variance > 0, noise_variance >= 0 and
  /// every lengthscale is finite and nonzero.
  void validate() const;
  std::size_t dim() const noexcept { return lengthscales.size(); }
  double prior_variance() const noexcept { return signal_variance + noise_variance; }

  bool operator==(const KernelParams&) const = default;
};

/// Observed (x, y) pairs with a per-observation prior mean.
class GPDataset {
 public:
  explicit GPDataset(std::size_t dim = 4) : dim_(dim) {}

  void add(std::span<const double> x, double y, double prior_mean = 0.0);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return targets_.size(); }
  bool empty() const noexcept { return targets_.empty(); }

  std::span<const double> input(std::size_t i) const { return {inputs_.data() + i * dim_, dim_}; }
  std::span<const double> targets() const noexcept { return targets_; }
  std::span<const double> prior_means() const noexcept { return prior_means_; }

  /// Replaces all targets (e.g. after re-standardization); sizes must match.
  void set_targets(std::span<const double> y);

 private:
  std::size_t dim_;
  std::vector<double> inputs_;  // row-major, size() x dim_
  std::vector<double> targets_;
  std::vector<double> prior_means_;
};

/// sigma_f^2 exp(-1/2 (xi - xj)^T diag(l)^-2 (xi - xj)) + sigma_n^2 [same_index]
double se_kernel(std::span<const double> xi, std::span<const double> xj, const KernelParams& params,
                 bool same_index);

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;
};

/// Exact GP regression model; immutable once fitted.
class GPModel {
 public:
  static constexpr double kInitialJitter = 1e-9;
  static constexpr double kMaxJitter = 1e-5;

  /// Builds the Gram matrix and factorizes it, escalating a diagonal jitter
  /// from 1e-9 by x10 up to 1e-5. Throws NotPositiveDefiniteError past that.
  static GPModel fit(GPDataset dataset, KernelParams params);

  /// Posterior at x; with no data returns (prior_mean, sigma_f^2 + sigma_n^2).
  Posterior posterior(std::span<const double> x, double prior_mean = 0.0) const;

  const GPDataset& dataset() const noexcept { return dataset_; }
  const KernelParams& params() const noexcept { return params_; }
  std::size_t size() const noexcept { return dataset_.size(); }
  std::size_t dim() const noexcept { return dataset_.dim(); }
  /// Diagonal jitter that made the factorization succeed (0 for empty data).
  double jitter() const noexcept { return jitter_; }

  /// Lower-triangular factor L, row-major n x n, with K + jitter I = L L^T.
  std::span<const double> cholesky_factor() const noexcept { return chol_; }
  /// K^-1 (y - mu0).
  std::span<const double> weights() const noexcept { return weights_; }
  /// log |K| from the factor.
  double log_determinant() const;

 private:
  GPModel(GPDataset dataset, KernelParams params) : dataset_(std::move(dataset)), params_(std::move(params)) {}

  GPDataset dataset_;
  KernelParams params_;
  std::vector<double> chol_;
  std::vector<double> weights_;
  double jitter_ = 0.0;
};

/// Kernel Gram matrix of the dataset, row-major n x n, noise on the diagonal.
std::vector<double> gram_matrix(const GPDataset& dataset, const KernelParams& params);

/// -1/2 r^T K^-1 r - 1/2 log|K| - n/2 log(2 pi) with r = y - mu0.
/// Throws UsageError on an empty dataset.
double log_marginal_likelihood(const GPDataset& dataset, const KernelParams& params);

/// Mean squared error; throws UsageError on empty or mismatched input.
double mse(std::span<const double> predictions, std::span<const double> targets);

// CSV with header "theta_1,...,theta_d,y"; prior means are zero on import.
void write_dataset_csv(std::ostream& out, const GPDataset& dataset);
GPDataset read_dataset_csv(std::istream& in);

}  // namespace rlopt
