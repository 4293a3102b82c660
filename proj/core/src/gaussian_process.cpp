#include "rlopt/gaussian_process.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>

#include "rlopt/csv.hpp"
#include "rlopt/errors.hpp"

namespace rlopt {
namespace {

// In-place lower Cholesky of a row-major n x n matrix. Returns false when a
// pivot is not strictly positive.
bool cholesky_in_place(std::vector<double>& a, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) diag -= a[j * n + k] * a[j * n + k];
    if (!(diag > 0.0) || !std::isfinite(diag)) return false;
    const double ljj = std::sqrt(diag);
    a[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / ljj;
    }
    for (std::size_t k = j + 1; k < n; ++k) a[j * n + k] = 0.0;
  }
  return true;
}

// Solves L z = b in place.
void forward_substitute(std::span<const double> l, std::size_t n, std::span<double> b) {
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * b[k];
    b[i] = s / l[i * n + i];
  }
}

// Solves L^T z = b in place.
void backward_substitute(std::span<const double> l, std::size_t n, std::span<double> b) {
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l[k * n + ii] * b[k];
    b[ii] = s / l[ii * n + ii];
  }
}

struct Factorization {
  std::vector<double> chol;
  double jitter = 0.0;
};

Factorization factorize(const GPDataset& dataset, const KernelParams& params) {
  const std::size_t n = dataset.size();
  const std::vector<double> gram = gram_matrix(dataset, params);
  // Zero jitter first so a well-conditioned K is reproduced exactly; then
  // the escalation schedule for near-duplicate inputs. Levels are literals:
  // repeated *10 from 1e-9 lands just under 1e-5 and would overshoot.
  static constexpr std::array<double, 6> kLevels{0.0, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5};
  static_assert(kLevels[1] == GPModel::kInitialJitter && kLevels.back() == GPModel::kMaxJitter);
  for (const double jitter : kLevels) {
    Factorization f{gram, jitter};
    for (std::size_t i = 0; i < n; ++i) f.chol[i * n + i] += jitter;
    if (cholesky_in_place(f.chol, n)) return f;
  }
  throw NotPositiveDefiniteError(
      "kernel matrix not positive definite even with jitter " + csv::format_double(GPModel::kMaxJitter),
      GPModel::kMaxJitter);
}

std::vector<double> residuals(const GPDataset& dataset) {
  std::vector<double> r(dataset.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = dataset.targets()[i] - dataset.prior_means()[i];
  return r;
}

}  // namespace

void KernelParams::validate() const {
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) {
    throw UsageError("KernelParams: signal variance must be positive");
  }
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw UsageError("KernelParams: noise variance must be non-negative");
  }
  if (lengthscales.empty()) throw UsageError("KernelParams: lengthscales must not be empty");
  for (double l : lengthscales) {
    if (l == 0.0 || !std::isfinite(l)) throw UsageError("KernelParams: lengthscales must be finite and nonzero");
  }
}

void GPDataset::add(std::span<const double> x, double y, double prior_mean) {
  if (x.size() != dim_) {
    throw UsageError("GPDataset::add: expected " + std::to_string(dim_) + " inputs, got " +
                     std::to_string(x.size()));
  }
  if (!std::isfinite(y) || !std::isfinite(prior_mean) ||
      !std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); })) {
    throw UsageError("GPDataset::add: non-finite value");
  }
  inputs_.insert(inputs_.end(), x.begin(), x.end());
  targets_.push_back(y);
  prior_means_.push_back(prior_mean);
}

void GPDataset::set_targets(std::span<const double> y) {
  if (y.size() != targets_.size()) throw UsageError("GPDataset::set_targets: size mismatch");
  targets_.assign(y.begin(), y.end());
}

double se_kernel(std::span<const double> xi, std::span<const double> xj, const KernelParams& params,
                 bool same_index) {
  const std::size_t d = params.lengthscales.size();
  if (xi.size() != d || xj.size() != d) throw UsageError("se_kernel: dimension mismatch");
  double sq = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double diff = (xi[k] - xj[k]) / params.lengthscales[k];
    sq += diff * diff;
  }
  double value = params.signal_variance * std::exp(-0.5 * sq);
  if (same_index) value += params.noise_variance;
  return value;
}

std::vector<double> gram_matrix(const GPDataset& dataset, const KernelParams& params) {
  const std::size_t n = dataset.size();
  std::vector<double> k(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    k[i * n + i] = se_kernel(dataset.input(i), dataset.input(i), params, true);
    for (std::size_t j = 0; j < i; ++j) {
      const double v = se_kernel(dataset.input(i), dataset.input(j), params, false);
      k[i * n + j] = v;
      k[j * n + i] = v;
    }
  }
  return k;
}

GPModel GPModel::fit(GPDataset dataset, KernelParams params) {
  params.validate();
  if (dataset.dim() != params.dim()) throw UsageError("GPModel::fit: dataset and kernel dimensions differ");
  GPModel model(std::move(dataset), std::move(params));
  const std::size_t n = model.dataset_.size();
  if (n == 0) return model;

  Factorization f = factorize(model.dataset_, model.params_);
  model.chol_ = std::move(f.chol);
  model.jitter_ = f.jitter;
  model.weights_ = residuals(model.dataset_);
  forward_substitute(model.chol_, n, model.weights_);
  backward_substitute(model.chol_, n, model.weights_);
  return model;
}

Posterior GPModel::posterior(std::span<const double> x, double prior_mean) const {
  if (x.size() != dim()) throw UsageError("GPModel::posterior: dimension mismatch");
  const std::size_t n = size();
  const double prior_var = se_kernel(x, x, params_, true);
  if (n == 0) return {prior_mean, prior_var};

  std::vector<double> kx(n);
  double mean = prior_mean;
  for (std::size_t i = 0; i < n; ++i) {
    kx[i] = se_kernel(dataset_.input(i), x, params_, false);
    mean += kx[i] * weights_[i];
  }
  // k^T K^-1 k = |L^-1 k|^2
  forward_substitute(chol_, n, kx);
  double explained = 0.0;
  for (double v : kx) explained += v * v;
  return {mean, std::max(0.0, prior_var - explained)};
}

double GPModel::log_determinant() const {
  const std::size_t n = size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::log(chol_[i * n + i]);
  return 2.0 * s;
}

double log_marginal_likelihood(const GPDataset& dataset, const KernelParams& params) {
  if (dataset.empty()) throw UsageError("log_marginal_likelihood: empty dataset");
  const GPModel model = GPModel::fit(dataset, params);
  const std::vector<double> r = residuals(dataset);
  double quad = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) quad += r[i] * model.weights()[i];
  const double n = static_cast<double>(r.size());
  return -0.5 * quad - 0.5 * model.log_determinant() - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

double mse(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.size() != targets.size()) throw UsageError("mse: length mismatch");
  if (predictions.empty()) throw UsageError("mse: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double d = targets[i] - predictions[i];
    s += d * d;
  }
  return s / static_cast<double>(targets.size());
}

void write_dataset_csv(std::ostream& out, const GPDataset& dataset) {
  std::vector<std::string> header;
  for (std::size_t k = 0; k < dataset.dim(); ++k) header.push_back("theta_" + std::to_string(k + 1));
  header.emplace_back("y");
  csv::write_row(out, header);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    std::vector<std::string> row;
    for (double v : dataset.input(i)) row.push_back(csv::format_double(v));
    row.push_back(csv::format_double(dataset.targets()[i]));
    csv::write_row(out, row);
  }
}

GPDataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw UsageError("dataset CSV: missing header row");
  const auto header = csv::split(line);
  if (header.size() < 2 || header.back() != "y") {
    throw UsageError("dataset CSV: header must be theta_1..theta_d,y");
  }
  const std::size_t d = header.size() - 1;
  for (std::size_t k = 0; k < d; ++k) {
    if (header[k] != "theta_" + std::to_string(k + 1)) {
      throw UsageError("dataset CSV: unexpected column '" + header[k] + "'");
    }
  }
  GPDataset dataset(d);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = csv::split(line);
    if (fields.size() != d + 1) {
      throw UsageError("dataset CSV line " + std::to_string(line_no) + ": expected " + std::to_string(d + 1) +
                       " fields");
    }
    std::vector<double> x(d);
    for (std::size_t k = 0; k < d; ++k) x[k] = csv::parse_double(fields[k]);
    dataset.add(x, csv::parse_double(fields[d]));
  }
  return dataset;
}

}  // namespace rlopt
