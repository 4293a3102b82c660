#pragma once

// Independent reference implementations used only by tests. None of this
// shares code with the library beyond its public types.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "rlopt/gaussian_process.hpp"
#include "rlopt/random.hpp"

namespace oracle {

// Kernel evaluated straight from its definition, with l^-2 weights.
inline double se(std::span<const double> a, std::span<const double> b, const rlopt::KernelParams& p) {
  double q = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    q += d * d / (p.lengthscales[k] * p.lengthscales[k]);
  }
  return p.signal_variance * std::exp(-0.5 * q);
}

// GP posterior and evidence through an explicit inverse of K.
struct DenseGp {
  Eigen::MatrixXd K;
  Eigen::MatrixXd K_inv;
  Eigen::VectorXd r;  // y - mu0
  const rlopt::GPDataset* data;
  const rlopt::KernelParams* params;

  DenseGp(const rlopt::GPDataset& d, const rlopt::KernelParams& p) : data(&d), params(&p) {
    const auto n = static_cast<Eigen::Index>(d.size());
    K.resize(n, n);
    r.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      r(i) = d.targets()[i] - d.prior_means()[i];
      for (Eigen::Index j = 0; j < n; ++j) {
        K(i, j) = se(d.input(i), d.input(j), p) + (i == j ? p.noise_variance : 0.0);
      }
    }
    K_inv = K.inverse();
  }

  double mean(std::span<const double> x, double mu0 = 0.0) const {
    return mu0 + kvec(x).dot(K_inv * r);
  }

  double variance(std::span<const double> x) const {
    const Eigen::VectorXd k = kvec(x);
    const double v = params->signal_variance + params->noise_variance - k.dot(K_inv * k);
    return std::max(v, 0.0);
  }

  double log_evidence() const {
    const double n = static_cast<double>(r.size());
    return -0.5 * r.dot(K_inv * r) - 0.5 * std::log(K.determinant()) - 0.5 * n * std::log(2.0 * std::numbers::pi);
  }

 private:
  Eigen::VectorXd kvec(std::span<const double> x) const {
    Eigen::VectorXd k(r.size());
    for (Eigen::Index i = 0; i < k.size(); ++i) k(i) = se(data->input(static_cast<std::size_t>(i)), x, *params);
    return k;
  }
};

inline rlopt::GPDataset random_dataset(std::size_t n, std::size_t d, rlopt::Rng& rng) {
  rlopt::GPDataset data(d);
  std::vector<double> x(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : x) v = rlopt::uniform01(rng);
    data.add(x, 2.0 * rlopt::uniform01(rng) - 1.0);
  }
  return data;
}

// One-sample Kolmogorov-Smirnov statistic against U(0, 1).
inline double ks_uniform(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = std::clamp(xs[i], 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

// Asymptotic 95% critical value of the KS statistic.
inline double ks_critical_95(std::size_t n) { return 1.358 / std::sqrt(static_cast<double>(n)); }

}  // namespace oracle
