#include "rlopt/gaussian_process.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "rlopt/errors.hpp"

namespace rlopt {
namespace {

const KernelParams kDefaults{};

std::vector<double> point(Rng& rng, std::size_t d = 4) {
  std::vector<double> x(d);
  for (double& v : x) v = uniform01(rng);
  return x;
}

TEST(SeKernel, SelfCovarianceIncludesNoise) {
  const std::vector<double> x{0.1, 0.2, 0.3, 0.4};
  EXPECT_NEAR(se_kernel(x, x, kDefaults, true), 0.97, 1e-15);
  EXPECT_EQ(se_kernel(x, x, kDefaults, false), 0.8);
}

TEST(SeKernel, OneLengthscaleApart) {
  const std::vector<double> a{0.5, 0.5, 0.5, 0.5};
  const std::vector<double> b{0.62, 0.5, 0.5, 0.5};
  EXPECT_NEAR(se_kernel(a, b, kDefaults, false), 0.4852245277701068, 1e-12);  // 0.8 e^-1/2
  KernelParams positive = kDefaults;
  positive.lengthscales.assign(4, 0.12);
  EXPECT_NEAR(se_kernel(a, b, positive, false), 0.4852245277701068, 1e-12);
}

TEST(SeKernel, DimensionMismatchRejected) {
  const std::vector<double> a{0.1, 0.2, 0.3};
  EXPECT_THROW(se_kernel(a, a, kDefaults, false), UsageError);
}

TEST(KernelParams, Validation) {
  EXPECT_NO_THROW(kDefaults.validate());
  KernelParams p = kDefaults;
  p.signal_variance = 0.0;
  EXPECT_THROW(p.validate(), UsageError);
  p = kDefaults;
  p.noise_variance = -1e-3;
  EXPECT_THROW(p.validate(), UsageError);
  p = kDefaults;
  p.lengthscales[2] = 0.0;
  EXPECT_THROW(p.validate(), UsageError);
}

TEST(GPFit, SinglePointFactor) {
  GPDataset d;
  d.add(std::vector<double>{0.3, 0.3, 0.3, 0.3}, 0.5);
  const GPModel m = GPModel::fit(d, kDefaults);
  ASSERT_EQ(m.cholesky_factor().size(), 1u);
  EXPECT_NEAR(m.cholesky_factor()[0], std::sqrt(0.97), 1e-15);
  EXPECT_EQ(m.jitter(), 0.0);
}

TEST(GPFit, EmptyModelFallsBackToPrior) {
  const GPModel m = GPModel::fit(GPDataset(4), kDefaults);
  EXPECT_EQ(m.size(), 0u);
  const std::vector<double> x{0.5, 0.5, 0.5, 0.5};
  const Posterior p = m.posterior(x);
  EXPECT_EQ(p.mean, 0.0);
  EXPECT_NEAR(p.variance, 0.97, 1e-15);
  EXPECT_EQ(m.posterior(x, 2.5).mean, 2.5);
}

TEST(GPFit, FactorReconstructsKernelMatrix) {
  Rng rng(21);
  const GPDataset d = oracle::random_dataset(10, 4, rng);
  const GPModel m = GPModel::fit(d, kDefaults);
  const auto k = gram_matrix(d, kDefaults);
  const auto l = m.cholesky_factor();
  const std::size_t n = d.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < n; ++t) s += l[i * n + t] * l[j * n + t];
      EXPECT_NEAR(s, k[i * n + j], 1e-10);
      if (j > i) EXPECT_EQ(l[i * n + j], 0.0);
    }
  }
}

TEST(GPFit, DuplicateInputsWithoutNoiseNeedJitter) {
  KernelParams noiseless = kDefaults;
  noiseless.noise_variance = 0.0;
  GPDataset d;
  const std::vector<double> x{0.4, 0.4, 0.4, 0.4};
  d.add(x, 1.0);
  d.add(x, 1.0);
  const GPModel m = GPModel::fit(d, noiseless);
  EXPECT_GE(m.jitter(), GPModel::kInitialJitter);
  EXPECT_LE(m.jitter(), GPModel::kMaxJitter);
}

TEST(GPFit, UnrepairableMatrixReportsLastJitter) {
  // At signal variance 1e12 a 1e-5 diagonal is below one ulp, so duplicate
  // rows stay exactly singular.
  KernelParams huge = kDefaults;
  huge.signal_variance = 1e12;
  huge.noise_variance = 0.0;
  GPDataset d;
  const std::vector<double> x{0.4, 0.4, 0.4, 0.4};
  d.add(x, 1.0);
  d.add(x, 1.0);
  try {
    GPModel::fit(d, huge);
    FAIL() << "expected NotPositiveDefiniteError";
  } catch (const NotPositiveDefiniteError& e) {
    EXPECT_DOUBLE_EQ(e.jitter(), GPModel::kMaxJitter);
  }
}

TEST(GPFit, DimensionMismatchRejected) {
  GPDataset d(3);
  d.add(std::vector<double>{0.1, 0.2, 0.3}, 0.0);
  EXPECT_THROW(GPModel::fit(d, kDefaults), UsageError);
}

TEST(GPPosterior, NoiselessInterpolation) {
  KernelParams noiseless = kDefaults;
  noiseless.noise_variance = 0.0;
  GPDataset d;
  const std::vector<double> x{0.2, 0.7, 0.1, 0.9};
  d.add(x, 1.25);
  const GPModel m = GPModel::fit(d, noiseless);
  const Posterior p = m.posterior(x);
  EXPECT_NEAR(p.mean, 1.25, 1e-12);
  EXPECT_NEAR(p.variance, 0.0, 1e-12);
}

TEST(GPPosterior, MatchesDenseInverseOracle) {
  Rng rng(22);
  const GPDataset d = oracle::random_dataset(5, 4, rng);
  const GPModel m = GPModel::fit(d, kDefaults);
  const oracle::DenseGp ref(d, kDefaults);
  for (int q = 0; q < 20; ++q) {
    const auto x = point(rng);
    const Posterior p = m.posterior(x);
    EXPECT_NEAR(p.mean, ref.mean(x), 1e-8);
    EXPECT_NEAR(p.variance, ref.variance(x), 1e-8);
  }
}

TEST(GPPosterior, NonZeroPriorMeansShiftResiduals) {
  Rng rng(23);
  GPDataset d(4);
  for (int i = 0; i < 6; ++i) d.add(point(rng), uniform01(rng), 0.5 * i);
  const GPModel m = GPModel::fit(d, kDefaults);
  const oracle::DenseGp ref(d, kDefaults);
  const auto x = point(rng);
  EXPECT_NEAR(m.posterior(x, 0.7).mean, ref.mean(x, 0.7), 1e-10);
}

TEST(LogMarginalLikelihood, ScalarCase) {
  // k(x, x) = 0.6 + 0.4 = 1, y = 0: only the normalizer remains.
  KernelParams unit = kDefaults;
  unit.signal_variance = 0.6;
  unit.noise_variance = 0.4;
  GPDataset d;
  d.add(std::vector<double>{0.5, 0.5, 0.5, 0.5}, 0.0);
  EXPECT_NEAR(log_marginal_likelihood(d, unit), -0.9189385332046727, 1e-12);
}

TEST(LogMarginalLikelihood, QuadraticTermScalesWithSquaredResiduals) {
  Rng rng(24);
  const GPDataset d = oracle::random_dataset(7, 4, rng);
  GPDataset zero = d;
  zero.set_targets(std::vector<double>(d.size(), 0.0));
  GPDataset scaled = d;
  std::vector<double> y(d.targets().begin(), d.targets().end());
  for (double& v : y) v *= 3.0;
  scaled.set_targets(y);
  const double base = log_marginal_likelihood(zero, kDefaults);
  const double quad = log_marginal_likelihood(d, kDefaults) - base;
  EXPECT_NEAR(log_marginal_likelihood(scaled, kDefaults) - base, 9.0 * quad, 1e-9);
}

TEST(LogMarginalLikelihood, MatchesDenseOracle) {
  Rng rng(25);
  const GPDataset d = oracle::random_dataset(6, 4, rng);
  EXPECT_NEAR(log_marginal_likelihood(d, kDefaults), oracle::DenseGp(d, kDefaults).log_evidence(), 1e-8);
  EXPECT_THROW(log_marginal_likelihood(GPDataset(4), kDefaults), UsageError);
}

TEST(Mse, HandCases) {
  const std::vector<double> a{1, 2, 3};
  EXPECT_EQ(mse(a, a), 0.0);
  EXPECT_EQ(mse(std::vector<double>{0, 0}, std::vector<double>{1, 1}), 1.0);
  EXPECT_NEAR(mse(std::vector<double>{1, 1, 1}, a), 5.0 / 3.0, 1e-15);
  EXPECT_THROW(mse(std::vector<double>{1}, a), UsageError);
  EXPECT_THROW(mse(std::vector<double>{}, std::vector<double>{}), UsageError);
}

TEST(DatasetCsv, RoundTripsExactly) {
  Rng rng(26);
  const GPDataset d = oracle::random_dataset(8, 4, rng);
  std::stringstream s;
  write_dataset_csv(s, d);
  EXPECT_EQ(s.str().substr(0, s.str().find('\n')), "theta_1,theta_2,theta_3,theta_4,y");
  const GPDataset back = read_dataset_csv(s);
  ASSERT_EQ(back.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(back.targets()[i], d.targets()[i]);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(back.input(i)[k], d.input(i)[k]);
  }
}

TEST(DatasetCsv, RejectsBadInput) {
  std::istringstream no_header("");
  EXPECT_THROW(read_dataset_csv(no_header), UsageError);
  std::istringstream bad_header("a,b,y\n1,2,3\n");
  EXPECT_THROW(read_dataset_csv(bad_header), UsageError);
  std::istringstream short_row("theta_1,theta_2,y\n1,2\n");
  EXPECT_THROW(read_dataset_csv(short_row), UsageError);
  std::istringstream junk("theta_1,y\nabc,1\n");
  EXPECT_THROW(read_dataset_csv(junk), UsageError);
}

TEST(GPProperty, DenseOracleAgreementUpTo25Points) {
  Rng rng(27);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 25);
    const GPDataset d = oracle::random_dataset(n, 4, rng);
    const GPModel m = GPModel::fit(d, kDefaults);
    const oracle::DenseGp ref(d, kDefaults);
    for (int q = 0; q < 5; ++q) {
      const auto x = point(rng);
      const Posterior p = m.posterior(x);
      ASSERT_NEAR(p.mean, ref.mean(x), 1e-8);
      ASSERT_NEAR(p.variance, ref.variance(x), 1e-8);
    }
  }
}

TEST(GPProperty, PosteriorVarianceWithinPriorBound) {
  Rng rng(28);
  for (int trial = 0; trial < 20; ++trial) {
    const GPDataset d = oracle::random_dataset(1 + uniform_index(rng, 20), 4, rng);
    const GPModel m = GPModel::fit(d, kDefaults);
    for (int q = 0; q < 20; ++q) {
      const Posterior p = m.posterior(point(rng));
      ASSERT_GE(p.variance, 0.0);
      ASSERT_LE(p.variance, kDefaults.prior_variance() + 1e-9);
    }
    for (std::size_t i = 0; i < d.size(); ++i) ASSERT_LE(m.posterior(d.input(i)).variance, kDefaults.prior_variance() + 1e-9);
  }
}

TEST(GPProperty, GramMatrixSymmetric) {
  Rng rng(29);
  const GPDataset d = oracle::random_dataset(15, 4, rng);
  const auto k = gram_matrix(d, kDefaults);
  for (std::size_t i = 0; i < 15; ++i) {
    for (std::size_t j = 0; j < 15; ++j) ASSERT_NEAR(k[i * 15 + j], k[j * 15 + i], 1e-12);
  }
}

TEST(GPProperty, ObservationAtPointNeverRaisesItsVariance) {
  Rng rng(30);
  for (int trial = 0; trial < 20; ++trial) {
    GPDataset d = oracle::random_dataset(uniform_index(rng, 12), 4, rng);
    const auto x = point(rng);
    const double before = GPModel::fit(d, kDefaults).posterior(x).variance;
    d.add(x, uniform01(rng));
    const double after = GPModel::fit(d, kDefaults).posterior(x).variance;
    ASSERT_LE(after, before + 1e-9);
  }
}

TEST(GPProperty, LengthscaleSignInvariance) {
  Rng rng(31);
  const GPDataset d = oracle::random_dataset(12, 4, rng);
  KernelParams flipped = kDefaults;
  for (int trial = 0; trial < 10; ++trial) {
    for (double& l : flipped.lengthscales) l = (uniform01(rng) < 0.5 ? -1.0 : 1.0) * 0.12;
    const auto a = point(rng);
    const auto b = point(rng);
    ASSERT_EQ(se_kernel(a, b, kDefaults, false), se_kernel(a, b, flipped, false));
    ASSERT_EQ(gram_matrix(d, kDefaults), gram_matrix(d, flipped));
    const Posterior p = GPModel::fit(d, kDefaults).posterior(a);
    const Posterior q = GPModel::fit(d, flipped).posterior(a);
    ASSERT_EQ(p.mean, q.mean);
    ASSERT_EQ(p.variance, q.variance);
    ASSERT_EQ(log_marginal_likelihood(d, kDefaults), log_marginal_likelihood(d, flipped));
  }
}

}  // namespace
}  // namespace rlopt
