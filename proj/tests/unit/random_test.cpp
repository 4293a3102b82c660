#include "rlopt/random.hpp"

#include <gtest/gtest.h>

#include <array>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "rlopt/errors.hpp"

namespace rlopt {
namespace {

TEST(Random, EngineMatchesStandardSequence) {
  // The standard pins the 10000th output of a default-constructed engine.
  Rng rng;
  rng.discard(9999);
  EXPECT_EQ(rng(), 9981545732273789042ULL);
}

TEST(Random, Uniform01UsesTop53Bits) {
  Rng a(42), b(42);
  const double u = uniform01(a);
  EXPECT_EQ(u, static_cast<double>(b() >> 11) / 9007199254740992.0);
}

TEST(Random, Uniform01StaysInHalfOpenUnitInterval) {
  Rng rng(7);
  std::vector<double> xs;
  for (int i = 0; i < 5000; ++i) {
    const double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    xs.push_back(u);
  }
  EXPECT_LT(oracle::ks_uniform(xs), oracle::ks_critical_95(xs.size()));
}

TEST(Random, UniformIndexCoversRangeEvenly) {
  Rng rng(11);
  std::array<int, 6> counts{};
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++counts[uniform_index(rng, counts.size())];
  // Chi-square with 5 degrees of freedom; 20.5 is the 0.999 quantile.
  double chi2 = 0.0;
  const double expected = n / 6.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 20.5);
}

TEST(Random, UniformIndexRejectsEmptyRange) {
  Rng rng(1);
  EXPECT_THROW(uniform_index(rng, 0), UsageError);
  EXPECT_EQ(uniform_index(rng, 1), 0u);
}

TEST(Random, DerivedSeedsAreDistinctAcrossStreamsAndIndices) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t base : {0ULL, 1ULL, 2ULL}) {
    for (std::uint64_t s = 1; s <= 5; ++s) {
      for (std::uint64_t i = 0; i < 50; ++i) seen.insert(derive_seed(base, s, i));
    }
  }
  EXPECT_EQ(seen.size(), 3u * 5u * 50u);
  EXPECT_EQ(derive_seed(9, 2, 3), derive_seed(9, 2, 3));
}

TEST(Random, Mix64KnownValue) {
  // SplitMix64 with state 0 yields 0xe220a8397b1dcdaf as its first output.
  EXPECT_EQ(mix64(0), 0xe220a8397b1dcdafULL);
}

}  // namespace
}  // namespace rlopt
