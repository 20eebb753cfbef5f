#include "llmfs/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

namespace {

using llmfs::Rng;
using llmfs::derive_seed;

TEST(DeriveSeed, DeterministicAndSaltSensitive) {
  EXPECT_EQ(derive_seed(42, std::uint64_t{7}), derive_seed(42, std::uint64_t{7}));
  EXPECT_NE(derive_seed(42, std::uint64_t{7}), derive_seed(42, std::uint64_t{8}));
  EXPECT_NE(derive_seed(42, std::uint64_t{7}), derive_seed(43, std::uint64_t{7}));
  EXPECT_EQ(derive_seed(42, "fs"), derive_seed(42, "fs"));
  EXPECT_NE(derive_seed(42, "fs"), derive_seed(42, "sf"));
  EXPECT_NE(derive_seed(42, "a", "b"), derive_seed(42, "b", "a"));
}

TEST(DeriveSeed, StringAndIntSaltsRarelyCollide) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 100; ++s) seen.insert(derive_seed(1, s));
  for (const char* s : {"variance", "chi2", "anova", "mi", "tree"})
    seen.insert(derive_seed(1, s));
  EXPECT_EQ(seen.size(), 105u);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, UniformInHalfOpenUnitInterval) {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Rng, UniformRangeRespectsBounds) {
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) {
    double u = rng.uniform(-2.5, 4.0);
    EXPECT_GE(u, -2.5);
    EXPECT_LT(u, 4.0);
  }
}

TEST(Rng, BelowStaysBelowAndHitsAllResidues) {
  Rng rng(11);
  std::set<std::size_t> seen;
  for (int i = 0; i < 1000; ++i) {
    std::size_t v = rng.below(5);
    EXPECT_LT(v, 5u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 5u);
}

TEST(Rng, GaussianMomentsRoughlyStandard) {
  Rng rng(13);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double g = rng.gaussian();
    sum += g;
    sq += g * g;
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.05);
  EXPECT_NEAR(var, 1.0, 0.05);
}

TEST(Rng, ShuffleIsAPermutation) {
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[static_cast<std::size_t>(i)] = i;
  std::vector<int> shuffled = v;
  Rng rng(17);
  rng.shuffle(shuffled);
  EXPECT_NE(shuffled, v);  // astronomically unlikely to be identity
  std::sort(shuffled.begin(), shuffled.end());
  EXPECT_EQ(shuffled, v);
}

TEST(Rng, SampleWithoutReplacementDistinctAndInRange) {
  Rng rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    auto picks = rng.sample_without_replacement(20, 7);
    ASSERT_EQ(picks.size(), 7u);
    std::set<std::size_t> uniq(picks.begin(), picks.end());
    EXPECT_EQ(uniq.size(), 7u);
    for (std::size_t p : picks) EXPECT_LT(p, 20u);
  }
}

TEST(Rng, SampleWithoutReplacementFullSetWhenKEqualsN) {
  Rng rng(21);
  auto picks = rng.sample_without_replacement(6, 6);
  std::set<std::size_t> uniq(picks.begin(), picks.end());
  EXPECT_EQ(uniq.size(), 6u);
}

}  // namespace
