#include "llmfs/fs_classic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "oracles.hpp"

namespace {

using llmfs::Dataset;
using llmfs::Error;
using llmfs::Matrix;
using llmfs::ScoreVector;

Dataset worked_example() {
  // Column 0: 1,2,3,4 (the chi-squared example); column 1: 0,1,2,3 (the
  // variance / ANOVA example); labels 0,0,1,1.
  Matrix m(4, 2);
  m(0, 0) = 1; m(0, 1) = 0;
  m(1, 0) = 2; m(1, 1) = 1;
  m(2, 0) = 3; m(2, 1) = 2;
  m(3, 0) = 4; m(3, 1) = 3;
  return Dataset(std::move(m), {0, 0, 1, 1}, {"c", "v"});
}

Dataset random_dataset(std::mt19937& gen, std::size_t n, std::size_t d,
                       bool non_negative = false) {
  std::uniform_real_distribution<double> uni(non_negative ? 0.0 : -3.0, 3.0);
  Matrix m(n, d);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = static_cast<int>(i % 2);
    for (std::size_t j = 0; j < d; ++j) m(i, j) = uni(gen);
  }
  std::vector<std::string> names(d);
  for (std::size_t j = 0; j < d; ++j) names[j] = "f" + std::to_string(j);
  return Dataset(std::move(m), std::move(labels), std::move(names));
}

TEST(Variance, WorkedValueAndOracle) {
  ScoreVector sv = llmfs::variance_scores(worked_example());
  EXPECT_EQ(sv.method_name, "variance");
  EXPECT_NEAR(sv.scores[1], 1.25, 1e-12);

  std::mt19937 gen(1);
  Dataset ds = random_dataset(gen, 37, 5);
  sv = llmfs::variance_scores(ds);
  for (std::size_t j = 0; j < 5; ++j)
    EXPECT_NEAR(sv.scores[j], oracle::variance(ds.column(j)), 1e-9);
}

TEST(Chi2, WorkedValueIs1Point6) {
  ScoreVector sv = llmfs::chi2_scores(worked_example());
  EXPECT_EQ(sv.method_name, "chi2");
  EXPECT_NEAR(sv.scores[0], 1.6, 1e-12);
}

TEST(Chi2, NegativeColumnsAreShiftedAndCounted) {
  Matrix m(4, 2);
  // Column 0 dips below zero; column 1 does not.
  m(0, 0) = -2; m(0, 1) = 1;
  m(1, 0) = -1; m(1, 1) = 2;
  m(2, 0) = 1;  m(2, 1) = 3;
  m(3, 0) = 3;  m(3, 1) = 4;
  Dataset ds(std::move(m), {0, 0, 1, 1}, {"neg", "pos"});
  std::size_t shifted = 99;
  ScoreVector sv = llmfs::chi2_scores(ds, &shifted);
  EXPECT_EQ(shifted, 1u);
  // After the shift the column is (0,1,3,5): obs1 = 8, obs0 = 1, total 9.
  double expected = oracle::chi2({-2, -1, 1, 3}, {0, 0, 1, 1});
  EXPECT_NEAR(sv.scores[0], expected, 1e-12);
  for (double s : sv.scores) {
    EXPECT_GE(s, 0.0);
    EXPECT_TRUE(std::isfinite(s));
  }
}

TEST(Chi2, MatchesOracleOnRandomNonNegativeData) {
  std::mt19937 gen(2);
  Dataset ds = random_dataset(gen, 41, 6, /*non_negative=*/true);
  ScoreVector sv = llmfs::chi2_scores(ds);
  for (std::size_t j = 0; j < 6; ++j)
    EXPECT_NEAR(sv.scores[j], oracle::chi2(ds.column(j), ds.labels()), 1e-9);
}

TEST(AnovaF, WorkedValueIs8) {
  ScoreVector sv = llmfs::anova_f_scores(worked_example());
  EXPECT_NEAR(sv.scores[1], 8.0, 1e-12);
}

TEST(AnovaF, OracleEdgeCasesAndErrors) {
  std::mt19937 gen(3);
  Dataset ds = random_dataset(gen, 29, 4);
  ScoreVector sv = llmfs::anova_f_scores(ds);
  for (std::size_t j = 0; j < 4; ++j)
    EXPECT_NEAR(sv.scores[j], oracle::anova_f(ds.column(j), ds.labels()),
                1e-9);

  // Equal class means -> 0; zero within-class scatter -> largest finite.
  Matrix m(4, 2);
  m(0, 0) = 1; m(0, 1) = 5;
  m(1, 0) = 3; m(1, 1) = 5;
  m(2, 0) = 1; m(2, 1) = 9;
  m(3, 0) = 3; m(3, 1) = 9;
  Dataset edge(std::move(m), {0, 0, 1, 1}, {"flat", "pure"});
  sv = llmfs::anova_f_scores(edge);
  EXPECT_DOUBLE_EQ(sv.scores[0], 0.0);
  EXPECT_DOUBLE_EQ(sv.scores[1], std::numeric_limits<double>::max());

  Matrix two(2, 1);
  two(1, 0) = 1;
  Dataset tiny(std::move(two), {0, 1}, {"x"});
  EXPECT_THROW(llmfs::anova_f_scores(tiny), Error);
}

TEST(MutualInfo, PerfectSeparatorScoresLn2) {
  Matrix m(4, 1);
  m(0, 0) = 0; m(1, 0) = 0; m(2, 0) = 1; m(3, 0) = 1;
  Dataset ds(std::move(m), {0, 0, 1, 1}, {"sep"});
  ScoreVector sv = llmfs::mutual_info_scores(ds);
  EXPECT_NEAR(sv.scores[0], std::log(2.0), 1e-12);
}

TEST(MutualInfo, OracleConstantColumnAndNonNegativity) {
  std::mt19937 gen(4);
  Dataset ds = random_dataset(gen, 53, 5);
  ScoreVector sv = llmfs::mutual_info_scores(ds);
  for (std::size_t j = 0; j < 5; ++j) {
    EXPECT_NEAR(sv.scores[j],
                std::max(0.0, oracle::mutual_info(ds.column(j), ds.labels(), 10)),
                1e-9);
    EXPECT_GE(sv.scores[j], 0.0);
  }

  Matrix m(4, 1, 7.0);  // constant column carries no information
  Dataset flat(std::move(m), {0, 0, 1, 1}, {"k"});
  EXPECT_NEAR(llmfs::mutual_info_scores(flat).scores[0], 0.0, 1e-12);
}

TEST(CorrelationFilter, DropsRedundantDuplicateColumn) {
  // f0 separates the classes; f1 is an exact copy (r = 1); f2 is noise.
  Matrix m(6, 3);
  double xs[6] = {0.1, 0.9, 0.4, 5.0, 5.8, 5.3};
  double noise[6] = {0.3, -1.0, 0.7, -0.2, 0.5, -0.9};
  for (std::size_t i = 0; i < 6; ++i) {
    m(i, 0) = xs[i];
    m(i, 1) = xs[i];
    m(i, 2) = noise[i];
  }
  Dataset ds(std::move(m), {0, 0, 0, 1, 1, 1}, {"sig", "dup", "noise"});
  ScoreVector sv = llmfs::correlation_filter_scores(ds);
  // Scan order is by |point-biserial|: sig (or dup) first, its copy dropped.
  EXPECT_GT(sv.scores[0], 1.0);   // kept, first
  EXPECT_LT(sv.scores[1], 0.0);   // dropped as redundant
  EXPECT_GT(sv.scores[2], 0.0);   // kept, later
  EXPECT_LT(sv.scores[2], sv.scores[0]);

  auto top2 = llmfs::top_k(sv, 2);
  EXPECT_EQ(top2.indices, (std::vector<std::size_t>{0, 2}));
}

TEST(CorrelationFilter, ScanOrderFollowsPointBiserialOracle) {
  std::mt19937 gen(5);
  Dataset ds = random_dataset(gen, 31, 6);
  ScoreVector sv = llmfs::correlation_filter_scores(ds, 2.0);  // nothing dropped
  // With no drops the score ordering must equal the |r_pb| ordering.
  std::vector<std::size_t> by_score(6), by_oracle(6);
  std::iota(by_score.begin(), by_score.end(), 0);
  by_oracle = by_score;
  std::sort(by_score.begin(), by_score.end(), [&](std::size_t a, std::size_t b) {
    return sv.scores[a] > sv.scores[b];
  });
  std::sort(by_oracle.begin(), by_oracle.end(),
            [&](std::size_t a, std::size_t b) {
              double fa = std::fabs(oracle::point_biserial(ds.column(a), ds.labels()));
              double fb = std::fabs(oracle::point_biserial(ds.column(b), ds.labels()));
              if (fa != fb) return fa > fb;
              return a < b;
            });
  EXPECT_EQ(by_score, by_oracle);
}

TEST(TreeImportance, FindsInformativeFeatureAndNormalizes) {
  llmfs::SynthSpec spec;
  spec.n_samples = 300;
  spec.n_features = 6;
  spec.n_informative = 1;
  spec.mean_shift = 3.0;
  spec.seed = 21;
  Dataset ds = llmfs::generate_synthetic(spec);
  ScoreVector sv = llmfs::tree_importance_scores(ds, 30, 6, 5);
  double total = 0.0;
  for (double s : sv.scores) total += s;
  EXPECT_NEAR(total, 1.0, 1e-9);
  EXPECT_EQ(std::max_element(sv.scores.begin(), sv.scores.end()) -
                sv.scores.begin(),
            0);
}

TEST(TreeImportance, DeterministicAndThreadIndependent) {
  llmfs::SynthSpec spec;
  spec.n_samples = 120;
  spec.n_features = 5;
  spec.n_informative = 2;
  spec.mean_shift = 1.5;
  spec.seed = 22;
  Dataset ds = llmfs::generate_synthetic(spec);
  ScoreVector a = llmfs::tree_importance_scores(ds, 20, 6, 7, 1);
  ScoreVector b = llmfs::tree_importance_scores(ds, 20, 6, 7, 3);
  EXPECT_EQ(a.scores, b.scores);  // bitwise, not approximate
  ScoreVector c = llmfs::tree_importance_scores(ds, 20, 6, 8, 1);
  EXPECT_NE(a.scores, c.scores);
}

TEST(ExtraTreesImportance, FindsInformativeFeatureAndNormalizes) {
  llmfs::SynthSpec spec;
  spec.n_samples = 300;
  spec.n_features = 6;
  spec.n_informative = 1;
  spec.mean_shift = 3.0;
  spec.seed = 23;
  Dataset ds = llmfs::generate_synthetic(spec);
  ScoreVector sv = llmfs::extratrees_importance_scores(ds, 30, 6, 5);
  double total = 0.0;
  for (double s : sv.scores) total += s;
  EXPECT_NEAR(total, 1.0, 1e-9);
  EXPECT_EQ(std::max_element(sv.scores.begin(), sv.scores.end()) -
                sv.scores.begin(),
            0);
  ScoreVector again = llmfs::extratrees_importance_scores(ds, 30, 6, 5, 2);
  EXPECT_EQ(sv.scores, again.scores);
}

TEST(ForestImportance, UniformWhenNothingSplits) {
  // Identical rows per class value make every candidate split worthless
  // only if the feature is constant; use fully constant features.
  Matrix m(4, 3, 1.0);
  Dataset ds(std::move(m), {0, 1, 0, 1}, {"a", "b", "c"});
  ScoreVector sv = llmfs::tree_importance_scores(ds, 10, 4, 1);
  for (double s : sv.scores) EXPECT_NEAR(s, 1.0 / 3.0, 1e-12);
}

TEST(RandomScores, SeededPermutationScaledIntoUnitInterval) {
  std::mt19937 gen(6);
  Dataset ds = random_dataset(gen, 10, 8);
  ScoreVector sv = llmfs::random_scores(ds, 77);
  ScoreVector same = llmfs::random_scores(ds, 77);
  ScoreVector other = llmfs::random_scores(ds, 78);
  EXPECT_EQ(sv.scores, same.scores);
  EXPECT_NE(sv.scores, other.scores);

  std::vector<double> sorted = sv.scores;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t j = 0; j < 8; ++j)
    EXPECT_NEAR(sorted[j], static_cast<double>(j + 1) / 8.0, 1e-12);
}

TEST(SequentialForward, RecoversStrongFeatureFirst) {
  llmfs::SynthSpec spec;
  spec.n_samples = 200;
  spec.n_features = 6;
  spec.n_informative = 1;
  spec.mean_shift = 4.0;
  spec.seed = 31;
  Dataset ds = llmfs::generate_synthetic(spec);
  auto sel = llmfs::sequential_forward_select(ds, 3, 32, 11);
  EXPECT_EQ(sel.method_name, "sequential");
  ASSERT_EQ(sel.indices.size(), 3u);
  EXPECT_EQ(sel.indices[0], 0u);  // the informative column wins round one
  std::set<std::size_t> uniq(sel.indices.begin(), sel.indices.end());
  EXPECT_EQ(uniq.size(), 3u);
}

TEST(SequentialForward, DeterministicThreadIndependentAndBounded) {
  llmfs::SynthSpec spec;
  spec.n_samples = 120;
  spec.n_features = 7;
  spec.n_informative = 2;
  spec.mean_shift = 2.0;
  spec.seed = 32;
  Dataset ds = llmfs::generate_synthetic(spec);
  auto a = llmfs::sequential_forward_select(ds, 4, 3, 13, 1);
  auto b = llmfs::sequential_forward_select(ds, 4, 3, 13, 2);
  EXPECT_EQ(a.indices, b.indices);
  EXPECT_THROW(llmfs::sequential_forward_select(ds, 8, 32, 13), Error);
}

}  // namespace
