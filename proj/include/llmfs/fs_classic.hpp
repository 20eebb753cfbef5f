#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "llmfs/dataset.hpp"
#include "llmfs/error.hpp"
#include "llmfs/parallel.hpp"
#include "llmfs/rng.hpp"
#include "llmfs/score_vector.hpp"
#include "llmfs/selection.hpp"
#include "llmfs/trees.hpp"

namespace llmfs {

namespace detail {

// Pearson correlation with population moments; either side constant -> 0.
inline double pearson(const std::vector<double>& a,
                      const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

inline double population_variance(const std::vector<double>& v) {
  double mean = std::accumulate(v.begin(), v.end(), 0.0) /
                static_cast<double>(v.size());
  double sq = 0.0;
  for (double x : v) sq += (x - mean) * (x - mean);
  return sq / static_cast<double>(v.size());
}

}  // namespace detail

// Population variance per column; top-k by variance realizes the threshold.
inline ScoreVector variance_scores(const Dataset& train) {
  ScoreVector sv;
  sv.method_name = "variance";
  sv.scores.resize(train.d());
  for (std::size_t j = 0; j < train.d(); ++j)
    sv.scores[j] = detail::population_variance(train.column(j));
  return sv;
}

// Chi-squared statistic on per-class value mass. Columns containing
// negatives are shifted by their own minimum first; shifted_columns (when
// given) reports how many columns needed it.
inline ScoreVector chi2_scores(const Dataset& train,
                               std::size_t* shifted_columns = nullptr) {
  const double n = static_cast<double>(train.n());
  const double prior1 = static_cast<double>(train.class_count(1)) / n;
  const double prior0 = 1.0 - prior1;

  ScoreVector sv;
  sv.method_name = "chi2";
  sv.scores.resize(train.d());
  std::size_t shifted = 0;
  for (std::size_t j = 0; j < train.d(); ++j) {
    auto col = train.column(j);
    double lo = *std::min_element(col.begin(), col.end());
    if (lo < 0.0) {
      for (double& v : col) v -= lo;
      ++shifted;
    }
    double obs1 = 0.0, total = 0.0;
    for (std::size_t i = 0; i < col.size(); ++i) {
      total += col[i];
      if (train.labels()[i] == 1) obs1 += col[i];
    }
    double obs0 = total - obs1;
    if (total == 0.0) {
      sv.scores[j] = 0.0;
      continue;
    }
    double exp1 = prior1 * total;
    double exp0 = prior0 * total;
    double chi2 = 0.0;
    if (exp1 > 0.0) chi2 += (obs1 - exp1) * (obs1 - exp1) / exp1;
    if (exp0 > 0.0) chi2 += (obs0 - exp0) * (obs0 - exp0) / exp0;
    sv.scores[j] = chi2;
  }
  if (shifted_columns) *shifted_columns = shifted;
  return sv;
}

// One-way ANOVA F: (SSB / 1) / (SSW / (n - 2)). Equal class means -> 0;
// zero within-class scatter with nonzero between -> largest finite value.
inline ScoreVector anova_f_scores(const Dataset& train) {
  if (train.n() < 3)
    fail(Errc::too_few_samples, "ANOVA F needs n >= 3");
  const auto& y = train.labels();
  const std::size_t n1 = train.class_count(1);
  const std::size_t n0 = train.n() - n1;

  ScoreVector sv;
  sv.method_name = "anova";
  sv.scores.resize(train.d());
  for (std::size_t j = 0; j < train.d(); ++j) {
    auto col = train.column(j);
    double sum1 = 0.0, sum0 = 0.0;
    for (std::size_t i = 0; i < col.size(); ++i)
      (y[i] == 1 ? sum1 : sum0) += col[i];
    double mean1 = n1 ? sum1 / static_cast<double>(n1) : 0.0;
    double mean0 = n0 ? sum0 / static_cast<double>(n0) : 0.0;
    double grand = (sum1 + sum0) / static_cast<double>(train.n());
    double ssb = static_cast<double>(n1) * (mean1 - grand) * (mean1 - grand) +
                 static_cast<double>(n0) * (mean0 - grand) * (mean0 - grand);
    double ssw = 0.0;
    for (std::size_t i = 0; i < col.size(); ++i) {
      double m = (y[i] == 1) ? mean1 : mean0;
      ssw += (col[i] - m) * (col[i] - m);
    }
    if (ssb == 0.0) {
      sv.scores[j] = 0.0;
    } else if (ssw == 0.0) {
      sv.scores[j] = std::numeric_limits<double>::max();
    } else {
      double msw = ssw / static_cast<double>(train.n() - 2);
      sv.scores[j] = detail::clamp_finite(ssb / msw);
    }
  }
  return sv;
}

// Plug-in mutual information in nats over (equal-width bin, class) counts.
inline ScoreVector mutual_info_scores(const Dataset& train,
                                      std::size_t n_bins = 10) {
  if (train.n() < 2)
    fail(Errc::too_few_samples, "mutual information needs n >= 2");
  const auto& y = train.labels();
  const double n = static_cast<double>(train.n());
  const double py1 = static_cast<double>(train.class_count(1)) / n;
  const double py0 = 1.0 - py1;

  ScoreVector sv;
  sv.method_name = "mi";
  sv.scores.resize(train.d());
  for (std::size_t j = 0; j < train.d(); ++j) {
    auto col = train.column(j);
    double lo = *std::min_element(col.begin(), col.end());
    double hi = *std::max_element(col.begin(), col.end());
    std::size_t bins = (lo == hi) ? 1 : n_bins;
    std::vector<std::size_t> joint(bins * 2, 0);
    for (std::size_t i = 0; i < col.size(); ++i) {
      std::size_t b = 0;
      if (bins > 1) {
        b = static_cast<std::size_t>((col[i] - lo) / (hi - lo) *
                                     static_cast<double>(bins));
        if (b >= bins) b = bins - 1;
      }
      ++joint[b * 2 + static_cast<std::size_t>(y[i])];
    }
    double mi = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
      double pb = static_cast<double>(joint[b * 2] + joint[b * 2 + 1]) / n;
      for (int c = 0; c < 2; ++c) {
        double pbc = static_cast<double>(joint[b * 2 + c]) / n;
        if (pbc == 0.0) continue;
        double pc = (c == 1) ? py1 : py0;
        mi += pbc * std::log(pbc / (pb * pc));
      }
    }
    sv.scores[j] = std::max(0.0, mi);
  }
  return sv;
}

// Redundancy filter: scan features by descending |point-biserial correlation
// with the label| and keep each unless its Pearson |r| with an already-kept
// feature exceeds the threshold. Kept features score 2 - rank*eps, dropped
// ones -rank*eps (rank = 1-based scan position), so top-k reproduces the
// keep-first ordering.
inline ScoreVector correlation_filter_scores(const Dataset& train,
                                             double redundancy_threshold =
                                                 0.95) {
  if (train.n() < 2)
    fail(Errc::too_few_samples, "correlation filter needs n >= 2");
  const std::size_t d = train.d();
  std::vector<std::vector<double>> cols(d);
  for (std::size_t j = 0; j < d; ++j) cols[j] = train.column(j);
  std::vector<double> label_corr(d);
  {
    std::vector<double> yv(train.n());
    for (std::size_t i = 0; i < train.n(); ++i)
      yv[i] = static_cast<double>(train.labels()[i]);
    for (std::size_t j = 0; j < d; ++j)
      label_corr[j] = detail::pearson(cols[j], yv);
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    double fa = std::fabs(label_corr[a]), fb = std::fabs(label_corr[b]);
    if (fa != fb) return fa > fb;
    return a < b;
  });

  const double eps = 1.0 / static_cast<double>(d + 1);
  ScoreVector sv;
  sv.method_name = "correlation";
  sv.scores.resize(d);
  std::vector<std::size_t> kept;
  for (std::size_t pos = 0; pos < d; ++pos) {
    std::size_t j = order[pos];
    double rank = static_cast<double>(pos + 1);
    bool redundant = false;
    for (std::size_t other : kept) {
      if (std::fabs(detail::pearson(cols[j], cols[other])) >
          redundancy_threshold) {
        redundant = true;
        break;
      }
    }
    if (redundant) {
      sv.scores[j] = -rank * eps;
    } else {
      sv.scores[j] = 2.0 - rank * eps;
      kept.push_back(j);
    }
  }
  return sv;
}

// Random-forest Gini importance, normalized to sum 1 (uniform if no split
// ever fired).
inline ScoreVector tree_importance_scores(const Dataset& train,
                                          std::size_t n_trees = 100,
                                          std::size_t max_depth = 12,
                                          std::uint64_t seed = 0,
                                          std::size_t threads = 1) {
  if (!train.has_both_classes())
    fail(Errc::single_class_dataset, "tree importance needs both classes");
  ForestConfig cfg;
  cfg.n_trees = n_trees;
  cfg.max_depth = max_depth;
  cfg.bootstrap = true;
  cfg.random_thresholds = false;
  Forest forest =
      Forest::fit(train.features(), train.labels(), cfg, seed, threads);

  ScoreVector sv;
  sv.method_name = "tree";
  sv.scores = forest.importance();
  double total = std::accumulate(sv.scores.begin(), sv.scores.end(), 0.0);
  if (total > 0.0) {
    for (double& s : sv.scores) s /= total;
  } else {
    std::fill(sv.scores.begin(), sv.scores.end(),
              1.0 / static_cast<double>(train.d()));
  }
  return sv;
}

// Extra-trees importance: full sample per tree, uniform random thresholds.
inline ScoreVector extratrees_importance_scores(const Dataset& train,
                                                std::size_t n_trees = 100,
                                                std::size_t max_depth = 12,
                                                std::uint64_t seed = 0,
                                                std::size_t threads = 1) {
  if (!train.has_both_classes())
    fail(Errc::single_class_dataset, "extra-trees importance needs both classes");
  ForestConfig cfg;
  cfg.n_trees = n_trees;
  cfg.max_depth = max_depth;
  cfg.bootstrap = false;
  cfg.random_thresholds = true;
  Forest forest =
      Forest::fit(train.features(), train.labels(), cfg, seed, threads);

  ScoreVector sv;
  sv.method_name = "extratrees";
  sv.scores = forest.importance();
  double total = std::accumulate(sv.scores.begin(), sv.scores.end(), 0.0);
  if (total > 0.0) {
    for (double& s : sv.scores) s /= total;
  } else {
    std::fill(sv.scores.begin(), sv.scores.end(),
              1.0 / static_cast<double>(train.d()));
  }
  return sv;
}

// Greedy forward selection with a sampled candidate pool per round and a
// small extra-trees proxy scored on an internal 80:20 validation split.
// Ties in validation accuracy go to the lower feature index.
inline SelectionResult sequential_forward_select(
    const Dataset& train, std::size_t k, std::size_t candidates_per_round = 32,
    std::uint64_t seed = 0, std::size_t threads = 1) {
  if (k > train.d()) fail(Errc::k_too_large, "k exceeds feature count");
  if (!train.has_both_classes())
    fail(Errc::single_class_dataset, "sequential FS needs both classes");

  auto [fit_rows, val_rows] =
      split_indices(train.labels(), 0.8, derive_seed(seed, "sfs-split"));
  Dataset fit_ds = train.select_rows(fit_rows);
  Dataset val_ds = train.select_rows(val_rows);

  ForestConfig proxy;
  proxy.n_trees = 25;
  proxy.max_depth = 8;
  proxy.bootstrap = false;
  proxy.random_thresholds = true;

  std::vector<std::size_t> selected;
  std::vector<bool> in_set(train.d(), false);

  auto gather = [&](const Dataset& src, const std::vector<std::size_t>& cols) {
    Matrix m(src.n(), cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
      for (std::size_t i = 0; i < src.n(); ++i)
        m(i, c) = src.features()(i, cols[c]);
    return m;
  };

  for (std::size_t round = 0; selected.size() < k; ++round) {
    std::vector<std::size_t> remaining;
    for (std::size_t j = 0; j < train.d(); ++j)
      if (!in_set[j]) remaining.push_back(j);

    Rng round_rng(derive_seed(seed, round));
    auto picks = round_rng.sample_without_replacement(
        remaining.size(), std::min(candidates_per_round, remaining.size()));
    std::vector<std::size_t> candidates;
    candidates.reserve(picks.size());
    for (std::size_t p : picks) candidates.push_back(remaining[p]);
    std::sort(candidates.begin(), candidates.end());

    std::vector<double> accuracy(candidates.size(), 0.0);
    detail::parallel_for(candidates.size(), threads, [&](std::size_t c) {
      std::vector<std::size_t> cols = selected;
      cols.push_back(candidates[c]);
      Matrix fit_m = gather(fit_ds, cols);
      Matrix val_m = gather(val_ds, cols);
      Forest proxy_forest = Forest::fit(
          fit_m, fit_ds.labels(), proxy,
          derive_seed(derive_seed(seed, round), candidates[c]));
      std::size_t correct = 0;
      for (std::size_t i = 0; i < val_m.rows(); ++i)
        if (proxy_forest.predict(val_m.row(i)) == val_ds.labels()[i])
          ++correct;
      accuracy[c] = static_cast<double>(correct) /
                    static_cast<double>(val_m.rows());
    });

    std::size_t best = 0;
    for (std::size_t c = 1; c < candidates.size(); ++c)
      if (accuracy[c] > accuracy[best]) best = c;  // candidates sorted: tie -> lower index
    selected.push_back(candidates[best]);
    in_set[candidates[best]] = true;
  }
  return {std::move(selected), "sequential", k};
}

// Seeded uniform-random permutation of {1..d} scaled into (0, 1]; top-k is
// therefore a uniform random k-subset.
inline ScoreVector random_scores(const Dataset& train, std::uint64_t seed) {
  const std::size_t d = train.d();
  std::vector<std::size_t> perm(d);
  std::iota(perm.begin(), perm.end(), 1);
  Rng rng(seed);
  rng.shuffle(perm);

  ScoreVector sv;
  sv.method_name = "random";
  sv.scores.resize(d);
  for (std::size_t j = 0; j < d; ++j)
    sv.scores[j] = static_cast<double>(perm[j]) / static_cast<double>(d);
  return sv;
}

}  // namespace llmfs
