#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "llmfs/matrix.hpp"
#include "llmfs/parallel.hpp"
#include "llmfs/rng.hpp"

namespace llmfs {

// Shared CART-style ensemble used by the importance scorers, the random
// forest / extra trees classifiers, and the sequential-FS proxy model.
//   bootstrap=true,  random_thresholds=false  -> random forest
//   bootstrap=false, random_thresholds=true   -> extra trees
struct ForestConfig {
  std::size_t n_trees = 100;
  std::size_t max_depth = 12;
  bool bootstrap = true;
  bool random_thresholds = false;
  std::size_t max_features = 0;  // candidates per split; 0 = floor(sqrt(d))
};

namespace detail {

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t leaf_label = 0;
};

inline double gini(std::size_t n0, std::size_t n1) {
  double n = static_cast<double>(n0 + n1);
  if (n == 0.0) return 0.0;
  double p0 = static_cast<double>(n0) / n;
  double p1 = static_cast<double>(n1) / n;
  return 1.0 - p0 * p0 - p1 * p1;
}

class DecisionTree {
public:
  // samples may contain repeats (bootstrap). importance accumulates the
  // count-weighted Gini decrease of every split, per feature.
  void build(const Matrix& X, const std::vector<int>& y,
             std::vector<std::size_t> samples, const ForestConfig& cfg,
             std::size_t max_features, Rng& rng,
             std::vector<double>& importance) {
    nodes_.clear();
    build_node(X, y, std::move(samples), 0, cfg, max_features, rng,
               importance);
  }

  int predict(std::span<const double> row) const {
    std::int32_t idx = 0;
    while (nodes_[idx].feature >= 0) {
      const TreeNode& node = nodes_[idx];
      idx = (row[static_cast<std::size_t>(node.feature)] <= node.threshold)
                ? node.left
                : node.right;
    }
    return nodes_[idx].leaf_label;
  }

private:
  struct Split {
    double decrease = 0.0;  // |S| g(S) - |L| g(L) - |R| g(R)
    std::int32_t feature = -1;
    double threshold = 0.0;
  };

  std::int32_t build_node(const Matrix& X, const std::vector<int>& y,
                          std::vector<std::size_t> samples, std::size_t depth,
                          const ForestConfig& cfg, std::size_t max_features,
                          Rng& rng, std::vector<double>& importance) {
    std::size_t n1 = 0;
    for (std::size_t i : samples) n1 += static_cast<std::size_t>(y[i]);
    std::size_t n0 = samples.size() - n1;

    auto make_leaf = [&]() {
      TreeNode leaf;
      leaf.leaf_label = (n1 > n0) ? 1 : 0;  // tie -> 0
      nodes_.push_back(leaf);
      return static_cast<std::int32_t>(nodes_.size() - 1);
    };

    if (n0 == 0 || n1 == 0 || depth >= cfg.max_depth || samples.size() < 2)
      return make_leaf();

    Split best = find_split(X, y, samples, n0, n1, max_features, rng,
                            cfg.random_thresholds);
    if (best.feature < 0 || best.decrease <= 0.0) return make_leaf();

    importance[static_cast<std::size_t>(best.feature)] += best.decrease;

    std::vector<std::size_t> left, right;
    for (std::size_t i : samples) {
      if (X(i, static_cast<std::size_t>(best.feature)) <= best.threshold)
        left.push_back(i);
      else
        right.push_back(i);
    }
    samples.clear();
    samples.shrink_to_fit();

    std::int32_t node_idx = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();
    nodes_[node_idx].feature = best.feature;
    nodes_[node_idx].threshold = best.threshold;
    std::int32_t l = build_node(X, y, std::move(left), depth + 1, cfg,
                                max_features, rng, importance);
    std::int32_t r = build_node(X, y, std::move(right), depth + 1, cfg,
                                max_features, rng, importance);
    nodes_[node_idx].left = l;
    nodes_[node_idx].right = r;
    return node_idx;
  }

  // Candidates are evaluated in ascending feature order and, for midpoint
  // search, ascending threshold order; only a strictly larger decrease
  // replaces the incumbent, so ties resolve to the lowest feature index.
  Split find_split(const Matrix& X, const std::vector<int>& y,
                   const std::vector<std::size_t>& samples, std::size_t n0,
                   std::size_t n1, std::size_t max_features, Rng& rng,
                   bool random_thresholds) {
    auto candidates =
        rng.sample_without_replacement(X.cols(), max_features);
    std::sort(candidates.begin(), candidates.end());

    const double node_impurity =
        static_cast<double>(samples.size()) * gini(n0, n1);
    Split best;

    for (std::size_t f : candidates) {
      if (random_thresholds) {
        double lo = X(samples[0], f), hi = lo;
        for (std::size_t i : samples) {
          lo = std::min(lo, X(i, f));
          hi = std::max(hi, X(i, f));
        }
        if (lo == hi) continue;
        double thr = rng.uniform(lo, hi);
        std::size_t l0 = 0, l1 = 0, nl = 0;
        for (std::size_t i : samples) {
          if (X(i, f) <= thr) {
            ++nl;
            l1 += static_cast<std::size_t>(y[i]);
          }
        }
        l0 = nl - l1;
        if (nl == 0 || nl == samples.size()) continue;
        double decrease =
            node_impurity -
            static_cast<double>(nl) * gini(l0, l1) -
            static_cast<double>(samples.size() - nl) * gini(n0 - l0, n1 - l1);
        if (decrease > best.decrease) {
          best = {decrease, static_cast<std::int32_t>(f), thr};
        }
      } else {
        std::vector<std::pair<double, int>> vals;
        vals.reserve(samples.size());
        for (std::size_t i : samples) vals.emplace_back(X(i, f), y[i]);
        std::sort(vals.begin(), vals.end());
        std::size_t l0 = 0, l1 = 0;
        for (std::size_t i = 1; i < vals.size(); ++i) {
          l1 += static_cast<std::size_t>(vals[i - 1].second);
          l0 = i - l1;
          if (vals[i].first == vals[i - 1].first) continue;
          double decrease =
              node_impurity - static_cast<double>(i) * gini(l0, l1) -
              static_cast<double>(vals.size() - i) * gini(n0 - l0, n1 - l1);
          if (decrease > best.decrease) {
            best = {decrease, static_cast<std::int32_t>(f),
                    (vals[i - 1].first + vals[i].first) / 2.0};
          }
        }
      }
    }
    return best;
  }

  std::vector<TreeNode> nodes_;
};

}  // namespace detail

class Forest {
public:
  static Forest fit(const Matrix& X, const std::vector<int>& y,
                    const ForestConfig& cfg, std::uint64_t seed,
                    std::size_t threads = 1) {
    Forest forest;
    forest.trees_.resize(cfg.n_trees);
    std::size_t max_features = cfg.max_features;
    if (max_features == 0)
      max_features = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::sqrt(static_cast<double>(X.cols()))));
    max_features = std::min(max_features, X.cols());

    // Per-tree importance slots, reduced in tree order afterwards, so the
    // sum is bitwise identical for any thread count.
    std::vector<std::vector<double>> tree_importance(
        cfg.n_trees, std::vector<double>(X.cols(), 0.0));
    detail::parallel_for(cfg.n_trees, threads, [&](std::size_t t) {
      Rng rng(derive_seed(seed, t));
      std::vector<std::size_t> samples(X.rows());
      if (cfg.bootstrap) {
        for (auto& s : samples) s = rng.below(X.rows());
      } else {
        for (std::size_t i = 0; i < X.rows(); ++i) samples[i] = i;
      }
      forest.trees_[t].build(X, y, std::move(samples), cfg, max_features, rng,
                             tree_importance[t]);
    });

    forest.importance_.assign(X.cols(), 0.0);
    for (const auto& imp : tree_importance)
      for (std::size_t j = 0; j < imp.size(); ++j)
        forest.importance_[j] += imp[j];
    return forest;
  }

  // Fraction of trees voting positive.
  double positive_fraction(std::span<const double> row) const {
    std::size_t votes = 0;
    for (const auto& tree : trees_)
      votes += static_cast<std::size_t>(tree.predict(row));
    return static_cast<double>(votes) / static_cast<double>(trees_.size());
  }

  int predict(std::span<const double> row) const {
    return positive_fraction(row) > 0.5 ? 1 : 0;
  }

  // Accumulated Gini decrease per feature, unnormalized.
  const std::vector<double>& importance() const { return importance_; }

  std::size_t n_trees() const { return trees_.size(); }

private:
  std::vector<detail::DecisionTree> trees_;
  std::vector<double> importance_;
};

}  // namespace llmfs
