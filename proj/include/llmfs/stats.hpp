#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "llmfs/dataset.hpp"
#include "llmfs/error.hpp"
#include "llmfs/parallel.hpp"
#include "llmfs/rng.hpp"

namespace llmfs {

// Per-feature summary fed into prompts: global moments and order statistics,
// class-conditional moments, their mean difference, and a few representative
// raw values per class.
struct FeatureDescriptor {
  std::string name;
  double mu = 0.0;
  double sigma = 0.0;  // population standard deviation
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  double iqr = 0.0;
  double mu_pos = 0.0;
  double mu_neg = 0.0;
  double sigma_pos = 0.0;
  double sigma_neg = 0.0;
  double delta_mu = 0.0;  // mu_pos - mu_neg
  std::vector<double> samples_pos;
  std::vector<double> samples_neg;
};

namespace detail {

// Population mean and standard deviation (1/n weighting).
inline std::pair<double, double> mean_sd(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  double mean = sum / static_cast<double>(v.size());
  double sq = 0.0;
  for (double x : v) sq += (x - mean) * (x - mean);
  return {mean, std::sqrt(sq / static_cast<double>(v.size()))};
}

// Linear interpolation between order statistics at h = p * (m - 1).
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  const std::size_t m = sorted.size();
  if (m == 1) return sorted[0];
  double h = p * static_cast<double>(m - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = static_cast<std::size_t>(std::ceil(h));
  double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// Middle value for odd m, midpoint of the two middles for even m.
inline double median_sorted(const std::vector<double>& sorted) {
  const std::size_t m = sorted.size();
  if (m % 2 == 1) return sorted[m / 2];
  return (sorted[m / 2 - 1] + sorted[m / 2]) / 2.0;
}

}  // namespace detail

// Builds the descriptor for column j. Representative samples are drawn
// uniformly without replacement within each class, deterministically in seed.
inline FeatureDescriptor describe_feature(const Dataset& ds, std::size_t j,
                                          std::size_t samples_per_class = 5,
                                          std::uint64_t seed = 0) {
  if (j >= ds.d()) fail(Errc::index_out_of_range, "feature index out of range");
  if (!ds.has_both_classes())
    fail(Errc::single_class_dataset, "descriptors need both classes present");

  std::vector<double> all = ds.column(j);
  std::vector<double> pos, neg;
  for (std::size_t i = 0; i < ds.n(); ++i)
    (ds.labels()[i] == 1 ? pos : neg).push_back(all[i]);

  FeatureDescriptor desc;
  desc.name = ds.feature_names()[j];
  std::tie(desc.mu, desc.sigma) = detail::mean_sd(all);
  std::tie(desc.mu_pos, desc.sigma_pos) = detail::mean_sd(pos);
  std::tie(desc.mu_neg, desc.sigma_neg) = detail::mean_sd(neg);
  desc.delta_mu = desc.mu_pos - desc.mu_neg;

  std::vector<double> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  desc.min = sorted.front();
  desc.max = sorted.back();
  desc.median = detail::median_sorted(sorted);
  desc.iqr = detail::quantile_sorted(sorted, 0.75) -
             detail::quantile_sorted(sorted, 0.25);

  Rng rng(seed);
  auto pick = [&](const std::vector<double>& vals) {
    auto idx = rng.sample_without_replacement(
        vals.size(), std::min(samples_per_class, vals.size()));
    std::vector<double> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(vals[i]);
    return out;
  };
  desc.samples_pos = pick(pos);
  desc.samples_neg = pick(neg);
  return desc;
}

// All d descriptors in feature order. Feature j uses the sub-seed
// derive_seed(seed, j), so the output is identical for any thread count.
inline std::vector<FeatureDescriptor> describe_all(
    const Dataset& ds, std::size_t samples_per_class = 5,
    std::uint64_t seed = 0, std::size_t threads = 1) {
  if (!ds.has_both_classes())
    fail(Errc::single_class_dataset, "descriptors need both classes present");
  std::vector<FeatureDescriptor> out(ds.d());
  detail::parallel_for(ds.d(), threads, [&](std::size_t j) {
    out[j] = describe_feature(ds, j, samples_per_class, derive_seed(seed, j));
  });
  return out;
}

}  // namespace llmfs
