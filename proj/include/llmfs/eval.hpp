#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "llmfs/dataset.hpp"
#include "llmfs/error.hpp"
#include "llmfs/models.hpp"

namespace llmfs {

using Clock = std::chrono::steady_clock;

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + tn + fp + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

enum class Averaging { binary, weighted };

struct PointMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  PointMetrics point;
  double mcc = 0.0;
  std::optional<double> auc;  // absent when the test set is single-class
  ConfusionCounts counts;
  double runtime_seconds = 0.0;
};

inline ConfusionCounts confusion(const std::vector<int>& truth,
                                 const std::vector<int>& predicted) {
  if (truth.size() != predicted.size())
    fail(Errc::length_mismatch, "confusion: label vectors differ in length");
  if (truth.empty()) fail(Errc::empty_input, "confusion: no samples");
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 1)
      (predicted[i] == 1 ? c.tp : c.fn) += 1;
    else
      (predicted[i] == 1 ? c.fp : c.tn) += 1;
  }
  return c;
}

namespace detail {

// Precision/recall/F1 for a single positive class; empty denominators -> 0.
inline PointMetrics one_class_metrics(double tp, double fp, double fn,
                                      double n) {
  PointMetrics m;
  m.accuracy = 0.0;  // filled by caller
  m.precision = (tp + fp > 0.0) ? tp / (tp + fp) : 0.0;
  m.recall = (tp + fn > 0.0) ? tp / (tp + fn) : 0.0;
  m.f1 = (m.precision + m.recall > 0.0)
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  (void)n;
  return m;
}

}  // namespace detail

// Binary averaging scores class 1 only; weighted averaging averages both
// one-vs-rest views weighted by class support (which makes weighted recall
// coincide with accuracy).
inline PointMetrics point_metrics(const ConfusionCounts& c,
                                  Averaging averaging = Averaging::weighted) {
  if (c.total() == 0) fail(Errc::empty_counts, "point_metrics: empty counts");
  const double n = static_cast<double>(c.total());
  const double tp = static_cast<double>(c.tp), tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp), fn = static_cast<double>(c.fn);

  PointMetrics m;
  m.accuracy = (tp + tn) / n;
  if (averaging == Averaging::binary) {
    PointMetrics pos = detail::one_class_metrics(tp, fp, fn, n);
    m.precision = pos.precision;
    m.recall = pos.recall;
    m.f1 = pos.f1;
    return m;
  }
  PointMetrics pos = detail::one_class_metrics(tp, fp, fn, n);
  PointMetrics neg = detail::one_class_metrics(tn, fn, fp, n);
  const double w1 = (tp + fn) / n;
  const double w0 = (tn + fp) / n;
  m.precision = w1 * pos.precision + w0 * neg.precision;
  m.recall = w1 * pos.recall + w0 * neg.recall;
  m.f1 = w1 * pos.f1 + w0 * neg.f1;
  return m;
}

// Matthews correlation; 0 whenever a marginal is empty.
inline double matthews(const ConfusionCounts& c) {
  const double tp = static_cast<double>(c.tp), tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp), fn = static_cast<double>(c.fn);
  double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(denom);
}

// Rank-based AUC: average ranks over ties, then the Mann-Whitney identity
// AUC = (R1 - n1(n1+1)/2) / (n1 * n0).
inline double auc_from_scores(const std::vector<double>& scores,
                              const std::vector<int>& truth) {
  if (scores.size() != truth.size())
    fail(Errc::length_mismatch, "auc: score/label length mismatch");
  if (scores.empty()) fail(Errc::empty_input, "auc: no samples");
  std::size_t n1 = 0;
  for (int y : truth) n1 += static_cast<std::size_t>(y);
  std::size_t n0 = truth.size() - n1;
  if (n1 == 0 || n0 == 0)
    fail(Errc::single_class, "auc undefined for single-class truth");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (truth[order[k]] == 1) rank_sum_pos += avg_rank;
    i = j;
  }
  double u = rank_sum_pos -
             static_cast<double>(n1) * static_cast<double>(n1 + 1) / 2.0;
  return u / (static_cast<double>(n1) * static_cast<double>(n0));
}

// Scores and predicts every test row, then assembles the metric suite.
// runtime_seconds is measured from the caller-supplied start point so it can
// cover feature selection and training as well as this evaluation.
inline EvalReport evaluate(const TrainedModel& model, const Dataset& test,
                           Clock::time_point started_at,
                           Averaging averaging = Averaging::weighted) {
  std::vector<double> scores(test.n());
  std::vector<int> predicted(test.n());
  for (std::size_t i = 0; i < test.n(); ++i) {
    scores[i] = model.predict_score(test.features().row(i));
    predicted[i] = scores[i] > 0.5 ? 1 : 0;
  }

  EvalReport r;
  r.counts = confusion(test.labels(), predicted);
  r.point = point_metrics(r.counts, averaging);
  r.mcc = matthews(r.counts);
  if (test.has_both_classes()) r.auc = auc_from_scores(scores, test.labels());
  r.runtime_seconds =
      std::chrono::duration<double>(Clock::now() - started_at).count();
  return r;
}

}  // namespace llmfs
