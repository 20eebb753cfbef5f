#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "llmfs/dataset.hpp"
#include "llmfs/error.hpp"
#include "llmfs/matrix.hpp"
#include "llmfs/rng.hpp"
#include "llmfs/trees.hpp"

namespace llmfs {

enum class ClassifierKind { knn, random_forest, extra_trees, mlp };

inline std::string to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::knn: return "knn";
    case ClassifierKind::random_forest: return "random_forest";
    case ClassifierKind::extra_trees: return "extra_trees";
    case ClassifierKind::mlp: return "mlp";
  }
  return "?";
}

inline ClassifierKind classifier_from_string(const std::string& s) {
  if (s == "knn") return ClassifierKind::knn;
  if (s == "random_forest") return ClassifierKind::random_forest;
  if (s == "extra_trees") return ClassifierKind::extra_trees;
  if (s == "mlp") return ClassifierKind::mlp;
  fail(Errc::invalid_config, "unknown classifier: " + s);
}

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::random_forest;
  // knn
  std::size_t k_neighbors = 5;
  // forests
  std::size_t n_trees = 100;
  std::size_t max_depth = 12;
  // mlp
  std::size_t hidden_units = 32;
  double learning_rate = 0.01;
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
};

// Column-wise z-scaling fitted on training data; zero-spread columns divide
// by 1 so they map to constant 0.
class Standardizer {
 public:
  void fit(const Matrix& x) {
    mean_.assign(x.cols(), 0.0);
    scale_.assign(x.cols(), 1.0);
    for (std::size_t j = 0; j < x.cols(); ++j) {
      double m = 0.0;
      for (std::size_t i = 0; i < x.rows(); ++i) m += x(i, j);
      m /= static_cast<double>(x.rows());
      double sq = 0.0;
      for (std::size_t i = 0; i < x.rows(); ++i)
        sq += (x(i, j) - m) * (x(i, j) - m);
      double sd = std::sqrt(sq / static_cast<double>(x.rows()));
      mean_[j] = m;
      scale_[j] = (sd == 0.0) ? 1.0 : sd;
    }
  }

  std::vector<double> transform(std::span<const double> row) const {
    std::vector<double> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j)
      out[j] = (row[j] - mean_[j]) / scale_[j];
    return out;
  }

  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& scale() const { return scale_; }

 private:
  std::vector<double> mean_;
  std::vector<double> scale_;
};

// Single hidden layer (ReLU) into one sigmoid output, trained with
// minibatch SGD on binary cross-entropy. Exposed separately from the
// TrainedModel wrapper so the gradients can be checked numerically.
class MlpNet {
 public:
  MlpNet() = default;

  MlpNet(std::size_t inputs, std::size_t hidden, Rng& rng)
      : inputs_(inputs), hidden_(hidden) {
    w1_.resize(hidden * inputs);
    b1_.assign(hidden, 0.0);
    w2_.resize(hidden);
    b2_ = 0.0;
    for (double& w : w1_) w = rng.uniform(-0.1, 0.1);
    for (double& w : w2_) w = rng.uniform(-0.1, 0.1);
  }

  // Probability of class 1.
  double forward(std::span<const double> x) const {
    double z = b2_;
    for (std::size_t h = 0; h < hidden_; ++h) {
      double a = b1_[h];
      for (std::size_t j = 0; j < inputs_; ++j) a += w1_[h * inputs_ + j] * x[j];
      if (a > 0.0) z += w2_[h] * a;
    }
    return sigmoid(z);
  }

  // Numerically stable BCE written against the pre-sigmoid logit:
  //   loss = max(z, 0) - z*y + log(1 + exp(-|z|)).
  double loss(std::span<const double> x, int y) const {
    double z = logit(x);
    return std::max(z, 0.0) - z * static_cast<double>(y) +
           std::log1p(std::exp(-std::fabs(z)));
  }

  // Mean BCE gradient over a batch, laid out to mirror parameters().
  std::vector<double> gradient(const Matrix& x,
                               const std::vector<int>& y,
                               const std::vector<std::size_t>& batch) const {
    std::vector<double> g(parameter_count(), 0.0);
    std::vector<double> act(hidden_);
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (std::size_t idx : batch) {
      auto row = x.row(idx);
      double z = b2_;
      for (std::size_t h = 0; h < hidden_; ++h) {
        double a = b1_[h];
        for (std::size_t j = 0; j < inputs_; ++j)
          a += w1_[h * inputs_ + j] * row[j];
        act[h] = (a > 0.0) ? a : 0.0;
        z += w2_[h] * act[h];
      }
      double delta = (sigmoid(z) - static_cast<double>(y[idx])) * inv;
      std::size_t p = 0;
      for (std::size_t h = 0; h < hidden_; ++h) {
        double dh = (act[h] > 0.0) ? delta * w2_[h] : 0.0;
        for (std::size_t j = 0; j < inputs_; ++j)
          g[p++] += dh * row[j];
      }
      for (std::size_t h = 0; h < hidden_; ++h)
        g[p++] += (act[h] > 0.0) ? delta * w2_[h] : 0.0;
      for (std::size_t h = 0; h < hidden_; ++h) g[p++] += delta * act[h];
      g[p] += delta;
    }
    return g;
  }

  void sgd_step(const std::vector<double>& g, double lr) {
    std::size_t p = 0;
    for (double& w : w1_) w -= lr * g[p++];
    for (double& b : b1_) b -= lr * g[p++];
    for (double& w : w2_) w -= lr * g[p++];
    b2_ -= lr * g[p];
  }

  std::size_t parameter_count() const {
    return w1_.size() + b1_.size() + w2_.size() + 1;
  }

  std::vector<double> parameters() const {
    std::vector<double> p;
    p.reserve(parameter_count());
    p.insert(p.end(), w1_.begin(), w1_.end());
    p.insert(p.end(), b1_.begin(), b1_.end());
    p.insert(p.end(), w2_.begin(), w2_.end());
    p.push_back(b2_);
    return p;
  }

  void set_parameters(const std::vector<double>& p) {
    if (p.size() != parameter_count())
      fail(Errc::dimension_mismatch, "parameter vector size mismatch");
    std::size_t k = 0;
    for (double& w : w1_) w = p[k++];
    for (double& b : b1_) b = p[k++];
    for (double& w : w2_) w = p[k++];
    b2_ = p[k];
  }

 private:
  double logit(std::span<const double> x) const {
    double z = b2_;
    for (std::size_t h = 0; h < hidden_; ++h) {
      double a = b1_[h];
      for (std::size_t j = 0; j < inputs_; ++j) a += w1_[h * inputs_ + j] * x[j];
      if (a > 0.0) z += w2_[h] * a;
    }
    return z;
  }

  static double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
  }

  std::size_t inputs_ = 0;
  std::size_t hidden_ = 0;
  std::vector<double> w1_;  // hidden x inputs, row-major
  std::vector<double> b1_;
  std::vector<double> w2_;
  double b2_ = 0.0;
};

namespace detail {

struct KnnState {
  std::size_t k = 5;
  Standardizer scaler;
  Matrix points;
  std::vector<int> labels;
};

struct MlpState {
  Standardizer scaler;
  MlpNet net;
};

}  // namespace detail

// A fitted classifier. predict_score is the probability-like score for
// class 1; predict thresholds it at 0.5 with ties resolved to class 0.
class TrainedModel {
 public:
  static TrainedModel fit(const Dataset& train, const ClassifierSpec& spec,
                          std::uint64_t seed, std::size_t threads = 1) {
    TrainedModel m;
    m.kind_ = spec.kind;
    switch (spec.kind) {
      case ClassifierKind::knn: {
        if (spec.k_neighbors == 0)
          fail(Errc::invalid_config, "knn needs k >= 1");
        if (spec.k_neighbors > train.n())
          fail(Errc::k_too_large, "knn k exceeds training size");
        detail::KnnState st;
        st.k = spec.k_neighbors;
        st.scaler.fit(train.features());
        st.points = Matrix(train.n(), train.d());
        for (std::size_t i = 0; i < train.n(); ++i) {
          auto z = st.scaler.transform(train.features().row(i));
          for (std::size_t j = 0; j < train.d(); ++j) st.points(i, j) = z[j];
        }
        st.labels = train.labels();
        m.state_ = std::move(st);
        break;
      }
      case ClassifierKind::random_forest:
      case ClassifierKind::extra_trees: {
        ForestConfig cfg;
        cfg.n_trees = spec.n_trees;
        cfg.max_depth = spec.max_depth;
        cfg.bootstrap = (spec.kind == ClassifierKind::random_forest);
        cfg.random_thresholds = (spec.kind == ClassifierKind::extra_trees);
        m.state_ = Forest::fit(train.features(), train.labels(), cfg, seed,
                               threads);
        break;
      }
      case ClassifierKind::mlp: {
        detail::MlpState st;
        st.scaler.fit(train.features());
        Matrix z(train.n(), train.d());
        for (std::size_t i = 0; i < train.n(); ++i) {
          auto r = st.scaler.transform(train.features().row(i));
          for (std::size_t j = 0; j < train.d(); ++j) z(i, j) = r[j];
        }
        Rng init_rng(derive_seed(seed, "init"));
        st.net = MlpNet(train.d(), spec.hidden_units, init_rng);
        std::vector<std::size_t> order(train.n());
        for (std::size_t e = 0; e < spec.epochs; ++e) {
          std::iota(order.begin(), order.end(), 0);
          Rng epoch_rng(derive_seed(seed, e));
          epoch_rng.shuffle(order);
          for (std::size_t start = 0; start < order.size();
               start += spec.batch_size) {
            std::size_t stop = std::min(order.size(),
                                        start + spec.batch_size);
            std::vector<std::size_t> batch(order.begin() + start,
                                           order.begin() + stop);
            st.net.sgd_step(st.net.gradient(z, train.labels(), batch),
                            spec.learning_rate);
          }
        }
        m.state_ = std::move(st);
        break;
      }
    }
    return m;
  }

  double predict_score(std::span<const double> row) const {
    return std::visit(
        [&](const auto& st) -> double { return score_impl(st, row); },
        state_);
  }

  int predict(std::span<const double> row) const {
    return predict_score(row) > 0.5 ? 1 : 0;
  }

  ClassifierKind kind() const { return kind_; }

 private:
  static double score_impl(const detail::KnnState& st,
                           std::span<const double> row) {
    auto z = st.scaler.transform(row);
    // (distance^2, index): index breaks distance ties deterministically.
    std::vector<std::pair<double, std::size_t>> dist(st.points.rows());
    for (std::size_t i = 0; i < st.points.rows(); ++i) {
      double sq = 0.0;
      auto p = st.points.row(i);
      for (std::size_t j = 0; j < z.size(); ++j)
        sq += (z[j] - p[j]) * (z[j] - p[j]);
      dist[i] = {sq, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<long>(st.k),
                      dist.end());
    std::size_t ones = 0;
    for (std::size_t i = 0; i < st.k; ++i)
      ones += static_cast<std::size_t>(st.labels[dist[i].second]);
    return static_cast<double>(ones) / static_cast<double>(st.k);
  }

  static double score_impl(const Forest& st, std::span<const double> row) {
    return st.positive_fraction(row);
  }

  static double score_impl(const detail::MlpState& st,
                           std::span<const double> row) {
    return st.net.forward(st.scaler.transform(row));
  }

  ClassifierKind kind_ = ClassifierKind::random_forest;
  std::variant<detail::KnnState, Forest, detail::MlpState> state_;
};

}  // namespace llmfs
