#include "llmfs/models.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "llmfs/dataset.hpp"
#include "llmfs/trees.hpp"

namespace {

using llmfs::ClassifierKind;
using llmfs::ClassifierSpec;
using llmfs::Dataset;
using llmfs::Error;
using llmfs::Matrix;
using llmfs::MlpNet;
using llmfs::Rng;
using llmfs::TrainedModel;

Dataset separable(std::size_t n, std::size_t d, double shift,
                  std::uint64_t seed) {
  llmfs::SynthSpec spec;
  spec.n_samples = n;
  spec.n_features = d;
  spec.n_informative = d;
  spec.mean_shift = shift;
  spec.seed = seed;
  return llmfs::generate_synthetic(spec);
}

double accuracy_on(const TrainedModel& model, const Dataset& ds) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ds.n(); ++i)
    if (model.predict(ds.features().row(i)) == ds.labels()[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(ds.n());
}

TEST(ClassifierNames, RoundTripAndRejection) {
  for (auto kind : {ClassifierKind::knn, ClassifierKind::random_forest,
                    ClassifierKind::extra_trees, ClassifierKind::mlp})
    EXPECT_EQ(llmfs::classifier_from_string(llmfs::to_string(kind)), kind);
  EXPECT_THROW(llmfs::classifier_from_string("svm"), Error);
}

TEST(Standardizer, CentersScalesAndHandlesConstants) {
  Matrix x(4, 2);
  x(0, 0) = 2; x(1, 0) = 4; x(2, 0) = 6; x(3, 0) = 8;
  for (std::size_t i = 0; i < 4; ++i) x(i, 1) = 7.0;
  llmfs::Standardizer s;
  s.fit(x);
  EXPECT_DOUBLE_EQ(s.mean()[0], 5.0);
  EXPECT_DOUBLE_EQ(s.scale()[0], std::sqrt(5.0));  // population sd
  EXPECT_DOUBLE_EQ(s.scale()[1], 1.0);             // constant column

  auto z = s.transform(x.row(0));
  EXPECT_NEAR(z[0], (2.0 - 5.0) / std::sqrt(5.0), 1e-12);
  EXPECT_DOUBLE_EQ(z[1], 0.0);
}

TEST(Knn, MajorityVoteOnHandBuiltNeighborhood) {
  // Five points at x=0 labeled 1, five at x=10 labeled 0; k=5 neighbors of
  // any probe near one cluster are exactly that cluster.
  Matrix m(10, 1);
  std::vector<int> y(10);
  for (std::size_t i = 0; i < 5; ++i) { m(i, 0) = 0.0 + 0.01 * static_cast<double>(i); y[i] = 1; }
  for (std::size_t i = 5; i < 10; ++i) { m(i, 0) = 10.0 + 0.01 * static_cast<double>(i); y[i] = 0; }
  Dataset ds(std::move(m), y, {"x"});

  ClassifierSpec spec;
  spec.kind = ClassifierKind::knn;
  TrainedModel knn = TrainedModel::fit(ds, spec, 0);

  std::vector<double> probe_pos{0.02}, probe_neg{10.02};
  EXPECT_EQ(knn.predict(probe_pos), 1);
  EXPECT_EQ(knn.predict(probe_neg), 0);
  EXPECT_DOUBLE_EQ(knn.predict_score(probe_pos), 1.0);
  EXPECT_DOUBLE_EQ(knn.predict_score(probe_neg), 0.0);
}

TEST(Knn, ScoreIsNeighborFractionAndKValidated) {
  Matrix m(6, 1);
  std::vector<int> y = {1, 1, 1, 0, 0, 1};
  for (std::size_t i = 0; i < 6; ++i) m(i, 0) = static_cast<double>(i);
  Dataset ds(std::move(m), y, {"x"});

  ClassifierSpec spec;
  spec.kind = ClassifierKind::knn;
  TrainedModel knn = TrainedModel::fit(ds, spec, 0);
  // Probe at 0: the 5 nearest of 6 points are indices 0..4 -> 3/5 positive.
  std::vector<double> probe{0.0};
  EXPECT_DOUBLE_EQ(knn.predict_score(probe), 0.6);
  EXPECT_EQ(knn.predict(probe), 1);

  spec.k_neighbors = 7;
  EXPECT_THROW(TrainedModel::fit(ds, spec, 0), Error);
  spec.k_neighbors = 0;
  EXPECT_THROW(TrainedModel::fit(ds, spec, 0), Error);
}

TEST(Forests, LearnSeparableDataAndStayDeterministic) {
  Dataset train = separable(240, 4, 3.0, 51);
  Dataset test = separable(120, 4, 3.0, 52);
  for (auto kind : {ClassifierKind::random_forest, ClassifierKind::extra_trees}) {
    ClassifierSpec spec;
    spec.kind = kind;
    spec.n_trees = 40;
    spec.max_depth = 8;
    TrainedModel a = TrainedModel::fit(train, spec, 9);
    EXPECT_GE(accuracy_on(a, test), 0.9) << llmfs::to_string(kind);

    TrainedModel b = TrainedModel::fit(train, spec, 9);
    for (std::size_t i = 0; i < 20; ++i)
      EXPECT_EQ(a.predict_score(test.features().row(i)),
                b.predict_score(test.features().row(i)));
  }
}

TEST(Forests, ThreadCountDoesNotChangePredictions) {
  Dataset train = separable(150, 3, 2.0, 53);
  llmfs::ForestConfig cfg;
  cfg.n_trees = 25;
  cfg.max_depth = 8;
  cfg.bootstrap = true;
  cfg.random_thresholds = false;
  auto serial = llmfs::Forest::fit(train.features(), train.labels(), cfg, 3, 1);
  auto threaded = llmfs::Forest::fit(train.features(), train.labels(), cfg, 3, 4);
  for (std::size_t i = 0; i < train.n(); ++i)
    EXPECT_EQ(serial.positive_fraction(train.features().row(i)),
              threaded.positive_fraction(train.features().row(i)));
  EXPECT_EQ(serial.importance(), threaded.importance());
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
  const std::size_t inputs = 4, hidden = 3, batch_n = 8;
  Rng rng(1234);
  MlpNet net(inputs, hidden, rng);

  Matrix x(batch_n, inputs);
  std::vector<int> y(batch_n);
  std::mt19937 gen(55);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (std::size_t i = 0; i < batch_n; ++i) {
    y[i] = static_cast<int>(gen() % 2);
    for (std::size_t j = 0; j < inputs; ++j) x(i, j) = uni(gen);
  }
  std::vector<std::size_t> batch(batch_n);
  std::iota(batch.begin(), batch.end(), 0);

  auto batch_loss = [&](const MlpNet& n) {
    double total = 0.0;
    for (std::size_t i : batch) total += n.loss(x.row(i), y[i]);
    return total / static_cast<double>(batch_n);
  };

  std::vector<double> analytic = net.gradient(x, y, batch);
  std::vector<double> params = net.parameters();
  const double h = 1e-6;
  for (std::size_t p = 0; p < params.size(); ++p) {
    MlpNet plus = net, minus = net;
    auto pp = params, pm = params;
    pp[p] += h;
    pm[p] -= h;
    plus.set_parameters(pp);
    minus.set_parameters(pm);
    double numeric = (batch_loss(plus) - batch_loss(minus)) / (2.0 * h);
    double denom = std::max({1.0, std::fabs(analytic[p]), std::fabs(numeric)});
    EXPECT_LT(std::fabs(analytic[p] - numeric) / denom, 1e-4)
        << "parameter " << p;
  }
}

TEST(Mlp, ZeroNetworkScoresHalfAndPredictsNegative) {
  Rng rng(2);
  MlpNet net(2, 3, rng);
  net.set_parameters(std::vector<double>(net.parameter_count(), 0.0));
  std::vector<double> x{0.4, -0.7};
  EXPECT_DOUBLE_EQ(net.forward(x), 0.5);

  // The 0.5 threshold resolves ties toward the negative class.
  EXPECT_EQ(net.forward(x) > 0.5 ? 1 : 0, 0);
}

TEST(Mlp, TrainsToSeparateShiftedClasses) {
  Dataset train = separable(300, 4, 3.0, 61);
  Dataset test = separable(150, 4, 3.0, 62);
  ClassifierSpec spec;
  spec.kind = ClassifierKind::mlp;
  spec.epochs = 30;
  TrainedModel mlp = TrainedModel::fit(train, spec, 7);
  EXPECT_GE(accuracy_on(mlp, test), 0.9);

  TrainedModel again = TrainedModel::fit(train, spec, 7);
  for (std::size_t i = 0; i < 20; ++i)
    EXPECT_EQ(mlp.predict_score(test.features().row(i)),
              again.predict_score(test.features().row(i)));
}

}  // namespace
