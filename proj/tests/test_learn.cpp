#include "support.hpp"

#include "vinerisk/cross_validation.hpp"
#include "vinerisk/error.hpp"
#include "vinerisk/logistic.hpp"
#include "vinerisk/metrics.hpp"
#include "vinerisk/model_io.hpp"

#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <random>
#include <set>

using namespace vinerisk;

namespace {

ConfusionMatrix cm(std::int64_t tn, std::int64_t fp, std::int64_t fn, std::int64_t tp) {
  ConfusionMatrix m;
  m << tn, fp, fn, tp;
  return m;
}

// Kappa from label lists, written independently of the matrix formula.
double kappa_by_counting(const ConfusionMatrix& m) {
  long double n = 0, agree = 0, actual_pos = 0, pred_pos = 0;
  for (int a = 0; a < 2; ++a)
    for (int p = 0; p < 2; ++p) {
      const auto c = static_cast<long double>(m(a, p));
      n += c;
      if (a == p) agree += c;
      if (a == 1) actual_pos += c;
      if (p == 1) pred_pos += c;
    }
  const long double po = agree / n;
  const long double pe = (actual_pos / n) * (pred_pos / n) +
                         ((n - actual_pos) / n) * ((n - pred_pos) / n);
  if (pe == 1.0L) return po == 1.0L ? 1.0 : 0.0;
  return static_cast<double>((po - pe) / (1.0L - pe));
}

struct Separable {
  Eigen::MatrixXd X;
  Eigen::VectorXi y;
};

// One feature; negatives in [0, 0.39], positives in [1, 1.29].
Separable separable(int n_neg = 40, int n_pos = 30) {
  Separable s{Eigen::MatrixXd(n_neg + n_pos, 1), Eigen::VectorXi(n_neg + n_pos)};
  for (int i = 0; i < n_neg; ++i) {
    s.X(i, 0) = 0.01 * i;
    s.y(i) = 0;
  }
  for (int i = 0; i < n_pos; ++i) {
    s.X(n_neg + i, 0) = 1.0 + 0.01 * i;
    s.y(n_neg + i) = 1;
  }
  return s;
}

Eigen::VectorXi classes_of(const Eigen::VectorXd& p) {
  return (p.array() >= 0.5).cast<int>();
}

EnsembleOptions fast_options() {
  EnsembleOptions o;
  o.hyper = testing::fast_hyper();
  return o;
}

} // namespace

TEST_SUITE("learn") {

TEST_CASE("kappa: worked example, perfect agreement, constant prediction") {
  CHECK(cohens_kappa(cm(40, 10, 5, 45)) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(std::abs(cohens_kappa(cm(40, 10, 5, 45)) - 0.7) < 1e-9);
  CHECK(cohens_kappa(cm(50, 0, 0, 50)) == 1.0);
  CHECK(cohens_kappa(cm(3, 0, 0, 97)) == 1.0);
  CHECK(cohens_kappa(cm(0, 50, 0, 50)) == 0.0);
  CHECK(cohens_kappa(cm(50, 0, 50, 0)) == 0.0);
  CHECK(cohens_kappa(cm(0, 0, 0, 9)) == 1.0);
  CHECK(cohens_kappa(cm(0, 9, 0, 0)) == 0.0);
  CHECK_THROWS_AS(cohens_kappa(cm(0, 0, 0, 0)), InputError);
}

TEST_CASE("kappa: bounded and equal to the counting oracle on random matrices") {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::int64_t> count(0, 60);
  for (int trial = 0; trial < 10000; ++trial) {
    auto m = cm(count(rng), count(rng), count(rng), count(rng));
    if (m.sum() == 0) m(0, 0) = 1;
    const double k = cohens_kappa(m);
    CHECK(k >= -1.0);
    CHECK(k <= 1.0);
    CHECK(k == doctest::Approx(kappa_by_counting(m)).epsilon(1e-12));
  }
}

TEST_CASE("confusion matrix tally") {
  Eigen::VectorXi actual(6), predicted(6);
  actual << 0, 0, 1, 1, 1, 0;
  predicted << 0, 1, 1, 0, 1, 0;
  CHECK(confusion_matrix(actual, predicted) == cm(2, 1, 1, 2));
  CHECK_THROWS_AS(confusion_matrix(actual, Eigen::VectorXi(5)), InputError);
}

TEST_CASE("logistic: analytic gradient matches central differences") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> bit(0, 1);
  std::uniform_int_distribution<int> rows(5, 60);
  const double h = 1e-5;
  for (int batch = 0; batch < 100; ++batch) {
    const int n = rows(rng);
    Eigen::MatrixXd X(n, 8);
    Eigen::VectorXd y(n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < 8; ++c) X(r, c) = g(rng);
      y(r) = bit(rng);
    }
    LogisticModel<double> model;
    model.weights = Eigen::VectorXd::NullaryExpr(8, [&] { return g(rng); });
    model.bias = g(rng);
    const double l2 = 1e-4;
    const auto [gw, gb] = logistic_gradient(model, X, y, l2);

    Eigen::VectorXd analytic(9), numeric(9);
    analytic << gw, gb;
    for (int k = 0; k < 9; ++k) {
      auto plus = model, minus = model;
      if (k < 8) {
        plus.weights(k) += h;
        minus.weights(k) -= h;
      } else {
        plus.bias += h;
        minus.bias -= h;
      }
      numeric(k) = (logistic_loss(plus, X, y, l2) - logistic_loss(minus, X, y, l2)) / (2 * h);
    }
    const double rel = (analytic - numeric).norm() / std::max(analytic.norm(), numeric.norm());
    CHECK(rel < 1e-5);
  }
}

TEST_CASE("logistic: training lowers the loss and sigmoid is stable") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd X(200, 3);
  Eigen::VectorXd y(200);
  for (int r = 0; r < 200; ++r) {
    for (int c = 0; c < 3; ++c) X(r, c) = g(rng);
    y(r) = X(r, 0) - 0.5 * X(r, 2) > 0 ? 1.0 : 0.0;
  }
  LogisticModel<double> zero;
  zero.weights = Eigen::VectorXd::Zero(3);
  const auto trained = train_logistic(X, y);
  CHECK(logistic_loss(trained, X, y, 1e-4) < logistic_loss(zero, X, y, 1e-4));
  CHECK(trained.weights(0) > 0.0);
  CHECK(trained.weights(2) < 0.0);
  CHECK(sigmoid(-800.0) == 0.0);
  CHECK(sigmoid(800.0) == 1.0);
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(softplus(-800.0) >= 0.0);
  CHECK(softplus(800.0) == 800.0);
}

TEST_CASE("meta-learner: a single informative base gets the largest weight") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> bit(0, 1);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 300;
    Eigen::MatrixXd P = Eigen::MatrixXd::Constant(n, 8, 0.5);
    Eigen::VectorXd y(n);
    const int perfect = trial % 8;
    for (int r = 0; r < n; ++r) {
      y(r) = bit(rng);
      P(r, perfect) = y(r);
    }
    LogisticOptions options;
    options.learning_rate = 0.1;
    options.epochs = 500;
    options.l2 = 1e-4;
    const auto meta = train_logistic(P, y, options);
    for (int k = 0; k < 8; ++k)
      if (k != perfect) CHECK(std::abs(meta.weights(perfect)) > std::abs(meta.weights(k)));
  }
}

TEST_CASE("knn_1 resubstitution reproduces every training label") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<int> bit(0, 1);
    Eigen::MatrixXd Z(250, 6);
    Eigen::VectorXi y(250);
    for (int r = 0; r < 250; ++r) {
      for (int c = 0; c < 6; ++c) Z(r, c) = g(rng);
      y(r) = bit(rng);
    }
    const auto model = train_base(BaseClassifierKind::knn_1, Z, y, Hyperparameters{}, seed);
    const Eigen::VectorXd p = predict_proba(model, Z);
    CHECK(cohens_kappa(confusion_matrix(y, classes_of(p))) == 1.0);
    for (int r = 0; r < 250; r += 17) {
      const auto single = predict_base(model, Z.row(r));
      CHECK(single.p_positive == static_cast<double>(y(r)));
    }
  }
}

TEST_CASE("knn: an even split counts as positive and ties go to the lower index") {
  auto points = std::make_shared<const Eigen::MatrixXd>((Eigen::MatrixXd(3, 1) << 0.0, 2.0, 0.0).finished());
  auto labels = std::make_shared<const Eigen::VectorXi>((Eigen::VectorXi(3) << 1, 0, 0).finished());
  const auto knn2 = make_knn(2, points, std::make_shared<const Eigen::VectorXi>(
                                            (Eigen::VectorXi(3) << 1, 0, 1).finished()));
  const auto tie = predict_base(knn2, (Eigen::RowVectorXd(1) << 1.0).finished());
  CHECK(tie.p_positive == 0.5);
  CHECK(tie.positive);

  const auto nn = nearest_neighbours(*points, (Eigen::MatrixXd(1, 1) << 1.0).finished(), 3);
  CHECK(nn(0, 0) == 0);
  CHECK(nn(0, 1) == 1);
  CHECK(nn(0, 2) == 2);
  const auto knn1 = make_knn(1, points, labels);
  CHECK(predict_base(knn1, (Eigen::RowVectorXd(1) << 0.0).finished()).p_positive == 1.0);
  CHECK_THROWS_AS(predict_base(knn1, Eigen::RowVectorXd::Zero(2)), InputError);
}

TEST_CASE("decision tree: one split separates a threshold problem") {
  Eigen::MatrixXd Z(10, 1);
  Z << -5, -4, -3, -2, -1, 1, 2, 3, 4, 5;
  Eigen::VectorXi y(10);
  y << 0, 0, 0, 0, 0, 1, 1, 1, 1, 1;
  const auto model = train_base(BaseClassifierKind::decision_tree, Z, y, Hyperparameters{}, 1);
  const auto& tree = std::get<DecisionTree>(model.impl);
  CHECK(tree.nodes.size() == 3);
  CHECK(tree.depth() == 1);
  CHECK(tree.nodes[0].threshold > -1.0);
  CHECK(tree.nodes[0].threshold < 1.0);
  CHECK(classes_of(predict_proba(model, Z)) == y);
}

TEST_CASE("decision tree: brute-force Gini split on two features") {
  // Feature 1 separates perfectly; feature 0 is noise. The root must pick 1.
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd Z(60, 2);
  Eigen::VectorXi y(60);
  for (int r = 0; r < 60; ++r) {
    Z(r, 0) = u(rng);
    Z(r, 1) = u(rng);
    y(r) = Z(r, 1) > 0.2 ? 1 : 0;
  }
  const auto model = train_base(BaseClassifierKind::decision_tree, Z, y, Hyperparameters{}, 1);
  const auto& tree = std::get<DecisionTree>(model.impl);
  CHECK(tree.nodes[0].feature == 1);
  CHECK(classes_of(predict_proba(model, Z)) == y);
}

TEST_CASE("forest of identical stumps predicts the stump's leaf frequency") {
  DecisionTree stump;
  stump.nodes = {{0, 0.0, 1, 2, 0.4, 10}, {-1, 0.0, -1, -1, 0.2, 5}, {-1, 0.0, -1, -1, 0.7, 5}};
  BaseModel model;
  model.kind = BaseClassifierKind::random_forest;
  model.dim = 1;
  model.impl = RandomForest{{stump, stump, stump, stump}};
  CHECK(predict_base(model, (Eigen::RowVectorXd(1) << -1.0).finished()).p_positive ==
        doctest::Approx(0.2));
  CHECK(predict_base(model, (Eigen::RowVectorXd(1) << 1.0).finished()).p_positive ==
        doctest::Approx(0.7));
}

TEST_CASE("random forest is seeded") {
  const auto& p = testing::small_pipeline();
  const auto X = feature_matrix(p.instances);
  const auto Z = fit_scaler(X).transform(X);
  const auto y = label_vector(p.instances);
  const auto h = testing::fast_hyper();
  const auto a = train_base(BaseClassifierKind::random_forest, Z, y, h, 5);
  const auto b = train_base(BaseClassifierKind::random_forest, Z, y, h, 5);
  const auto c = train_base(BaseClassifierKind::random_forest, Z, y, h, 6);
  CHECK(std::get<RandomForest>(a.impl).trees.size() == 15);
  CHECK(predict_proba(a, Z) == predict_proba(b, Z));
  CHECK(predict_proba(a, Z) != predict_proba(c, Z));
}

TEST_CASE("naive Bayes: symmetric classes flip at the midpoint") {
  Eigen::MatrixXd Z(40, 1);
  Eigen::VectorXi y(40);
  const double offsets[] = {-1.5, -0.9, -0.6, -0.3, -0.1, 0.1, 0.3, 0.6, 0.9, 1.5};
  for (int r = 0; r < 20; ++r) {
    Z(r, 0) = -2.0 + offsets[r % 10];
    y(r) = 0;
    Z(20 + r, 0) = 2.0 + offsets[r % 10];
    y(20 + r) = 1;
  }
  const auto model = train_base(BaseClassifierKind::gaussian_naive_bayes, Z, y, Hyperparameters{}, 1);
  auto p_at = [&](double x) { return predict_base(model, (Eigen::RowVectorXd(1) << x).finished()).p_positive; };
  CHECK(p_at(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p_at(-1e-3) < 0.5);
  CHECK(p_at(1e-3) > 0.5);
  CHECK(p_at(12.0) > 1.0 - 1e-6);
  CHECK(p_at(-12.0) < 1e-6);
}

TEST_CASE("single-class training degenerates to a constant predictor") {
  Eigen::MatrixXd Z(6, 2);
  Z.setRandom();
  const Eigen::VectorXi y = Eigen::VectorXi::Zero(6);
  for (auto kind : {BaseClassifierKind::decision_tree, BaseClassifierKind::random_forest,
                    BaseClassifierKind::gaussian_naive_bayes}) {
    const auto model = train_base(kind, Z, y, testing::fast_hyper(), 1);
    CHECK(model.degenerate);
    CHECK((predict_proba(model, Z).array() == 0.0).all());
  }
}

TEST_CASE("roster identifiers") {
  std::set<std::string_view> ids;
  for (auto kind : kDefaultRoster) {
    ids.insert(kind_id(kind));
    CHECK(kind_from_id(kind_id(kind)) == kind);
  }
  CHECK(ids.size() == 8);
  CHECK(kind_label(BaseClassifierKind::knn_1) == "1-NN Classifier");
  CHECK(knn_k(BaseClassifierKind::knn_4) == 4);
  CHECK(!kind_from_id("svm"));
}

TEST_CASE("scaler: population moments and constant columns") {
  Eigen::MatrixXd X(4, 2);
  X << 1, 5, 2, 5, 3, 5, 4, 5;
  const auto s = fit_scaler(X);
  CHECK(s.mean(0) == 2.5);
  CHECK(s.stddev(0) == doctest::Approx(std::sqrt(1.25)));
  CHECK(s.is_constant(1));
  const Eigen::MatrixXd Z = s.transform(X);
  CHECK(Z.col(1).isZero());
  CHECK(Z.col(0).mean() == doctest::Approx(0.0));
}

TEST_CASE("ensemble: a separable single feature is learned perfectly") {
  const auto s = separable();
  const auto model = train_stacked_ensemble(s.X, s.y, 3);
  CHECK(model.bases.size() == 8);
  CHECK(model.meta.weights.size() == 8);
  CHECK(model.metadata.n_train == 70);
  CHECK(model.metadata.n_positive == 30);
  CHECK(model.metadata.n_balanced == 80);
  const Eigen::VectorXd p = ensemble_proba(model, s.X);
  CHECK(cohens_kappa(confusion_matrix(s.y, classes_of(p))) == 1.0);
}

TEST_CASE("ensemble: neutral meta gives probability and certainty 0.5") {
  auto model = testing::small_pipeline().model;
  model.meta.weights.setZero();
  model.meta.bias = 0.0;
  const auto pred = predict_ensemble(model, testing::small_pipeline().instances[0].features);
  CHECK(pred.probability == 0.5);
  CHECK(pred.certainty == 0.5);
  CHECK(pred.endangered);

  LogisticModel<double> positive;
  positive.weights = Eigen::VectorXd::Constant(8, 0.3);
  const auto all_one = to_prediction(positive.predict(Eigen::VectorXd::Ones(8)));
  CHECK(all_one.probability > 0.5);
  CHECK(all_one.endangered);
}

TEST_CASE("ensemble: certainty is the probability of the predicted class") {
  const auto& p = testing::small_pipeline();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> lu(0.0, 1.0 / 83.0);
  std::uniform_int_distribution<int> month(1, 12);
  std::uniform_real_distribution<double> height(100.0, 900.0);
  for (int trial = 0; trial < 300; ++trial) {
    LandUseVector v;
    for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = lu(rng);
    const auto pred = predict_ensemble(p.model, assemble_features(month(rng), height(rng), v));
    CHECK(pred.certainty >= 0.5);
    CHECK(pred.certainty <= 1.0);
    CHECK(pred.certainty == std::max(pred.probability, 1.0 - pred.probability));
    CHECK(pred.endangered == (pred.probability >= 0.5));
  }
  CHECK_THROWS_AS(predict_ensemble(p.model, Eigen::VectorXd::Zero(84)), InputError);
}

TEST_CASE("ensemble: same seed, same model") {
  const auto& p = testing::small_pipeline();
  const auto X = feature_matrix(p.instances);
  const auto y = label_vector(p.instances);
  const auto again = train_stacked_ensemble(X, y, 11, fast_options());
  CHECK(serialize_model(again) == p.model_text);
  CHECK(again.metadata.data_fingerprint == data_fingerprint(X, y));
}

TEST_CASE("ensemble: one-class input is rejected") {
  Eigen::MatrixXd X(5, 1);
  X << 1, 2, 3, 4, 5;
  Eigen::VectorXi y(5);
  y << 0, 0, 0, 0, 1;
  CHECK_THROWS_AS(train_stacked_ensemble(X, y, 1), InputError);
  CHECK_THROWS_AS(train_stacked_ensemble(X, Eigen::VectorXi::Zero(5), 1), InputError);
}

TEST_CASE("ensemble: kNN bases share one neighbour search") {
  const auto& p = testing::small_pipeline();
  const auto X = feature_matrix(p.instances).topRows(50);
  const Eigen::MatrixXd Z = p.model.scaler.transform(X);
  const Eigen::MatrixXd together = base_probabilities(p.model.bases, Z);
  for (std::size_t b = 0; b < p.model.bases.size(); ++b)
    CHECK(together.col(static_cast<Eigen::Index>(b)) == predict_proba(p.model.bases[b], Z));
}

TEST_CASE("stratified folds: sizes and class counts differ by at most one") {
  Eigen::VectorXi y(150);
  for (int r = 0; r < 150; ++r) y(r) = r % 4 == 0 ? 1 : 0;
  for (int folds : {2, 5, 10}) {
    const auto f = stratified_folds(y, folds, 13);
    REQUIRE(f.size() == 150);
    std::vector<int> size(folds), pos(folds);
    for (int r = 0; r < 150; ++r) {
      REQUIRE(f[static_cast<std::size_t>(r)] >= 0);
      REQUIRE(f[static_cast<std::size_t>(r)] < folds);
      ++size[static_cast<std::size_t>(f[static_cast<std::size_t>(r)])];
      pos[static_cast<std::size_t>(f[static_cast<std::size_t>(r)])] += y(r);
    }
    CHECK(*std::max_element(size.begin(), size.end()) - *std::min_element(size.begin(), size.end()) <= 1);
    CHECK(*std::max_element(pos.begin(), pos.end()) - *std::min_element(pos.begin(), pos.end()) <= 1);
  }
  CHECK(stratified_folds(y, 10, 13) == stratified_folds(y, 10, 13));
  CHECK(stratified_folds(y, 10, 13) != stratified_folds(y, 10, 14));
}

TEST_CASE("cross-validation: separable data scores kappa 1 everywhere") {
  const auto s = separable(60, 30);
  const auto report = cross_validate(s.X, s.y, 5, 7, fast_options());
  REQUIRE(report.rows.size() == 9);
  CHECK(report.rows[0].id == "ensemble");
  for (const auto& row : report.rows) {
    CHECK(row.mean_kappa == 1.0);
    CHECK(row.fold_kappa.size() == 5);
  }
}

TEST_CASE("cross-validation: report shape, ranking and determinism") {
  const auto& p = testing::small_pipeline();
  const auto X = feature_matrix(p.instances);
  const auto y = label_vector(p.instances);
  const auto a = cross_validate(X, y, 5, 21, fast_options());
  const auto b = cross_validate(X, y, 5, 21, fast_options());
  CHECK(report_csv(a) == report_csv(b));
  CHECK(report_confusion_csv(a) == report_confusion_csv(b));

  REQUIRE(a.rows.size() == 9);
  REQUIRE(a.ranking.size() == 9);
  for (std::size_t r = 1; r < a.ranking.size(); ++r)
    CHECK(a.rows[a.ranking[r - 1]].mean_kappa >= a.rows[a.ranking[r]].mean_kappa);
  for (const auto& row : a.rows) {
    double mean = 0.0;
    std::int64_t total = 0;
    for (std::size_t f = 0; f < row.fold_kappa.size(); ++f) {
      CHECK(row.fold_kappa[f] == cohens_kappa(row.fold_confusion[f]));
      CHECK(row.fold_kappa[f] >= -1.0);
      CHECK(row.fold_kappa[f] <= 1.0);
      mean += row.fold_kappa[f] / 5.0;
      total += row.fold_confusion[f].sum();
    }
    CHECK(row.mean_kappa == doctest::Approx(mean).epsilon(1e-12));
    CHECK(total == y.size());
  }

  const auto csv = report_csv(a);
  CHECK(csv.rfind("rank,classifier_id,classifier,mean_kappa,fold_1,fold_2,fold_3,fold_4,fold_5\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
  const auto text = report_text(a);
  CHECK(text.rfind("Classifier", 0) == 0);
  CHECK(text.find("Ensemble-based Classification") != std::string::npos);
  const auto confusion = report_confusion_csv(a);
  CHECK(confusion.rfind("classifier_id,fold,tn,fp,fn,tp\n", 0) == 0);
  CHECK(std::count(confusion.begin(), confusion.end(), '\n') == 1 + 9 * 5);
}

TEST_CASE("cross-validation: too few rows per class") {
  const auto s = separable(40, 4);
  CHECK_THROWS_AS(cross_validate(s.X, s.y, 5, 1), InputError);
}

TEST_CASE("cross-validation: validation rows never reach SMOTE or the scaler") {
  struct Guard : FoldObserver {
    std::set<Eigen::Index> validation;
    int folds = 0, scaler_fits = 0, smote_calls = 0, violations = 0;
    std::set<Eigen::Index> seen_validation;
    void on_fold(int, std::span<const Eigen::Index> rows) override {
      ++folds;
      validation = {rows.begin(), rows.end()};
      seen_validation.insert(rows.begin(), rows.end());
    }
    void check(std::span<const Eigen::Index> rows) {
      for (auto r : rows) violations += validation.count(r) ? 1 : 0;
    }
    void on_scaler_fit(std::span<const Eigen::Index> rows) override {
      ++scaler_fits;
      check(rows);
    }
    void on_smote_input(std::span<const Eigen::Index> rows) override {
      ++smote_calls;
      check(rows);
    }
  } guard;
  const auto& p = testing::small_pipeline();
  const auto X = feature_matrix(p.instances);
  const auto y = label_vector(p.instances);
  cross_validate(X, y, 10, 3, fast_options(), &guard);
  CHECK(guard.folds == 10);
  CHECK(guard.scaler_fits == 10);
  CHECK(guard.smote_calls == 10 * (5 + 1));
  CHECK(guard.violations == 0);
  CHECK(guard.seen_validation.size() == static_cast<std::size_t>(y.size()));
}

TEST_CASE("model container: reload predicts bit-identically") {
  const auto& p = testing::small_pipeline();
  const auto reloaded = parse_model_text(p.model_text);
  CHECK(serialize_model(reloaded) == p.model_text);
  CHECK(model_fingerprint(reloaded) == model_fingerprint(p.model_text));
  const auto X = feature_matrix(p.instances);
  CHECK(ensemble_proba(reloaded, X) == ensemble_proba(p.model, X));

  const auto dir = testing::scratch_dir("model-io");
  save_model(p.model, dir / "model.json");
  CHECK(ensemble_proba(load_model(dir / "model.json"), X) == ensemble_proba(p.model, X));
  std::filesystem::remove_all(dir);
}

TEST_CASE("model container: kNN training points are stored once") {
  const auto& p = testing::small_pipeline();
  const auto doc = nlohmann::json::parse(p.model_text);
  CHECK(doc.at("format") == "vinerisk-ensemble");
  CHECK(doc.at("version") == kModelFormatVersion);
  CHECK(doc.at("point_sets").size() == 1);
}

TEST_CASE("model container: malformed input") {
  const auto& p = testing::small_pipeline();
  auto doc = nlohmann::json::parse(p.model_text);
  doc["version"] = kModelFormatVersion + 1;
  CHECK_THROWS_AS(parse_model_text(doc.dump()), InputError);
  doc = nlohmann::json::parse(p.model_text);
  doc["format"] = "other";
  CHECK_THROWS_AS(parse_model_text(doc.dump()), InputError);
  doc = nlohmann::json::parse(p.model_text);
  doc["meta"]["weights"].erase(0);
  CHECK_THROWS_AS(parse_model_text(doc.dump()), InputError);
  CHECK_THROWS_AS(parse_model_text("{"), InputError);
  CHECK_THROWS_AS(parse_model_text("[]"), InputError);
}

} // TEST_SUITE
