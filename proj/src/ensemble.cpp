#include "vinerisk/ensemble.hpp"

#include "vinerisk/balance.hpp"
#include "vinerisk/cross_validation.hpp"
#include "vinerisk/error.hpp"
#include "vinerisk/text_io.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace vinerisk {

namespace {

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, std::span<const Eigen::Index> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
  return out;
}

Eigen::VectorXi take_rows(const Eigen::VectorXi& y, std::span<const Eigen::Index> rows) {
  Eigen::VectorXi out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = y(rows[i]);
  return out;
}

struct FittedBases {
  std::vector<BaseModel> models;
  Eigen::Index n_balanced = 0;
};

// SMOTE-balances raw rows (when the minority allows it), standardises them
// with the shared scaler and fits every roster entry.
FittedBases fit_bases(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                      const Scaler& scaler, const EnsembleOptions& options,
                      std::uint64_t seed, TrainingObserver* observer,
                      std::span<const Eigen::Index> caller_rows) {
  const Eigen::Index n_pos = (y.array() == 1).count();
  const Eigen::Index minority = std::min(n_pos, y.size() - n_pos);

  Eigen::MatrixXd Z;
  Eigen::VectorXi labels;
  if (minority >= 2) {
    if (observer) observer->on_smote_input(caller_rows);
    auto balanced = smote(X, y, options.hyper.smote_k, derive_seed(seed, 0));
    Z = scaler.transform(balanced.X);
    labels = std::move(balanced.y);
  } else {
    Z = scaler.transform(X);
    labels = y;
  }

  FittedBases out;
  out.n_balanced = Z.rows();
  auto points = std::make_shared<const Eigen::MatrixXd>(std::move(Z));
  auto shared_labels = std::make_shared<const Eigen::VectorXi>(std::move(labels));
  for (std::size_t b = 0; b < options.roster.size(); ++b) {
    const auto kind = options.roster[b];
    if (const int k = knn_k(kind); k > 0) {
      if (points->rows() < k) throw InputError("ensemble: fewer training rows than k");
      out.models.push_back(make_knn(k, points, shared_labels));
    } else {
      out.models.push_back(train_base(kind, *points, *shared_labels, options.hyper,
                                      derive_seed(seed, static_cast<std::uint64_t>(kind) + 1)));
    }
  }
  return out;
}

void validate_roster(const std::vector<BaseClassifierKind>& roster) {
  if (roster.empty()) throw InputError("ensemble roster is empty");
  std::set<BaseClassifierKind> seen(roster.begin(), roster.end());
  if (seen.size() != roster.size())
    throw InputError("ensemble roster lists a classifier kind twice");
}

} // namespace

std::string data_fingerprint(const Eigen::MatrixXd& X, const Eigen::VectorXi& y) {
  std::uint64_t h = fnv1a64(std::string_view(reinterpret_cast<const char*>(X.data()),
                                             static_cast<std::size_t>(X.size()) * sizeof(double)));
  h = fnv1a64(std::string_view(reinterpret_cast<const char*>(y.data()),
                               static_cast<std::size_t>(y.size()) * sizeof(int)),
              h);
  return hex64(h);
}

EnsembleModel train_stacked_ensemble(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                                     std::uint64_t seed, const EnsembleOptions& options,
                                     TrainingObserver* observer,
                                     std::span<const Eigen::Index> origin) {
  if (X.rows() != y.size()) throw InputError("ensemble: feature/label size mismatch");
  if (!origin.empty() && static_cast<Eigen::Index>(origin.size()) != X.rows())
    throw InputError("ensemble: origin map does not match the row count");
  validate_roster(options.roster);
  const Eigen::Index n = X.rows();
  const Eigen::Index n_pos = (y.array() == 1).count();
  if (std::min(n_pos, n - n_pos) < 2)
    throw InputError("ensemble: each class needs at least two instances");

  auto caller = [&](std::span<const Eigen::Index> rows) {
    std::vector<Eigen::Index> out(rows.begin(), rows.end());
    if (!origin.empty())
      for (auto& r : out) r = origin[static_cast<std::size_t>(r)];
    return out;
  };
  std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Eigen::Index{0});

  EnsembleModel model;
  if (observer) observer->on_scaler_fit(caller(all));
  model.scaler = fit_scaler(X);

  const int inner = static_cast<int>(
      std::min<Eigen::Index>(options.hyper.stacking_folds, std::min(n_pos, n - n_pos)));
  if (inner < 2) throw InputError("ensemble: stacking needs at least two internal folds");
  const auto fold_of = stratified_folds(y, inner, derive_seed(seed, 1));

  Eigen::MatrixXd oof(n, static_cast<Eigen::Index>(options.roster.size()));
  for (int f = 0; f < inner; ++f) {
    std::vector<Eigen::Index> train, held_out;
    for (Eigen::Index i = 0; i < n; ++i)
      (fold_of[static_cast<std::size_t>(i)] == f ? held_out : train).push_back(i);
    const auto bases = fit_bases(take_rows(X, train), take_rows(y, train), model.scaler,
                                 options, derive_seed(seed, 2, static_cast<std::uint64_t>(f)),
                                 observer, caller(train));
    const Eigen::MatrixXd p =
        base_probabilities(bases.models, model.scaler.transform(take_rows(X, held_out)));
    for (std::size_t i = 0; i < held_out.size(); ++i)
      oof.row(held_out[i]) = p.row(static_cast<Eigen::Index>(i));
  }

  model.meta = train_logistic(oof, y.cast<double>(),
                              LogisticOptions{options.hyper.meta_learning_rate,
                                              options.hyper.meta_epochs, options.hyper.meta_l2});

  auto final_bases =
      fit_bases(X, y, model.scaler, options, derive_seed(seed, 3), observer, caller(all));
  model.bases = std::move(final_bases.models);

  auto& md = model.metadata;
  md.seed = seed;
  md.stacking_folds = inner;
  md.data_fingerprint = data_fingerprint(X, y);
  md.n_train = n;
  md.n_positive = n_pos;
  md.n_balanced = final_bases.n_balanced;
  for (const auto& b : model.bases)
    if (b.degenerate) md.degenerate.push_back(b.kind);
  return model;
}

Eigen::MatrixXd base_probabilities(std::span<const BaseModel> bases, const Eigen::MatrixXd& Z) {
  Eigen::MatrixXd P(Z.rows(), static_cast<Eigen::Index>(bases.size()));
  // kNN bases over one training matrix: a single neighbour search at max k.
  std::map<const Eigen::MatrixXd*, std::vector<std::size_t>> knn_groups;
  for (std::size_t b = 0; b < bases.size(); ++b) {
    if (const auto* knn = std::get_if<KnnModel>(&bases[b].impl))
      knn_groups[knn->points.get()].push_back(b);
    else
      P.col(static_cast<Eigen::Index>(b)) = predict_proba(bases[b], Z);
  }
  for (const auto& [points, members] : knn_groups) {
    if (Z.cols() != points->cols())
      throw InputError("base_probabilities: expected " + std::to_string(points->cols()) +
                       " features, got " + std::to_string(Z.cols()));
    int k_max = 0;
    for (auto b : members) k_max = std::max(k_max, std::get<KnnModel>(bases[b].impl).k);
    const auto nn = nearest_neighbours(*points, Z, k_max);
    for (auto b : members) {
      const auto& m = std::get<KnnModel>(bases[b].impl);
      for (Eigen::Index i = 0; i < Z.rows(); ++i) {
        int pos = 0;
        for (int j = 0; j < m.k; ++j) pos += (*m.labels)(nn(i, j));
        P(i, static_cast<Eigen::Index>(b)) = static_cast<double>(pos) / m.k;
      }
    }
  }
  return P;
}

Eigen::VectorXd ensemble_proba(const EnsembleModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.input_dim())
    throw InputError("ensemble: expected " + std::to_string(model.input_dim()) +
                     " features, got " + std::to_string(X.cols()));
  const Eigen::MatrixXd P = base_probabilities(model.bases, model.scaler.transform(X));
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = model.meta.predict(P.row(i).transpose());
  return out;
}

Prediction to_prediction(double probability) noexcept {
  Prediction p;
  p.probability = probability;
  p.endangered = probability >= 0.5;
  p.certainty = std::max(probability, 1.0 - probability);
  return p;
}

Prediction predict_ensemble(const EnsembleModel& model, const Eigen::VectorXd& features) {
  if (features.size() != model.input_dim())
    throw InputError("predict_ensemble: expected " + std::to_string(model.input_dim()) +
                     " features, got " + std::to_string(features.size()));
  return to_prediction(ensemble_proba(model, features.transpose())(0));
}

} // namespace vinerisk
