#include "vinerisk/cross_validation.hpp"

#include "vinerisk/error.hpp"
#include "vinerisk/text_io.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace vinerisk {

std::vector<int> stratified_folds(const Eigen::VectorXi& y, int folds, std::uint64_t seed) {
  if (folds < 2) throw InputError("stratified_folds: need at least two folds");
  std::vector<int> fold_of(static_cast<std::size_t>(y.size()), -1);
  std::mt19937_64 rng(seed);
  int next = 0;
  for (int label : {0, 1}) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < y.size(); ++i)
      if ((y(i) != 0 ? 1 : 0) == label) rows.push_back(i);
    std::shuffle(rows.begin(), rows.end(), rng);
    for (auto r : rows) {
      fold_of[static_cast<std::size_t>(r)] = next;
      next = (next + 1) % folds;
    }
  }
  return fold_of;
}

EvaluationReport cross_validate(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                                int folds, std::uint64_t seed,
                                const EnsembleOptions& options, FoldObserver* observer) {
  if (X.rows() != y.size()) throw InputError("cross_validate: feature/label size mismatch");
  if (folds < 2) throw InputError("cross_validate: need at least two folds");
  const Eigen::Index n_pos = (y.array() == 1).count();
  if (std::min(n_pos, y.size() - n_pos) < folds)
    throw InputError("cross_validate: each class needs at least " + std::to_string(folds) +
                     " instances");

  EvaluationReport report;
  report.folds = folds;
  report.seed = seed;
  report.rows.push_back({"ensemble", "Ensemble-based Classification", 0.0, {}, {}});
  for (auto kind : options.roster)
    report.rows.push_back({std::string(kind_id(kind)), std::string(kind_label(kind)), 0.0, {}, {}});

  const auto fold_of = stratified_folds(y, folds, derive_seed(seed, 0xcf));
  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> train, validation;
    for (Eigen::Index i = 0; i < y.size(); ++i)
      (fold_of[static_cast<std::size_t>(i)] == f ? validation : train).push_back(i);
    if (observer) observer->on_fold(f, validation);

    Eigen::MatrixXd Xt(static_cast<Eigen::Index>(train.size()), X.cols());
    Eigen::VectorXi yt(static_cast<Eigen::Index>(train.size()));
    for (std::size_t i = 0; i < train.size(); ++i) {
      Xt.row(static_cast<Eigen::Index>(i)) = X.row(train[i]);
      yt(static_cast<Eigen::Index>(i)) = y(train[i]);
    }
    Eigen::MatrixXd Xv(static_cast<Eigen::Index>(validation.size()), X.cols());
    Eigen::VectorXi yv(static_cast<Eigen::Index>(validation.size()));
    for (std::size_t i = 0; i < validation.size(); ++i) {
      Xv.row(static_cast<Eigen::Index>(i)) = X.row(validation[i]);
      yv(static_cast<Eigen::Index>(i)) = y(validation[i]);
    }

    const auto model = train_stacked_ensemble(
        Xt, yt, derive_seed(seed, 0xf0, static_cast<std::uint64_t>(f)), options, observer, train);
    const Eigen::MatrixXd P = base_probabilities(model.bases, model.scaler.transform(Xv));

    auto score = [&](ClassifierScore& row, const Eigen::VectorXd& p) {
      const Eigen::VectorXi predicted = (p.array() >= 0.5).cast<int>();
      const auto cm = confusion_matrix(yv, predicted);
      row.fold_confusion.push_back(cm);
      row.fold_kappa.push_back(cohens_kappa(cm));
    };
    Eigen::VectorXd p_ensemble(Xv.rows());
    for (Eigen::Index i = 0; i < Xv.rows(); ++i)
      p_ensemble(i) = model.meta.predict(P.row(i).transpose());
    score(report.rows[0], p_ensemble);
    for (Eigen::Index b = 0; b < P.cols(); ++b)
      score(report.rows[static_cast<std::size_t>(b) + 1], P.col(b));
  }

  for (auto& row : report.rows)
    row.mean_kappa = std::accumulate(row.fold_kappa.begin(), row.fold_kappa.end(), 0.0) /
                     static_cast<double>(row.fold_kappa.size());
  report.ranking.resize(report.rows.size());
  std::iota(report.ranking.begin(), report.ranking.end(), std::size_t{0});
  std::stable_sort(report.ranking.begin(), report.ranking.end(), [&](auto a, auto b) {
    return report.rows[a].mean_kappa > report.rows[b].mean_kappa;
  });
  return report;
}

std::string report_csv(const EvaluationReport& report) {
  std::string out = "rank,classifier_id,classifier,mean_kappa";
  for (int f = 1; f <= report.folds; ++f) out += ",fold_" + std::to_string(f);
  out += '\n';
  for (std::size_t r = 0; r < report.ranking.size(); ++r) {
    const auto& row = report.rows[report.ranking[r]];
    out += std::to_string(r + 1) + ',' + row.id + ',' + row.label + ',' +
           format_fixed(row.mean_kappa, 6);
    for (double k : row.fold_kappa) out += ',' + format_fixed(k, 6);
    out += '\n';
  }
  return out;
}

std::string report_text(const EvaluationReport& report) {
  std::size_t width = std::string_view("Classifier").size();
  for (const auto& row : report.rows) width = std::max(width, row.label.size());
  auto pad = [&](const std::string& s) { return s + std::string(width - s.size() + 2, ' '); };
  std::string out = pad("Classifier") + "Cohen's kappa\n";
  for (auto r : report.ranking)
    out += pad(report.rows[r].label) + format_fixed(report.rows[r].mean_kappa, 3) + '\n';
  return out;
}

std::string report_confusion_csv(const EvaluationReport& report) {
  std::string out = "classifier_id,fold,tn,fp,fn,tp\n";
  for (const auto& row : report.rows)
    for (std::size_t f = 0; f < row.fold_confusion.size(); ++f) {
      const auto& cm = row.fold_confusion[f];
      out += row.id + ',' + std::to_string(f + 1) + ',' + std::to_string(cm(0, 0)) + ',' +
             std::to_string(cm(0, 1)) + ',' + std::to_string(cm(1, 0)) + ',' +
             std::to_string(cm(1, 1)) + '\n';
    }
  return out;
}

} // namespace vinerisk
