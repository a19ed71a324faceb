#pragma once

#include "vinerisk/ensemble.hpp"
#include "vinerisk/metrics.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace vinerisk {

/**
 * Fold id in [0, folds) per row. Each class is shuffled with the seed and
 * dealt round-robin; the deal continues across classes, so fold sizes differ
 * by at most one and class counts per fold by at most one.
 */
std::vector<int> stratified_folds(const Eigen::VectorXi& y, int folds, std::uint64_t seed);

struct ClassifierScore {
  std::string id;
  std::string label;
  double mean_kappa = 0.0;
  std::vector<double> fold_kappa;
  std::vector<ConfusionMatrix> fold_confusion;
};

struct EvaluationReport {
  int folds = 0;
  std::uint64_t seed = 0;
  /// Row 0 is the stacked ensemble, then the roster in order.
  std::vector<ClassifierScore> rows;
  /// Row indices sorted by descending mean kappa; ties keep the lower index.
  std::vector<std::size_t> ranking;
};

/// Observer that is told which rows form each validation fold.
class FoldObserver : public TrainingObserver {
public:
  virtual void on_fold(int fold, std::span<const Eigen::Index> validation_rows) {
    (void)fold;
    (void)validation_rows;
  }
};

/**
 * Stratified k-fold evaluation. Per fold the ensemble (scaler, SMOTE and all
 * fitting) sees only the training rows; the ensemble and each of its refitted
 * bases are scored on the untouched validation rows by Cohen's kappa.
 *
 * Throws InputError if a class has fewer than `folds` rows.
 */
EvaluationReport cross_validate(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                                int folds, std::uint64_t seed,
                                const EnsembleOptions& options = {},
                                FoldObserver* observer = nullptr);

/// rank,classifier_id,classifier,mean_kappa,fold_1..fold_k
std::string report_csv(const EvaluationReport& report);
/// Ranked two-column table: classifier and mean kappa.
std::string report_text(const EvaluationReport& report);
/// classifier_id,fold,tn,fp,fn,tp
std::string report_confusion_csv(const EvaluationReport& report);

} // namespace vinerisk
