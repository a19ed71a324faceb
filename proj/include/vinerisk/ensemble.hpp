#pragma once

#include "vinerisk/classifiers.hpp"
#include "vinerisk/logistic.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vinerisk {

struct EnsembleOptions {
  std::vector<BaseClassifierKind> roster{kDefaultRoster.begin(), kDefaultRoster.end()};
  Hyperparameters hyper{};
};

struct TrainingMetadata {
  std::uint64_t seed = 0;
  int stacking_folds = 0;
  std::string data_fingerprint;
  std::int64_t n_train = 0;
  std::int64_t n_positive = 0;
  std::int64_t n_balanced = 0;
  /// Kinds whose final model saw a single class.
  std::vector<BaseClassifierKind> degenerate;
};

/**
 * Stacked ensemble: feature scaler, one base model per roster entry, and a
 * logistic meta-learner over the bases' P(positive), in roster order.
 */
struct EnsembleModel {
  Scaler scaler;
  std::vector<BaseModel> bases;
  LogisticModel<double> meta;
  TrainingMetadata metadata;

  Eigen::Index input_dim() const noexcept { return scaler.dim(); }
};

struct Prediction {
  bool endangered = false;
  double probability = 0.0; // P(positive)
  double certainty = 0.5;   // probability of the predicted class
};

/// Receives the original row indices that feed each fitting step.
class TrainingObserver {
public:
  virtual ~TrainingObserver() = default;
  virtual void on_scaler_fit(std::span<const Eigen::Index> rows) { (void)rows; }
  virtual void on_smote_input(std::span<const Eigen::Index> rows) { (void)rows; }
};

/**
 * Trains the stacked ensemble on raw feature rows X and 0/1 labels y.
 *
 * 1. The scaler is fitted on every row of X.
 * 2. An internal stratified split produces out-of-fold base probabilities;
 *    each internal training part is SMOTE-balanced in raw feature space and
 *    then standardised.
 * 3. The meta-learner is fitted on the out-of-fold probabilities.
 * 4. The bases are refitted on the SMOTE-balanced full set.
 *
 * `origin` maps rows of X to caller indices for the observer (identity if
 * empty). Throws InputError unless both classes have at least two rows.
 */
EnsembleModel train_stacked_ensemble(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                                     std::uint64_t seed, const EnsembleOptions& options = {},
                                     TrainingObserver* observer = nullptr,
                                     std::span<const Eigen::Index> origin = {});

/// P(positive) of every base for every standardised row; columns follow the
/// base order. kNN bases sharing a training matrix share one neighbour search.
Eigen::MatrixXd base_probabilities(std::span<const BaseModel> bases, const Eigen::MatrixXd& Z);

/// Ensemble P(positive) for raw rows of X.
Eigen::VectorXd ensemble_proba(const EnsembleModel& model, const Eigen::MatrixXd& X);

Prediction to_prediction(double probability) noexcept;

/// Single raw feature vector. Throws InputError on a dimension mismatch.
Prediction predict_ensemble(const EnsembleModel& model, const Eigen::VectorXd& features);

/// FNV-1a digest over the bytes of X and y.
std::string data_fingerprint(const Eigen::MatrixXd& X, const Eigen::VectorXi& y);

} // namespace vinerisk
