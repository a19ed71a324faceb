#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vinerisk {

// ---------------------------------------------------------------------------
// Feature standardisation

/// Per-feature z-scoring. Constant features carry inv_stddev = 0 and map to 0.
template <typename Scalar>
struct StandardScaler {
  using Row = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
  Row mean;
  Row stddev;
  Row inv_stddev;

  Eigen::Index dim() const noexcept { return mean.size(); }
  bool is_constant(Eigen::Index c) const noexcept { return inv_stddev(c) == Scalar(0); }

  /// Rows of X standardised; works on any Eigen expression.
  template <typename Derived>
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>
  transform(const Eigen::MatrixBase<Derived>& X) const {
    return ((X.rowwise() - mean).array().rowwise() * inv_stddev.array()).matrix();
  }
};

using Scaler = StandardScaler<double>;

/// Population mean and standard deviation of each column.
template <typename Derived>
StandardScaler<typename Derived::Scalar> fit_scaler(const Eigen::MatrixBase<Derived>& X) {
  using Scalar = typename Derived::Scalar;
  StandardScaler<Scalar> s;
  const auto n = static_cast<Scalar>(X.rows());
  s.mean = X.colwise().mean();
  s.stddev = ((X.rowwise() - s.mean).colwise().squaredNorm() / n).cwiseSqrt();
  s.inv_stddev.resize(s.stddev.size());
  for (Eigen::Index c = 0; c < s.stddev.size(); ++c)
    s.inv_stddev(c) = s.stddev(c) > Scalar(0) ? Scalar(1) / s.stddev(c) : Scalar(0);
  return s;
}

// ---------------------------------------------------------------------------
// Base classifier roster

enum class BaseClassifierKind {
  knn_1,
  knn_2,
  knn_3,
  knn_4,
  knn_5,
  decision_tree,
  random_forest,
  gaussian_naive_bayes,
};

inline constexpr std::array<BaseClassifierKind, 8> kDefaultRoster = {
    BaseClassifierKind::knn_1,         BaseClassifierKind::knn_2,
    BaseClassifierKind::knn_3,         BaseClassifierKind::knn_4,
    BaseClassifierKind::knn_5,         BaseClassifierKind::decision_tree,
    BaseClassifierKind::random_forest, BaseClassifierKind::gaussian_naive_bayes,
};

/// Stable identifier, e.g. "knn_3".
std::string_view kind_id(BaseClassifierKind kind) noexcept;
/// Report label, e.g. "3-NN Classifier".
std::string_view kind_label(BaseClassifierKind kind) noexcept;
std::optional<BaseClassifierKind> kind_from_id(std::string_view id) noexcept;
/// k for the kNN kinds, 0 otherwise.
int knn_k(BaseClassifierKind kind) noexcept;

struct Hyperparameters {
  int tree_max_depth = 20;
  int tree_min_leaf = 2;
  int forest_trees = 100;
  int forest_max_features = 0; // 0: floor(sqrt(d))
  double nb_variance_floor = 1e-9;
  int stacking_folds = 5;
  int smote_k = 5;
  double meta_learning_rate = 0.1;
  int meta_epochs = 500;
  double meta_l2 = 1e-4;
};

struct KnnModel {
  int k = 1;
  std::shared_ptr<const Eigen::MatrixXd> points; // standardised training rows
  std::shared_ptr<const Eigen::VectorXi> labels;
};

struct TreeNode {
  int feature = -1; // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double p_positive = 0.0;
  int samples = 0;
};

/// CART tree; rows with x[feature] <= threshold go left.
struct DecisionTree {
  std::vector<TreeNode> nodes;

  template <typename Derived>
  double predict(const Eigen::MatrixBase<Derived>& x) const {
    int i = 0;
    while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
      const auto& n = nodes[static_cast<std::size_t>(i)];
      i = x(n.feature) <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].p_positive;
  }
  std::size_t depth() const;
};

struct RandomForest {
  std::vector<DecisionTree> trees;
};

struct GaussianNaiveBayes {
  Eigen::Vector2d log_prior = Eigen::Vector2d::Zero();
  Eigen::Matrix<double, 2, Eigen::Dynamic> mean;
  Eigen::Matrix<double, 2, Eigen::Dynamic> variance;
  int constant_class = -1; // >= 0 when trained on a single class
};

struct BaseModel {
  BaseClassifierKind kind = BaseClassifierKind::knn_1;
  Eigen::Index dim = 0;
  std::variant<KnnModel, DecisionTree, RandomForest, GaussianNaiveBayes> impl;
  /// Trained on a single class; predicts that class with probability 1.
  bool degenerate = false;
};

struct BasePrediction {
  bool positive = false;
  double p_positive = 0.0;
};

/// Mixes a seed with stream identifiers (splitmix64).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept;

/**
 * Fits one base classifier on standardised rows Z with 0/1 labels y.
 *
 * kNN keeps the rows; the decision tree is CART with Gini impurity searching
 * every feature; the random forest grows bootstrap trees considering
 * floor(sqrt(d)) random features per split; naive Bayes fits per-class
 * Gaussian moments with a variance floor. Deterministic for a fixed seed.
 */
BaseModel train_base(BaseClassifierKind kind, const Eigen::MatrixXd& Z,
                     const Eigen::VectorXi& y, const Hyperparameters& hyper,
                     std::uint64_t seed);

/// kNN variant that shares an existing training matrix.
BaseModel make_knn(int k, std::shared_ptr<const Eigen::MatrixXd> points,
                   std::shared_ptr<const Eigen::VectorXi> labels);

/// Single standardised row. Throws InputError on a dimension mismatch.
BasePrediction predict_base(const BaseModel& model, const Eigen::RowVectorXd& z);

/// P(positive) for every row of Z.
Eigen::VectorXd predict_proba(const BaseModel& model, const Eigen::MatrixXd& Z);

/// Indices of the k nearest training rows per query, nearest first, ties to
/// the lower training index. Shape: queries x k.
Eigen::Matrix<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic>
nearest_neighbours(const Eigen::MatrixXd& points, const Eigen::MatrixXd& queries, int k);

} // namespace vinerisk
