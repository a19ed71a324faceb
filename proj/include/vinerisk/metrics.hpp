#pragma once

#include "vinerisk/error.hpp"

#include <Eigen/Core>

#include <cstdint>

namespace vinerisk {

/// Rows are actual classes, columns predicted classes; index 0 = negative,
/// 1 = positive.
using ConfusionMatrix = Eigen::Matrix<std::int64_t, 2, 2>;

/**
 * Cohen's kappa of a 2x2 confusion matrix:
 *   (p_o - p_e) / (1 - p_e),  p_o = trace / N,  p_e = sum_c row_c * col_c / N^2.
 * When p_e = 1 (every count in one cell) kappa is 1 if p_o = 1, else 0.
 */
template <typename Derived>
double cohens_kappa(const Eigen::MatrixBase<Derived>& cm) {
  static_assert(Derived::RowsAtCompileTime == 2 && Derived::ColsAtCompileTime == 2,
                "cohens_kappa expects a 2x2 matrix");
  const Eigen::Matrix2d m = cm.template cast<double>();
  const double total = m.sum();
  if (!(total > 0.0)) throw InputError("cohens_kappa: empty confusion matrix");
  const Eigen::Vector2d rows = m.rowwise().sum();
  const Eigen::Vector2d cols = m.colwise().sum().transpose();
  const double agree = m.trace();
  const double chance = rows.dot(cols);
  if (chance == total * total) return agree == total ? 1.0 : 0.0;
  return (agree * total - chance) / (total * total - chance);
}

/// Tallies actual vs predicted 0/1 labels.
template <typename DerivedA, typename DerivedP>
ConfusionMatrix confusion_matrix(const Eigen::MatrixBase<DerivedA>& actual,
                                 const Eigen::MatrixBase<DerivedP>& predicted) {
  if (actual.size() != predicted.size())
    throw InputError("confusion_matrix: size mismatch");
  ConfusionMatrix cm = ConfusionMatrix::Zero();
  for (Eigen::Index i = 0; i < actual.size(); ++i)
    cm(actual(i) != 0 ? 1 : 0, predicted(i) != 0 ? 1 : 0) += 1;
  return cm;
}

} // namespace vinerisk
