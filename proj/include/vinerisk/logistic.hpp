#pragma once

#include <Eigen/Core>

#include <cmath>

namespace vinerisk {

template <typename Scalar>
Scalar sigmoid(Scalar z) noexcept {
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-z));
  const Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

/// log(1 + exp(z)) without overflow.
template <typename Scalar>
Scalar softplus(Scalar z) noexcept {
  return std::max(z, Scalar(0)) + std::log1p(std::exp(-std::abs(z)));
}

template <typename Scalar>
struct LogisticModel {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;
  Scalar bias = Scalar(0);

  template <typename Derived>
  Scalar predict(const Eigen::MatrixBase<Derived>& x) const {
    return sigmoid<Scalar>(x.dot(weights) + bias);
  }
};

struct LogisticOptions {
  double learning_rate = 0.1;
  int epochs = 500;
  double l2 = 1e-4;
};

/// Mean log-loss plus (l2 / 2) * |w|^2; the bias is not penalised.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar
logistic_loss(const LogisticModel<typename DerivedX::Scalar>& model,
              const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& y,
              typename DerivedX::Scalar l2) {
  using Scalar = typename DerivedX::Scalar;
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> z =
      (X * model.weights).array() + model.bias;
  Scalar sum(0);
  for (Eigen::Index i = 0; i < z.size(); ++i) sum += softplus(z(i)) - y(i) * z(i);
  return sum / static_cast<Scalar>(X.rows()) +
         Scalar(0.5) * l2 * model.weights.squaredNorm();
}

/// Analytic gradient of logistic_loss: returns (dL/dw, dL/db).
template <typename DerivedX, typename DerivedY>
std::pair<Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, 1>,
          typename DerivedX::Scalar>
logistic_gradient(const LogisticModel<typename DerivedX::Scalar>& model,
                  const Eigen::MatrixBase<DerivedX>& X,
                  const Eigen::MatrixBase<DerivedY>& y, typename DerivedX::Scalar l2) {
  using Scalar = typename DerivedX::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> residual =
      (X * model.weights).array() + model.bias;
  for (Eigen::Index i = 0; i < residual.size(); ++i)
    residual(i) = sigmoid(residual(i)) - y(i);
  const auto n = static_cast<Scalar>(X.rows());
  return {X.transpose() * residual / n + l2 * model.weights, residual.sum() / n};
}

/// Full-batch gradient descent from zero initialisation.
template <typename DerivedX, typename DerivedY>
LogisticModel<typename DerivedX::Scalar>
train_logistic(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& y,
               const LogisticOptions& options = {}) {
  using Scalar = typename DerivedX::Scalar;
  LogisticModel<Scalar> model;
  model.weights = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(X.cols());
  model.bias = Scalar(0);
  const auto lr = static_cast<Scalar>(options.learning_rate);
  const auto l2 = static_cast<Scalar>(options.l2);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    const auto [gw, gb] = logistic_gradient(model, X, y, l2);
    model.weights -= lr * gw;
    model.bias -= lr * gb;
  }
  return model;
}

} // namespace vinerisk
