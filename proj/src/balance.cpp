#include "vinerisk/balance.hpp"

#include "vinerisk/error.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace vinerisk {

namespace {

// k nearest rows of Z to row i (excluding i), ties to the lower index.
std::vector<Eigen::Index> nearest_rows(const Eigen::MatrixXd& Z, Eigen::Index i, int k) {
  const Eigen::VectorXd d2 = (Z.rowwise() - Z.row(i)).rowwise().squaredNorm();
  std::vector<Eigen::Index> idx;
  idx.reserve(static_cast<std::size_t>(Z.rows() - 1));
  for (Eigen::Index j = 0; j < Z.rows(); ++j)
    if (j != i) idx.push_back(j);
  auto closer = [&](Eigen::Index a, Eigen::Index b) {
    return d2(a) < d2(b) || (d2(a) == d2(b) && a < b);
  };
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), closer);
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

} // namespace

Oversampled smote(const Eigen::MatrixXd& X, const Eigen::VectorXi& y, int k,
                  std::uint64_t seed) {
  if (X.rows() != y.size()) throw InputError("smote: feature/label size mismatch");
  if (k < 1) throw InputError("smote: k must be >= 1");
  const Eigen::Index n_pos = (y.array() == 1).count();
  const Eigen::Index n_neg = y.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw InputError("smote: both classes must be present");

  Oversampled out;
  out.X = X;
  out.y = y;
  out.synthetic.assign(static_cast<std::size_t>(X.rows()), false);
  out.parents.resize(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index r = 0; r < X.rows(); ++r) out.parents[static_cast<std::size_t>(r)] = {r, r};
  if (n_pos == n_neg) return out;

  const int minority_label = n_pos < n_neg ? 1 : 0;
  const Eigen::Index m = std::min(n_pos, n_neg);
  const Eigen::Index needed = std::max(n_pos, n_neg) - m;
  if (m < 2) throw InputError("smote: minority class needs at least two instances");

  std::vector<Eigen::Index> rows;
  rows.reserve(static_cast<std::size_t>(m));
  for (Eigen::Index r = 0; r < y.size(); ++r)
    if (y(r) == minority_label) rows.push_back(r);

  Eigen::MatrixXd Z(m, X.cols());
  for (Eigen::Index i = 0; i < m; ++i) Z.row(i) = X.row(rows[static_cast<std::size_t>(i)]);
  const Eigen::RowVectorXd mean = Z.colwise().mean();
  Z.rowwise() -= mean;
  const Eigen::RowVectorXd sd =
      (Z.colwise().squaredNorm() / static_cast<double>(m)).cwiseSqrt();
  for (Eigen::Index c = 0; c < Z.cols(); ++c) {
    if (sd(c) > 0.0) Z.col(c) /= sd(c);
    else Z.col(c).setZero();
  }

  const int k_eff = static_cast<int>(std::min<Eigen::Index>(k, m - 1));
  std::vector<std::vector<Eigen::Index>> neighbours(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i)
    neighbours[static_cast<std::size_t>(i)] = nearest_rows(Z, i, k_eff);

  std::mt19937_64 rng(seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_int_distribution<int> pick(0, k_eff - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const Eigen::Index n0 = X.rows();
  out.X.conservativeResize(n0 + needed, Eigen::NoChange);
  out.y.conservativeResize(n0 + needed);
  for (Eigen::Index t = 0; t < needed; ++t) {
    const Eigen::Index i = order[static_cast<std::size_t>(t % m)];
    const Eigen::Index j = neighbours[static_cast<std::size_t>(i)][static_cast<std::size_t>(pick(rng))];
    const double u = unit(rng);
    const Eigen::Index a = rows[static_cast<std::size_t>(i)];
    const Eigen::Index b = rows[static_cast<std::size_t>(j)];
    out.X.row(n0 + t) = X.row(a) + u * (X.row(b) - X.row(a));
    out.y(n0 + t) = minority_label;
    out.synthetic.push_back(true);
    out.parents.push_back({a, b});
  }
  return out;
}

BalancedSet smote(std::span<const LabeledInstance> instances, int k, std::uint64_t seed) {
  const auto sampled = smote(feature_matrix(instances), label_vector(instances), k, seed);
  BalancedSet out;
  out.instances.assign(instances.begin(), instances.end());
  out.synthetic_flags.assign(instances.size(), false);
  for (Eigen::Index r = static_cast<Eigen::Index>(instances.size()); r < sampled.X.rows(); ++r) {
    LabeledInstance inst = instances[static_cast<std::size_t>(sampled.parents[static_cast<std::size_t>(r)][0])];
    inst.features = sampled.X.row(r).transpose();
    inst.positive = sampled.y(r) == 1;
    out.instances.push_back(std::move(inst));
    out.synthetic_flags.push_back(true);
  }
  return out;
}

} // namespace vinerisk
