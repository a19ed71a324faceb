#include "vinerisk/classifiers.hpp"

#include "vinerisk/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace vinerisk {

std::string_view kind_id(BaseClassifierKind kind) noexcept {
  switch (kind) {
  case BaseClassifierKind::knn_1: return "knn_1";
  case BaseClassifierKind::knn_2: return "knn_2";
  case BaseClassifierKind::knn_3: return "knn_3";
  case BaseClassifierKind::knn_4: return "knn_4";
  case BaseClassifierKind::knn_5: return "knn_5";
  case BaseClassifierKind::decision_tree: return "decision_tree";
  case BaseClassifierKind::random_forest: return "random_forest";
  case BaseClassifierKind::gaussian_naive_bayes: return "gaussian_naive_bayes";
  }
  return "unknown";
}

std::string_view kind_label(BaseClassifierKind kind) noexcept {
  switch (kind) {
  case BaseClassifierKind::knn_1: return "1-NN Classifier";
  case BaseClassifierKind::knn_2: return "2-NN Classifier";
  case BaseClassifierKind::knn_3: return "3-NN Classifier";
  case BaseClassifierKind::knn_4: return "4-NN Classifier";
  case BaseClassifierKind::knn_5: return "5-NN Classifier";
  case BaseClassifierKind::decision_tree: return "Decision Tree";
  case BaseClassifierKind::random_forest: return "Random Forest";
  case BaseClassifierKind::gaussian_naive_bayes: return "Gaussian Naive Bayes";
  }
  return "unknown";
}

std::optional<BaseClassifierKind> kind_from_id(std::string_view id) noexcept {
  for (auto k : kDefaultRoster)
    if (kind_id(k) == id) return k;
  return std::nullopt;
}

int knn_k(BaseClassifierKind kind) noexcept {
  switch (kind) {
  case BaseClassifierKind::knn_1: return 1;
  case BaseClassifierKind::knn_2: return 2;
  case BaseClassifierKind::knn_3: return 3;
  case BaseClassifierKind::knn_4: return 4;
  case BaseClassifierKind::knn_5: return 5;
  default: return 0;
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

std::size_t DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (nodes[i].feature >= 0) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return best;
}

namespace {

/**
 * CART growth over presorted index lists, searching every feature. Each
 * feature keeps the node's rows sorted by that feature's value in a shared
 * segment [begin, end); a split stably partitions every feature's segment so
 * children stay contiguous.
 */
class TreeGrower {
public:
  TreeGrower(const Eigen::MatrixXd& Z, const Eigen::VectorXi& y,
             const std::vector<std::vector<std::int32_t>>& presorted, int max_depth,
             int min_leaf)
      : Z_(Z), y_(y), d_(static_cast<int>(Z.cols())), max_depth_(max_depth),
        min_leaf_(min_leaf), n_(static_cast<std::size_t>(Z.rows())) {
    order_.resize(static_cast<std::size_t>(d_) * n_);
    for (int f = 0; f < d_; ++f)
      std::copy(presorted[static_cast<std::size_t>(f)].begin(),
                presorted[static_cast<std::size_t>(f)].end(),
                order_.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(f) * n_));
    buffer_.resize(n_);
    goes_left_.assign(n_, 0);
  }

  DecisionTree grow() {
    DecisionTree tree;
    if (n_ == 0) {
      tree.nodes.push_back(TreeNode{});
      return tree;
    }
    build(tree, 0, n_, 0);
    return tree;
  }

private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    std::size_t n_left = 0;
    double score = -1.0;
  };

  const std::int32_t* seg(int f) const { return order_.data() + static_cast<std::size_t>(f) * n_; }
  std::int32_t* seg(int f) { return order_.data() + static_cast<std::size_t>(f) * n_; }

  int build(DecisionTree& tree, std::size_t b, std::size_t e, int depth) {
    const std::size_t n = e - b;
    std::size_t pos = 0;
    for (const std::int32_t* p = seg(0) + b; p != seg(0) + e; ++p) pos += static_cast<std::size_t>(y_(*p));
    const int id = static_cast<int>(tree.nodes.size());
    TreeNode node;
    node.samples = static_cast<int>(n);
    node.p_positive = static_cast<double>(pos) / static_cast<double>(n);
    tree.nodes.push_back(node);

    if (depth >= max_depth_ || n < 2 * static_cast<std::size_t>(min_leaf_) || pos == 0 ||
        pos == n)
      return id;

    const Split best = find_split(b, e, pos);
    const double nd = static_cast<double>(n);
    const double parent_score =
        (static_cast<double>(pos) * pos + (nd - pos) * (nd - pos)) / nd;
    if (best.feature < 0 || best.score <= parent_score + 1e-12 * nd) return id;

    partition(b, e, best);
    const int left = build(tree, b, b + best.n_left, depth + 1);
    const int right = build(tree, b + best.n_left, e, depth + 1);
    auto& stored = tree.nodes[static_cast<std::size_t>(id)];
    stored.feature = best.feature;
    stored.threshold = best.threshold;
    stored.left = left;
    stored.right = right;
    return id;
  }

  Split find_split(std::size_t b, std::size_t e, std::size_t pos_total) {
    const std::size_t n = e - b;
    const double total_pos = static_cast<double>(pos_total);
    const auto min_leaf = static_cast<std::size_t>(min_leaf_);
    Split best;
    for (int f = 0; f < d_; ++f) {
      const std::int32_t* s = seg(f) + b;
      const auto col = Z_.col(f);
      std::size_t left_pos = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_pos += static_cast<std::size_t>(y_(s[i]));
        const std::size_t nl = i + 1;
        if (nl < min_leaf) continue;
        if (n - nl < min_leaf) break;
        const double v = col(s[i]);
        const double v_next = col(s[i + 1]);
        if (!(v < v_next)) continue;
        const double l = static_cast<double>(nl);
        const double r = static_cast<double>(n - nl);
        const double lp = static_cast<double>(left_pos);
        const double rp = total_pos - lp;
        const double score = (lp * lp + (l - lp) * (l - lp)) / l +
                             (rp * rp + (r - rp) * (r - rp)) / r;
        if (score > best.score + 1e-12) {
          double mid = v + 0.5 * (v_next - v);
          if (!(mid < v_next)) mid = v;
          best = {f, mid, nl, score};
        }
      }
    }
    return best;
  }

  void partition(std::size_t b, std::size_t e, const Split& split) {
    const std::int32_t* s = seg(split.feature) + b;
    for (std::size_t i = 0; i < split.n_left; ++i) goes_left_[static_cast<std::size_t>(s[i])] = 1;
    for (int f = 0; f < d_; ++f) {
      if (f == split.feature) continue;
      std::int32_t* sf = seg(f);
      std::size_t li = b, ri = 0;
      for (std::size_t i = b; i < e; ++i) {
        const std::int32_t row = sf[i];
        if (goes_left_[static_cast<std::size_t>(row)]) sf[li++] = row;
        else buffer_[ri++] = row;
      }
      std::copy(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(ri), sf + li);
    }
    for (std::size_t i = 0; i < split.n_left; ++i) goes_left_[static_cast<std::size_t>(s[i])] = 0;
  }

  const Eigen::MatrixXd& Z_;
  const Eigen::VectorXi& y_;
  int d_;
  int max_depth_;
  int min_leaf_;
  std::size_t n_;
  std::vector<std::int32_t> order_;
  std::vector<std::int32_t> buffer_;
  std::vector<std::uint8_t> goes_left_;
};

/// Dense value ranks of one feature: rank[row] indexes the sorted distinct values.
struct FeatureRanks {
  std::vector<std::uint32_t> rank;
  std::vector<double> values;
};

/**
 * CART growth for forest trees. Only a few candidate features are examined
 * per node, so instead of keeping every feature presorted, each candidate's
 * class counts are gathered per value rank: by a histogram over all ranks
 * when the feature has few distinct values, otherwise by sorting the node's
 * entries on packed (rank, row) keys.
 */
class RankedTreeGrower {
public:
  RankedTreeGrower(const Eigen::MatrixXd& Z, const Eigen::VectorXi& y,
                   const std::vector<FeatureRanks>& ranks, std::vector<std::int32_t> entries,
                   int max_features, int max_depth, int min_leaf, std::uint64_t seed)
      : Z_(Z), y_(y), ranks_(ranks), entries_(std::move(entries)),
        d_(static_cast<int>(Z.cols())), max_features_(std::clamp(max_features, 1, d_)),
        max_depth_(max_depth), min_leaf_(min_leaf), rng_(seed) {
    keys_.resize(entries_.size());
    std::size_t max_values = 0;
    for (const auto& r : ranks_) max_values = std::max(max_values, r.values.size());
    hist_total_.assign(max_values, 0);
    hist_pos_.assign(max_values, 0);
    features_.resize(static_cast<std::size_t>(d_));
    std::iota(features_.begin(), features_.end(), 0);
  }

  DecisionTree grow() {
    DecisionTree tree;
    if (entries_.empty()) {
      tree.nodes.push_back(TreeNode{});
      return tree;
    }
    build(tree, 0, entries_.size(), 0);
    return tree;
  }

private:
  struct Candidate {
    int feature = -1;
    double score = -1.0;
    double threshold = 0.0;
  };

  // Scans runs of equal rank in ascending order; `runs` visits each run as
  // (rank, count, positives). Returns the number of runs.
  template <typename Runs>
  std::size_t scan(int f, std::size_t n, double total_pos, Runs&& runs, Candidate& best) {
    const auto min_leaf = static_cast<std::size_t>(min_leaf_);
    const double nd = static_cast<double>(n);
    const auto& values = ranks_[static_cast<std::size_t>(f)].values;
    std::size_t nl = 0, left_pos = 0;
    std::uint32_t prev_rank = 0;
    bool have_prev = false;
    std::size_t run_count = 0;
    runs([&](std::uint32_t rank, std::size_t count, std::size_t pos) {
      ++run_count;
      if (have_prev && nl >= min_leaf && n - nl >= min_leaf) {
        const double l = static_cast<double>(nl);
        const double r = nd - l;
        const double lp = static_cast<double>(left_pos);
        const double rp = total_pos - lp;
        const double score = (lp * lp + (l - lp) * (l - lp)) / l +
                             (rp * rp + (r - rp) * (r - rp)) / r;
        if (score > best.score + 1e-12) {
          const double v = values[prev_rank];
          const double v_next = values[rank];
          double mid = v + 0.5 * (v_next - v);
          if (!(mid < v_next)) mid = v;
          best = {f, score, mid};
        }
      }
      nl += count;
      left_pos += pos;
      prev_rank = rank;
      have_prev = true;
    });
    return run_count;
  }

  int build(DecisionTree& tree, std::size_t b, std::size_t e, int depth) {
    const std::size_t n = e - b;
    std::size_t pos = 0;
    for (std::size_t i = b; i < e; ++i) pos += static_cast<std::size_t>(y_(entries_[i]));
    const int id = static_cast<int>(tree.nodes.size());
    TreeNode node;
    node.samples = static_cast<int>(n);
    node.p_positive = static_cast<double>(pos) / static_cast<double>(n);
    tree.nodes.push_back(node);
    if (depth >= max_depth_ || n < 2 * static_cast<std::size_t>(min_leaf_) || pos == 0 ||
        pos == n)
      return id;

    const double total_pos = static_cast<double>(pos);
    const double sort_cost = static_cast<double>(n) * std::log2(static_cast<double>(n) + 1.0);
    Candidate best;
    // Features are drawn without replacement until max_features of them vary
    // within the node; constant ones do not count against the budget.
    int varying = 0;
    for (int ci = 0; ci < d_ && varying < max_features_; ++ci) {
      std::uniform_int_distribution<int> pick(ci, d_ - 1);
      std::swap(features_[static_cast<std::size_t>(ci)],
                features_[static_cast<std::size_t>(pick(rng_))]);
      const int f = features_[static_cast<std::size_t>(ci)];
      const auto& fr = ranks_[static_cast<std::size_t>(f)];
      std::size_t runs = 0;
      if (static_cast<double>(fr.values.size()) < sort_cost) {
        for (std::size_t i = b; i < e; ++i) {
          const auto row = static_cast<std::size_t>(entries_[i]);
          ++hist_total_[fr.rank[row]];
          hist_pos_[fr.rank[row]] += static_cast<std::uint32_t>(y_(static_cast<Eigen::Index>(row)));
        }
        runs = scan(f, n, total_pos, [&](auto&& visit) {
          for (std::uint32_t r = 0; r < fr.values.size(); ++r) {
            if (hist_total_[r] == 0) continue;
            visit(r, hist_total_[r], hist_pos_[r]);
            hist_total_[r] = 0;
            hist_pos_[r] = 0;
          }
        }, best);
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          const auto row = static_cast<std::uint32_t>(entries_[b + i]);
          keys_[i] = (static_cast<std::uint64_t>(fr.rank[row]) << 32) | row;
        }
        std::sort(keys_.begin(), keys_.begin() + static_cast<std::ptrdiff_t>(n));
        runs = scan(f, n, total_pos, [&](auto&& visit) {
          std::size_t i = 0;
          while (i < n) {
            const auto rank = static_cast<std::uint32_t>(keys_[i] >> 32);
            std::size_t count = 0, p = 0;
            for (; i < n && (keys_[i] >> 32) == rank; ++i, ++count)
              p += static_cast<std::size_t>(y_(static_cast<Eigen::Index>(keys_[i] & 0xffffffffu)));
            visit(rank, count, p);
          }
        }, best);
      }
      if (runs > 1) ++varying;
    }
    const double nd = static_cast<double>(n);
    const double parent_score = (total_pos * total_pos + (nd - total_pos) * (nd - total_pos)) / nd;
    if (best.feature < 0 || best.score <= parent_score + 1e-12 * nd) return id;

    const auto col = Z_.col(best.feature);
    const auto mid = std::partition(entries_.begin() + static_cast<std::ptrdiff_t>(b),
                                    entries_.begin() + static_cast<std::ptrdiff_t>(e),
                                    [&](std::int32_t row) { return col(row) <= best.threshold; });
    const auto split_at = static_cast<std::size_t>(mid - entries_.begin());
    const int left = build(tree, b, split_at, depth + 1);
    const int right = build(tree, split_at, e, depth + 1);
    auto& stored = tree.nodes[static_cast<std::size_t>(id)];
    stored.feature = best.feature;
    stored.threshold = best.threshold;
    stored.left = left;
    stored.right = right;
    return id;
  }

  const Eigen::MatrixXd& Z_;
  const Eigen::VectorXi& y_;
  const std::vector<FeatureRanks>& ranks_;
  std::vector<std::int32_t> entries_;
  int d_;
  int max_features_;
  int max_depth_;
  int min_leaf_;
  std::mt19937_64 rng_;
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint32_t> hist_total_;
  std::vector<std::uint32_t> hist_pos_;
  std::vector<int> features_;
};

std::vector<std::vector<std::int32_t>> presort(const Eigen::MatrixXd& Z) {
  std::vector<std::vector<std::int32_t>> out(static_cast<std::size_t>(Z.cols()));
  for (Eigen::Index f = 0; f < Z.cols(); ++f) {
    auto& o = out[static_cast<std::size_t>(f)];
    o.resize(static_cast<std::size_t>(Z.rows()));
    std::iota(o.begin(), o.end(), 0);
    const auto col = Z.col(f);
    std::stable_sort(o.begin(), o.end(),
                     [&](std::int32_t a, std::int32_t b) { return col(a) < col(b); });
  }
  return out;
}

int single_class(const Eigen::VectorXi& y) {
  const Eigen::Index pos = (y.array() == 1).count();
  if (pos == 0) return 0;
  if (pos == y.size()) return 1;
  return -1;
}

GaussianNaiveBayes train_naive_bayes(const Eigen::MatrixXd& Z, const Eigen::VectorXi& y,
                                     double floor) {
  GaussianNaiveBayes nb;
  const Eigen::Index d = Z.cols();
  nb.mean = Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, d);
  nb.variance = Eigen::Matrix<double, 2, Eigen::Dynamic>::Constant(2, d, floor);
  nb.constant_class = single_class(y);
  for (int c = 0; c < 2; ++c) {
    const Eigen::Index count = (y.array() == c).count();
    nb.log_prior(c) = count > 0 ? std::log(static_cast<double>(count) / static_cast<double>(y.size()))
                                : -std::numeric_limits<double>::infinity();
    if (count == 0) continue;
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(d);
    for (Eigen::Index i = 0; i < Z.rows(); ++i)
      if (y(i) == c) sum += Z.row(i);
    const Eigen::RowVectorXd mu = sum / static_cast<double>(count);
    Eigen::RowVectorXd ss = Eigen::RowVectorXd::Zero(d);
    for (Eigen::Index i = 0; i < Z.rows(); ++i)
      if (y(i) == c) ss += (Z.row(i) - mu).array().square().matrix();
    nb.mean.row(c) = mu;
    nb.variance.row(c) = (ss / static_cast<double>(count)).cwiseMax(floor);
  }
  return nb;
}

double naive_bayes_proba(const GaussianNaiveBayes& nb, const Eigen::RowVectorXd& z) {
  if (nb.constant_class >= 0) return static_cast<double>(nb.constant_class);
  Eigen::Vector2d ll;
  for (int c = 0; c < 2; ++c) {
    const auto var = nb.variance.row(c).array();
    ll(c) = nb.log_prior(c) -
            0.5 * ((2.0 * std::numbers::pi * var).log() + (z.array() - nb.mean.row(c).array()).square() / var).sum();
  }
  return 1.0 / (1.0 + std::exp(ll(0) - ll(1)));
}

} // namespace

Eigen::Matrix<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic>
nearest_neighbours(const Eigen::MatrixXd& points, const Eigen::MatrixXd& queries, int k) {
  if (points.cols() != queries.cols())
    throw InputError("nearest_neighbours: dimension mismatch");
  if (k < 1 || k > points.rows())
    throw InputError("nearest_neighbours: k must lie in [1, training size]");
  Eigen::Matrix<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic> out(queries.rows(), k);
  Eigen::VectorXd d2(points.rows());
  std::vector<std::pair<double, Eigen::Index>> best(static_cast<std::size_t>(k));
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    d2.setZero();
    for (Eigen::Index c = 0; c < points.cols(); ++c)
      d2.array() += (points.col(c).array() - queries(q, c)).square();
    // Insertion into a sorted top-k; strict comparison keeps the lower index on ties.
    std::size_t filled = 0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      const double d = d2(i);
      if (filled == best.size() && !(d < best.back().first)) continue;
      std::size_t j = filled < best.size() ? filled++ : best.size() - 1;
      while (j > 0 && d < best[j - 1].first) {
        best[j] = best[j - 1];
        --j;
      }
      best[j] = {d, i};
    }
    for (int j = 0; j < k; ++j) out(q, j) = best[static_cast<std::size_t>(j)].second;
  }
  return out;
}

BaseModel make_knn(int k, std::shared_ptr<const Eigen::MatrixXd> points,
                   std::shared_ptr<const Eigen::VectorXi> labels) {
  BaseModel m;
  m.kind = static_cast<BaseClassifierKind>(k - 1);
  m.dim = points->cols();
  m.degenerate = single_class(*labels) >= 0;
  m.impl = KnnModel{k, std::move(points), std::move(labels)};
  return m;
}

BaseModel train_base(BaseClassifierKind kind, const Eigen::MatrixXd& Z,
                     const Eigen::VectorXi& y, const Hyperparameters& hyper,
                     std::uint64_t seed) {
  if (Z.rows() == 0) throw InputError("train_base: empty training set");
  if (Z.rows() != y.size()) throw InputError("train_base: feature/label size mismatch");
  BaseModel model;
  model.kind = kind;
  model.dim = Z.cols();
  model.degenerate = single_class(y) >= 0;

  if (const int k = knn_k(kind); k > 0) {
    if (Z.rows() < k) throw InputError("train_base: fewer training rows than k");
    model.impl = KnnModel{k, std::make_shared<const Eigen::MatrixXd>(Z),
                          std::make_shared<const Eigen::VectorXi>(y)};
    return model;
  }
  switch (kind) {
  case BaseClassifierKind::decision_tree: {
    model.impl = TreeGrower(Z, y, presort(Z), hyper.tree_max_depth, hyper.tree_min_leaf).grow();
    break;
  }
  case BaseClassifierKind::random_forest: {
    const auto sorted = presort(Z);
    std::vector<FeatureRanks> ranks(sorted.size());
    for (std::size_t f = 0; f < sorted.size(); ++f) {
      const auto col = Z.col(static_cast<Eigen::Index>(f));
      auto& fr = ranks[f];
      fr.rank.resize(static_cast<std::size_t>(Z.rows()));
      for (auto row : sorted[f]) {
        if (fr.values.empty() || fr.values.back() < col(row)) fr.values.push_back(col(row));
        fr.rank[static_cast<std::size_t>(row)] = static_cast<std::uint32_t>(fr.values.size() - 1);
      }
    }
    const int mtry = hyper.forest_max_features > 0
                         ? hyper.forest_max_features
                         : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(Z.cols())))));
    RandomForest forest;
    forest.trees.reserve(static_cast<std::size_t>(hyper.forest_trees));
    for (int t = 0; t < hyper.forest_trees; ++t) {
      std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(t), 1));
      std::uniform_int_distribution<std::int32_t> draw(0, static_cast<std::int32_t>(Z.rows() - 1));
      std::vector<std::int32_t> entries(static_cast<std::size_t>(Z.rows()));
      for (auto& e : entries) e = draw(rng);
      forest.trees.push_back(RankedTreeGrower(Z, y, ranks, std::move(entries), mtry,
                                              hyper.tree_max_depth, hyper.tree_min_leaf, rng())
                                 .grow());
    }
    model.impl = std::move(forest);
    break;
  }
  case BaseClassifierKind::gaussian_naive_bayes:
    model.impl = train_naive_bayes(Z, y, hyper.nb_variance_floor);
    break;
  default:
    throw InputError("train_base: unknown classifier kind");
  }
  return model;
}

BasePrediction predict_base(const BaseModel& model, const Eigen::RowVectorXd& z) {
  if (z.size() != model.dim)
    throw InputError("predict_base: expected " + std::to_string(model.dim) +
                     " features, got " + std::to_string(z.size()));
  const Eigen::MatrixXd Z = z;
  const double p = predict_proba(model, Z)(0);
  return {p >= 0.5, p};
}

Eigen::VectorXd predict_proba(const BaseModel& model, const Eigen::MatrixXd& Z) {
  if (Z.cols() != model.dim)
    throw InputError("predict_proba: expected " + std::to_string(model.dim) +
                     " features, got " + std::to_string(Z.cols()));
  Eigen::VectorXd p(Z.rows());
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, KnnModel>) {
          const auto nn = nearest_neighbours(*m.points, Z, m.k);
          for (Eigen::Index i = 0; i < Z.rows(); ++i) {
            int pos = 0;
            for (int j = 0; j < m.k; ++j) pos += (*m.labels)(nn(i, j));
            p(i) = static_cast<double>(pos) / static_cast<double>(m.k);
          }
        } else if constexpr (std::is_same_v<T, DecisionTree>) {
          for (Eigen::Index i = 0; i < Z.rows(); ++i) p(i) = m.predict(Z.row(i));
        } else if constexpr (std::is_same_v<T, RandomForest>) {
          for (Eigen::Index i = 0; i < Z.rows(); ++i) {
            double s = 0.0;
            for (const auto& t : m.trees) s += t.predict(Z.row(i));
            p(i) = s / static_cast<double>(m.trees.size());
          }
        } else {
          for (Eigen::Index i = 0; i < Z.rows(); ++i) p(i) = naive_bayes_proba(m, Z.row(i));
        }
      },
      model.impl);
  return p;
}

} // namespace vinerisk
