#include "vinerisk/model_io.hpp"

#include "vinerisk/error.hpp"
#include "vinerisk/text_io.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <map>

namespace vinerisk {

using nlohmann::json;

namespace {

constexpr std::string_view kFormatName = "vinerisk-ensemble";

template <typename Derived>
json to_array(const Eigen::DenseBase<Derived>& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

// JSON has no infinities; -inf (a class absent from training) becomes null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double double_or_neg_inf(const json& j) {
  return j.is_null() ? -std::numeric_limits<double>::infinity() : j.get<double>();
}

Eigen::RowVectorXd row_from(const json& a, Eigen::Index expected, const char* what) {
  if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != expected)
    throw InputError(std::string("model: '") + what + "' has the wrong length");
  Eigen::RowVectorXd v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) v(i) = a[static_cast<std::size_t>(i)].get<double>();
  return v;
}

json tree_to_json(const DecisionTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes)
    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.p_positive, n.samples});
  return nodes;
}

DecisionTree tree_from_json(const json& nodes, Eigen::Index dim) {
  DecisionTree tree;
  const auto count = static_cast<int>(nodes.size());
  for (const auto& n : nodes) {
    TreeNode t;
    t.feature = n.at(0).get<int>();
    t.threshold = n.at(1).get<double>();
    t.left = n.at(2).get<int>();
    t.right = n.at(3).get<int>();
    t.p_positive = n.at(4).get<double>();
    t.samples = n.at(5).get<int>();
    if (t.feature >= dim || (t.feature >= 0 && (t.left <= 0 || t.left >= count ||
                                                t.right <= 0 || t.right >= count)))
      throw InputError("model: corrupt tree node");
    tree.nodes.push_back(t);
  }
  if (tree.nodes.empty()) throw InputError("model: empty tree");
  return tree;
}

} // namespace

std::string serialize_model(const EnsembleModel& model) {
  json root;
  root["format"] = kFormatName;
  root["version"] = kModelFormatVersion;

  const auto& md = model.metadata;
  json degenerate = json::array();
  for (auto k : md.degenerate) degenerate.push_back(kind_id(k));
  root["metadata"] = {{"seed", md.seed},
                      {"stacking_folds", md.stacking_folds},
                      {"data_fingerprint", md.data_fingerprint},
                      {"n_train", md.n_train},
                      {"n_positive", md.n_positive},
                      {"n_balanced", md.n_balanced},
                      {"degenerate", degenerate}};
  root["scaler"] = {{"mean", to_array(model.scaler.mean)},
                    {"stddev", to_array(model.scaler.stddev)}};

  std::map<const Eigen::MatrixXd*, std::size_t> set_index;
  json point_sets = json::array();
  json bases = json::array();
  for (const auto& b : model.bases) {
    json jb = {{"kind", kind_id(b.kind)}, {"dim", b.dim}, {"degenerate", b.degenerate}};
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, KnnModel>) {
            auto [it, inserted] = set_index.try_emplace(m.points.get(), point_sets.size());
            if (inserted) {
              point_sets.push_back({{"rows", m.points->rows()},
                                    {"cols", m.points->cols()},
                                    {"data", to_array(m.points->reshaped())},
                                    {"labels", to_array(*m.labels)}});
            }
            jb["k"] = m.k;
            jb["point_set"] = it->second;
          } else if constexpr (std::is_same_v<T, DecisionTree>) {
            jb["nodes"] = tree_to_json(m);
          } else if constexpr (std::is_same_v<T, RandomForest>) {
            json trees = json::array();
            for (const auto& t : m.trees) trees.push_back(tree_to_json(t));
            jb["trees"] = std::move(trees);
          } else {
            jb["log_prior"] = {finite_or_null(m.log_prior(0)), finite_or_null(m.log_prior(1))};
            jb["mean"] = {to_array(m.mean.row(0)), to_array(m.mean.row(1))};
            jb["variance"] = {to_array(m.variance.row(0)), to_array(m.variance.row(1))};
            jb["constant_class"] = m.constant_class;
          }
        },
        b.impl);
    bases.push_back(std::move(jb));
  }
  root["point_sets"] = std::move(point_sets);
  root["bases"] = std::move(bases);
  root["meta"] = {{"weights", to_array(model.meta.weights)}, {"bias", model.meta.bias}};
  return root.dump() + "\n";
}

EnsembleModel parse_model_text(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("model: not valid JSON: ") + e.what());
  }
  try {
    if (root.value("format", "") != kFormatName) throw InputError("model: unknown container format");
    if (root.at("version").get<int>() != kModelFormatVersion)
      throw InputError("model: unsupported format version " + root.at("version").dump());

    EnsembleModel model;
    const auto& jm = root.at("metadata");
    auto& md = model.metadata;
    md.seed = jm.at("seed").get<std::uint64_t>();
    md.stacking_folds = jm.at("stacking_folds").get<int>();
    md.data_fingerprint = jm.at("data_fingerprint").get<std::string>();
    md.n_train = jm.at("n_train").get<std::int64_t>();
    md.n_positive = jm.at("n_positive").get<std::int64_t>();
    md.n_balanced = jm.at("n_balanced").get<std::int64_t>();
    for (const auto& k : jm.at("degenerate")) {
      auto kind = kind_from_id(k.get<std::string>());
      if (!kind) throw InputError("model: unknown classifier kind " + k.dump());
      md.degenerate.push_back(*kind);
    }

    const auto& js = root.at("scaler");
    const auto dim = static_cast<Eigen::Index>(js.at("mean").size());
    model.scaler.mean = row_from(js.at("mean"), dim, "scaler.mean");
    model.scaler.stddev = row_from(js.at("stddev"), dim, "scaler.stddev");
    model.scaler.inv_stddev.resize(dim);
    for (Eigen::Index c = 0; c < dim; ++c)
      model.scaler.inv_stddev(c) =
          model.scaler.stddev(c) > 0.0 ? 1.0 / model.scaler.stddev(c) : 0.0;

    std::vector<std::pair<std::shared_ptr<const Eigen::MatrixXd>,
                          std::shared_ptr<const Eigen::VectorXi>>> sets;
    for (const auto& ps : root.at("point_sets")) {
      const auto rows = ps.at("rows").get<Eigen::Index>();
      const auto cols = ps.at("cols").get<Eigen::Index>();
      const auto& data = ps.at("data");
      const auto& labels = ps.at("labels");
      if (cols != dim || static_cast<Eigen::Index>(data.size()) != rows * cols ||
          static_cast<Eigen::Index>(labels.size()) != rows)
        throw InputError("model: kNN point set has inconsistent dimensions");
      Eigen::MatrixXd points(rows, cols);
      for (Eigen::Index i = 0; i < rows * cols; ++i)
        points.data()[i] = data[static_cast<std::size_t>(i)].get<double>();
      Eigen::VectorXi y(rows);
      for (Eigen::Index i = 0; i < rows; ++i) y(i) = labels[static_cast<std::size_t>(i)].get<int>();
      sets.emplace_back(std::make_shared<const Eigen::MatrixXd>(std::move(points)),
                        std::make_shared<const Eigen::VectorXi>(std::move(y)));
    }

    for (const auto& jb : root.at("bases")) {
      auto kind = kind_from_id(jb.at("kind").get<std::string>());
      if (!kind) throw InputError("model: unknown classifier kind " + jb.at("kind").dump());
      BaseModel b;
      b.kind = *kind;
      b.dim = jb.at("dim").get<Eigen::Index>();
      b.degenerate = jb.at("degenerate").get<bool>();
      if (b.dim != dim) throw InputError("model: base dimension differs from the scaler");
      if (const int k = knn_k(b.kind); k > 0) {
        const auto set = jb.at("point_set").get<std::size_t>();
        if (set >= sets.size() || jb.at("k").get<int>() != k ||
            sets[set].first->rows() < k)
          throw InputError("model: corrupt kNN base");
        b.impl = KnnModel{k, sets[set].first, sets[set].second};
      } else if (b.kind == BaseClassifierKind::decision_tree) {
        b.impl = tree_from_json(jb.at("nodes"), dim);
      } else if (b.kind == BaseClassifierKind::random_forest) {
        RandomForest forest;
        for (const auto& t : jb.at("trees")) forest.trees.push_back(tree_from_json(t, dim));
        if (forest.trees.empty()) throw InputError("model: forest without trees");
        b.impl = std::move(forest);
      } else {
        GaussianNaiveBayes nb;
        nb.log_prior << double_or_neg_inf(jb.at("log_prior").at(0)),
            double_or_neg_inf(jb.at("log_prior").at(1));
        nb.mean.resize(2, dim);
        nb.variance.resize(2, dim);
        for (int c = 0; c < 2; ++c) {
          nb.mean.row(c) = row_from(jb.at("mean").at(static_cast<std::size_t>(c)), dim, "mean");
          nb.variance.row(c) =
              row_from(jb.at("variance").at(static_cast<std::size_t>(c)), dim, "variance");
        }
        nb.constant_class = jb.at("constant_class").get<int>();
        b.impl = std::move(nb);
      }
      model.bases.push_back(std::move(b));
    }

    const auto& jmeta = root.at("meta");
    const auto n_bases = static_cast<Eigen::Index>(model.bases.size());
    model.meta.weights = row_from(jmeta.at("weights"), n_bases, "meta.weights").transpose();
    model.meta.bias = jmeta.at("bias").get<double>();
    if (model.bases.empty()) throw InputError("model: no base classifiers");
    return model;
  } catch (const json::exception& e) {
    throw InputError(std::string("model: malformed container: ") + e.what());
  }
}

void save_model(const EnsembleModel& model, const std::filesystem::path& path) {
  write_text_file(path, serialize_model(model));
}

EnsembleModel load_model(const std::filesystem::path& path) {
  return parse_model_text(read_text_file(path));
}

std::string model_fingerprint(std::string_view serialized) {
  return hex64(fnv1a64(serialized));
}

std::string model_fingerprint(const EnsembleModel& model) {
  return model_fingerprint(serialize_model(model));
}

} // namespace vinerisk
