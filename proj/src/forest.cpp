#include "mwd/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace mwd {

namespace {

void check_training_data(const FeatureMatrix& X, std::span<const int> y) {
  if (X.n_rows == 0 || X.n_cols() == 0) throw invalid_argument("classifier: empty feature matrix");
  if (y.size() != X.n_rows) throw invalid_argument("classifier: label count does not match rows");
  if (X.values.size() != X.n_rows * X.n_cols()) throw invalid_argument("classifier: malformed matrix");
  bool has0 = false;
  bool has1 = false;
  for (int l : y) {
    if (l == 0)
      has0 = true;
    else if (l == 1)
      has1 = true;
    else
      throw invalid_argument("classifier: labels must be 0 or 1");
  }
  if (!has0 || !has1) throw invalid_argument("classifier: training labels contain a single class");
  for (double v : X.values)
    if (!std::isfinite(v)) throw invalid_argument("classifier: non-finite feature value");
}

struct SplitCandidate {
  int feature{-1};
  double threshold{0.0};
  double gain{-1.0};
  std::size_t n_left{0};
};

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<double>& cols, std::size_t n_rows, std::size_t n_features, std::span<const int> y,
              const ForestParams& p, std::uint64_t seed, std::vector<double>& importance)
      : cols_(cols),
        n_rows_(n_rows),
        n_features_(n_features),
        y_(y),
        p_(p),
        rng_(seed),
        importance_(importance),
        k_sample_(p.features_per_split(n_features)),
        feature_order_(n_features) {
    std::iota(feature_order_.begin(), feature_order_.end(), 0);
  }

  DecisionTree build() {
    std::vector<std::size_t> idx(n_rows_);
    if (p_.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, n_rows_ - 1);
      for (auto& i : idx) i = pick(rng_);
      std::sort(idx.begin(), idx.end());
    } else {
      std::iota(idx.begin(), idx.end(), 0);
    }
    tree_.nodes.clear();
    tree_.depth = 0;
    grow(idx, 0);
    return std::move(tree_);
  }

 private:
  double value(std::size_t row, std::size_t f) const { return cols_[f * n_rows_ + row]; }

  static double gini(std::size_t n, std::size_t n1) {
    if (n == 0) return 0.0;
    const double p1 = static_cast<double>(n1) / static_cast<double>(n);
    return 2.0 * p1 * (1.0 - p1);
  }

  int grow(std::vector<std::size_t>& idx, int depth) {
    const int node_id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.depth = std::max(tree_.depth, depth);

    std::size_t n1 = 0;
    for (std::size_t i : idx) n1 += static_cast<std::size_t>(y_[i]);
    const std::size_t n = idx.size();
    tree_.nodes[static_cast<std::size_t>(node_id)].label = (2 * n1 > n) ? 1 : 0;

    const std::size_t min_leaf = static_cast<std::size_t>(p_.min_samples_leaf);
    if (depth >= p_.max_depth || n1 == 0 || n1 == n || n < 2 * min_leaf) return node_id;

    const SplitCandidate best = find_split(idx, n1);
    if (best.feature < 0) return node_id;

    const double parent = static_cast<double>(n) * gini(n, n1);
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    left.reserve(best.n_left);
    right.reserve(n - best.n_left);
    const auto f = static_cast<std::size_t>(best.feature);
    for (std::size_t i : idx) (value(i, f) <= best.threshold ? left : right).push_back(i);
    std::size_t l1 = 0;
    for (std::size_t i : left) l1 += static_cast<std::size_t>(y_[i]);
    const double child = static_cast<double>(left.size()) * gini(left.size(), l1) +
                         static_cast<double>(right.size()) * gini(right.size(), n1 - l1);
    importance_[f] += std::max(0.0, parent - child);

    idx.clear();
    idx.shrink_to_fit();
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    auto& node = tree_.nodes[static_cast<std::size_t>(node_id)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = r;
    return node_id;
  }

  SplitCandidate find_split(const std::vector<std::size_t>& idx, std::size_t n1) {
    const std::size_t n = idx.size();
    const std::size_t min_leaf = static_cast<std::size_t>(p_.min_samples_leaf);
    const double parent = static_cast<double>(n) * gini(n, n1);
    SplitCandidate best;
    std::vector<std::pair<double, int>> vals(n);

    // Features are drawn without replacement; constant features do not count
    // toward the per-node budget.
    std::size_t visited = 0;
    std::size_t informative = 0;
    while (visited < n_features_ && informative < k_sample_) {
      std::uniform_int_distribution<std::size_t> pick(visited, n_features_ - 1);
      std::swap(feature_order_[visited], feature_order_[pick(rng_)]);
      const std::size_t f = feature_order_[visited++];

      for (std::size_t j = 0; j < n; ++j) vals[j] = {value(idx[j], f), y_[idx[j]]};
      std::sort(vals.begin(), vals.end());
      if (vals.front().first == vals.back().first) continue;
      ++informative;

      std::size_t left_n1 = 0;
      for (std::size_t j = 0; j + 1 < n; ++j) {
        left_n1 += static_cast<std::size_t>(vals[j].second);
        if (vals[j].first == vals[j + 1].first) continue;
        const std::size_t nl = j + 1;
        const std::size_t nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double child = static_cast<double>(nl) * gini(nl, left_n1) + static_cast<double>(nr) * gini(nr, n1 - left_n1);
        const double gain = parent - child;
        double thr = vals[j].first + (vals[j + 1].first - vals[j].first) / 2.0;
        if (thr >= vals[j + 1].first) thr = vals[j].first;
        const int fi = static_cast<int>(f);
        const bool better = gain > best.gain ||
                            (gain == best.gain && (fi < best.feature || (fi == best.feature && thr < best.threshold)));
        if (better) best = {fi, thr, gain, nl};
      }
    }
    return best;
  }

  const std::vector<double>& cols_;
  std::size_t n_rows_;
  std::size_t n_features_;
  std::span<const int> y_;
  const ForestParams& p_;
  std::mt19937_64 rng_;
  std::vector<double>& importance_;
  std::size_t k_sample_;
  std::vector<std::size_t> feature_order_;
  DecisionTree tree_;
};

}  // namespace

void ForestParams::validate() const {
  if (n_trees < 1) throw invalid_argument("forest: n_trees must be >= 1");
  if (max_depth < 1) throw invalid_argument("forest: max_depth must be >= 1");
  if (min_samples_leaf < 1) throw invalid_argument("forest: min_samples_leaf must be >= 1");
  if (max_features == MaxFeatures::Fraction && !(max_features_fraction > 0.0 && max_features_fraction <= 1.0))
    throw invalid_argument("forest: max_features fraction must be in (0, 1]");
}

std::size_t ForestParams::features_per_split(std::size_t k) const {
  std::size_t n = k;
  switch (max_features) {
    case MaxFeatures::Sqrt: n = static_cast<std::size_t>(std::sqrt(static_cast<double>(k))); break;
    case MaxFeatures::All: n = k; break;
    case MaxFeatures::Fraction: n = static_cast<std::size_t>(max_features_fraction * static_cast<double>(k)); break;
  }
  return std::clamp<std::size_t>(n, 1, std::max<std::size_t>(k, 1));
}

int DecisionTree::predict(std::span<const double> row) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const auto& nd = nodes[i];
    i = static_cast<std::size_t>(row[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right);
  }
  return nodes[i].label;
}

std::vector<double> TrainedForest::predict_proba(const FeatureMatrix& X) const {
  if (X.names != feature_names) throw invalid_argument("predict_proba: feature names do not match training");
  return predict_proba_rows(X.values, X.n_rows);
}

std::vector<double> TrainedForest::predict_proba_rows(std::span<const double> values, std::size_t n_rows) const {
  const std::size_t k = feature_names.size();
  if (values.size() != n_rows * k) throw invalid_argument("predict_proba: matrix shape mismatch");
  std::vector<double> out(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    const auto row = values.subspan(r * k, k);
    std::size_t votes = 0;
    for (const auto& t : trees) votes += static_cast<std::size_t>(t.predict(row));
    out[r] = static_cast<double>(votes) / static_cast<double>(trees.size());
  }
  return out;
}

TrainedForest train_random_forest(const FeatureMatrix& X, std::span<const int> y, const ForestParams& p,
                                  unsigned threads) {
  p.validate();
  check_training_data(X, y);
  const std::size_t n = X.n_rows;
  const std::size_t k = X.n_cols();

  std::vector<double> cols(n * k);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < k; ++c) cols[c * n + r] = X.values[r * k + c];

  TrainedForest forest;
  forest.params = p;
  forest.feature_names = X.names;
  forest.trees.resize(static_cast<std::size_t>(p.n_trees));
  std::vector<std::vector<double>> per_tree(static_cast<std::size_t>(p.n_trees));

  parallel_for(forest.trees.size(), threads, [&](std::size_t t) {
    std::vector<double> imp(k, 0.0);
    TreeBuilder builder(cols, n, k, y, p, mix_seed(p.seed, t), imp);
    forest.trees[t] = builder.build();
    double total = 0.0;
    for (double v : imp) total += v;
    if (total > 0.0)
      for (double& v : imp) v /= total;
    per_tree[t] = std::move(imp);
  });

  forest.importances.assign(k, 0.0);
  for (const auto& imp : per_tree)
    for (std::size_t c = 0; c < k; ++c) forest.importances[c] += imp[c];
  double total = 0.0;
  for (double v : forest.importances) total += v;
  if (total > 0.0) {
    for (double& v : forest.importances) v /= total;
  } else {
    std::fill(forest.importances.begin(), forest.importances.end(), 1.0 / static_cast<double>(k));
  }
  return forest;
}

}  // namespace mwd
