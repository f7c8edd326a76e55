#include "mwd/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mwd {

namespace {

void check_fit_input(const FeatureMatrix& X, std::span<const int> y) {
  if (X.n_rows == 0 || X.n_cols() == 0) throw invalid_argument("classifier: empty feature matrix");
  if (y.size() != X.n_rows) throw invalid_argument("classifier: label count does not match rows");
  bool seen[2] = {false, false};
  for (int l : y) {
    if (l != 0 && l != 1) throw invalid_argument("classifier: labels must be 0 or 1");
    seen[l] = true;
  }
  if (!seen[0] || !seen[1]) throw invalid_argument("classifier: training labels contain a single class");
  for (double v : X.values)
    if (!std::isfinite(v)) throw invalid_argument("classifier: non-finite feature value");
}

void check_names(const std::vector<std::string>& trained, const FeatureMatrix& X) {
  if (trained.empty()) throw invalid_argument("classifier: predict called before fit");
  if (trained != X.names) throw invalid_argument("classifier: feature names do not match training");
}

}  // namespace

void RandomForestClassifier::fit(const FeatureMatrix& X, std::span<const int> y) {
  forest_ = train_random_forest(X, y, params_, threads_);
}

const TrainedForest& RandomForestClassifier::forest() const {
  if (!forest_) throw invalid_argument("random forest: not fitted");
  return *forest_;
}

std::vector<double> RandomForestClassifier::predict_proba(const FeatureMatrix& X) const {
  return forest().predict_proba(X);
}

std::optional<std::vector<double>> RandomForestClassifier::importances() const { return forest().importances; }

void NaiveBayesClassifier::fit(const FeatureMatrix& X, std::span<const int> y) {
  check_fit_input(X, y);
  const std::size_t k = X.n_cols();
  names_ = X.names;
  std::size_t count[2] = {0, 0};
  for (int c = 0; c < 2; ++c) {
    mean_[c].assign(k, 0.0);
    var_[c].assign(k, 0.0);
  }
  for (std::size_t r = 0; r < X.n_rows; ++r) {
    const int c = y[r];
    ++count[c];
    for (std::size_t j = 0; j < k; ++j) mean_[c][j] += X.at(r, j);
  }
  for (int c = 0; c < 2; ++c)
    for (double& m : mean_[c]) m /= static_cast<double>(count[c]);
  for (std::size_t r = 0; r < X.n_rows; ++r) {
    const int c = y[r];
    for (std::size_t j = 0; j < k; ++j) {
      const double d = X.at(r, j) - mean_[c][j];
      var_[c][j] += d * d;
    }
  }
  for (int c = 0; c < 2; ++c)
    for (double& v : var_[c]) v /= static_cast<double>(count[c]);

  double max_var = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double m = mean(X.column(j));
    double v = 0.0;
    for (std::size_t r = 0; r < X.n_rows; ++r) v += (X.at(r, j) - m) * (X.at(r, j) - m);
    max_var = std::max(max_var, v / static_cast<double>(X.n_rows));
  }
  double floor = 1e-9 * max_var;
  if (!(floor > 0.0)) floor = 1e-9;
  for (int c = 0; c < 2; ++c)
    for (double& v : var_[c]) v += floor;
  const double n = static_cast<double>(X.n_rows);
  log_prior_[0] = std::log(static_cast<double>(count[0]) / n);
  log_prior_[1] = std::log(static_cast<double>(count[1]) / n);
}

std::vector<double> NaiveBayesClassifier::predict_proba(const FeatureMatrix& X) const {
  check_names(names_, X);
  constexpr double kLog2Pi = 1.8378770664093453;
  std::vector<double> out(X.n_rows);
  for (std::size_t r = 0; r < X.n_rows; ++r) {
    double ll[2];
    for (int c = 0; c < 2; ++c) {
      double s = log_prior_[c];
      for (std::size_t j = 0; j < X.n_cols(); ++j) {
        const double d = X.at(r, j) - mean_[c][j];
        s -= 0.5 * (kLog2Pi + std::log(var_[c][j]) + d * d / var_[c][j]);
      }
      ll[c] = s;
    }
    // P(MW) = 1 / (1 + exp(ll0 - ll1))
    out[r] = 1.0 / (1.0 + std::exp(ll[0] - ll[1]));
  }
  return out;
}

void KnnClassifier::fit(const FeatureMatrix& X, std::span<const int> y) {
  if (k_ < 1) throw invalid_argument("knn: k must be >= 1");
  check_fit_input(X, y);
  const std::size_t k = X.n_cols();
  names_ = X.names;
  center_.assign(k, 0.0);
  scale_.assign(k, 1.0);
  for (std::size_t j = 0; j < k; ++j) {
    const auto col = X.column(j);
    center_[j] = mean(col);
    const double sd = population_sd(col);
    scale_[j] = sd > 0.0 ? sd : 1.0;
  }
  train_.resize(X.values.size());
  for (std::size_t r = 0; r < X.n_rows; ++r)
    for (std::size_t j = 0; j < k; ++j) train_[r * k + j] = (X.at(r, j) - center_[j]) / scale_[j];
  labels_.assign(y.begin(), y.end());
}

std::vector<double> KnnClassifier::predict_proba(const FeatureMatrix& X) const {
  check_names(names_, X);
  const std::size_t k = X.n_cols();
  const std::size_t n_train = labels_.size();
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k_), n_train);
  std::vector<double> out(X.n_rows);
  std::vector<std::pair<double, std::size_t>> dist(n_train);
  std::vector<double> q(k);
  for (std::size_t r = 0; r < X.n_rows; ++r) {
    for (std::size_t j = 0; j < k; ++j) q[j] = (X.at(r, j) - center_[j]) / scale_[j];
    for (std::size_t i = 0; i < n_train; ++i) {
      double d = 0.0;
      for (std::size_t j = 0; j < k; ++j) d += std::abs(q[j] - train_[i * k + j]);
      dist[i] = {d, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
    double w[2] = {0.0, 0.0};
    const bool exact = dist[0].first == 0.0;
    for (std::size_t i = 0; i < kk; ++i) {
      const auto [d, idx] = dist[i];
      if (exact) {
        if (d == 0.0) w[labels_[idx]] += 1.0;
      } else {
        w[labels_[idx]] += 1.0 / d;
      }
    }
    out[r] = w[1] / (w[0] + w[1]);
  }
  return out;
}

const char* to_string(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::RandomForest: return "random_forest";
    case ClassifierKind::NaiveBayes: return "naive_bayes";
    case ClassifierKind::Knn: return "knn";
  }
  return "?";
}

ClassifierKind classifier_kind_from_string(const std::string& s) {
  if (s == "random_forest" || s == "rf") return ClassifierKind::RandomForest;
  if (s == "naive_bayes" || s == "nb") return ClassifierKind::NaiveBayes;
  if (s == "knn") return ClassifierKind::Knn;
  throw invalid_argument("unknown classifier '" + s + "'");
}

std::unique_ptr<Classifier> make_classifier(const ClassifierSpec& spec, std::uint64_t seed, unsigned threads) {
  switch (spec.kind) {
    case ClassifierKind::RandomForest: {
      ForestParams p = spec.forest;
      p.seed = seed;
      return std::make_unique<RandomForestClassifier>(p, threads);
    }
    case ClassifierKind::NaiveBayes: return std::make_unique<NaiveBayesClassifier>();
    case ClassifierKind::Knn: return std::make_unique<KnnClassifier>(spec.knn_k);
  }
  throw Error(ErrorKind::Internal, "make_classifier: bad kind");
}

}  // namespace mwd
