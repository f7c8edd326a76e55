#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mwd/features.hpp"
#include "mwd/forest.hpp"

namespace mwd {

// fit / predict_proba / optional importances. predict_proba returns P(MW) per
// row; P(nonMW) is its complement.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual void fit(const FeatureMatrix& X, std::span<const int> y) = 0;
  virtual std::vector<double> predict_proba(const FeatureMatrix& X) const = 0;
  virtual std::optional<std::vector<double>> importances() const { return std::nullopt; }
  virtual std::string name() const = 0;
};

class RandomForestClassifier : public Classifier {
 public:
  RandomForestClassifier(ForestParams p, unsigned threads) : params_(p), threads_(threads) {}
  void fit(const FeatureMatrix& X, std::span<const int> y) override;
  std::vector<double> predict_proba(const FeatureMatrix& X) const override;
  std::optional<std::vector<double>> importances() const override;
  std::string name() const override { return "random_forest"; }
  const TrainedForest& forest() const;

 private:
  ForestParams params_;
  unsigned threads_;
  std::optional<TrainedForest> forest_;
};

// Gaussian naive Bayes. Variances get 1e-9 x (largest feature variance) added.
class NaiveBayesClassifier : public Classifier {
 public:
  void fit(const FeatureMatrix& X, std::span<const int> y) override;
  std::vector<double> predict_proba(const FeatureMatrix& X) const override;
  std::string name() const override { return "naive_bayes"; }

 private:
  std::vector<std::string> names_;
  double log_prior_[2]{};
  std::vector<double> mean_[2];
  std::vector<double> var_[2];
};

// k nearest neighbours on standardized features, Manhattan distance,
// inverse-distance vote weights. Equal distances prefer the lower row index.
class KnnClassifier : public Classifier {
 public:
  explicit KnnClassifier(int k = 10) : k_(k) {}
  void fit(const FeatureMatrix& X, std::span<const int> y) override;
  std::vector<double> predict_proba(const FeatureMatrix& X) const override;
  std::string name() const override { return "knn"; }

 private:
  int k_;
  std::vector<std::string> names_;
  std::vector<double> center_;
  std::vector<double> scale_;
  std::vector<double> train_;  // standardized, row-major
  std::vector<int> labels_;
};

enum class ClassifierKind { RandomForest, NaiveBayes, Knn };

const char* to_string(ClassifierKind k);
ClassifierKind classifier_kind_from_string(const std::string& s);

struct ClassifierSpec {
  ClassifierKind kind{ClassifierKind::RandomForest};
  ForestParams forest{};
  int knn_k{10};
};

// The seed argument replaces spec.forest.seed.
std::unique_ptr<Classifier> make_classifier(const ClassifierSpec& spec, std::uint64_t seed, unsigned threads);

}  // namespace mwd
