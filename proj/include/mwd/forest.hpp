#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mwd/features.hpp"

namespace mwd {

enum class MaxFeatures { Sqrt, All, Fraction };

struct ForestParams {
  int n_trees{700};
  int max_depth{12};
  MaxFeatures max_features{MaxFeatures::Sqrt};
  double max_features_fraction{1.0};  // used when max_features == Fraction
  int min_samples_leaf{1};
  bool bootstrap{true};
  std::uint64_t seed{0};

  void validate() const;
  // Number of candidate features drawn at each node for k input features.
  std::size_t features_per_split(std::size_t k) const;
};

struct TreeNode {
  int feature{-1};  // -1 marks a leaf
  double threshold{0.0};
  int left{-1};
  int right{-1};
  int label{0};  // leaf majority class, ties go to nonMW
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  int depth{0};

  int predict(std::span<const double> row) const;
};

struct TrainedForest {
  std::vector<DecisionTree> trees;
  std::vector<double> importances;  // normalized, sums to 1
  std::vector<std::string> feature_names;
  ForestParams params;

  // P(MW) per row: fraction of trees whose leaf votes MW.
  std::vector<double> predict_proba(const FeatureMatrix& X) const;
  std::vector<double> predict_proba_rows(std::span<const double> values, std::size_t n_rows) const;
};

// Gini-split trees on bootstrap samples. Trees are seeded independently from
// params.seed so the result does not depend on `threads`.
TrainedForest train_random_forest(const FeatureMatrix& X, std::span<const int> y, const ForestParams& p,
                                  unsigned threads = 1);

}  // namespace mwd
