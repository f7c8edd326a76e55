#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mwd/classify.hpp"
#include "mwd/features.hpp"

namespace mwd {

struct FoldResult {
  std::string test_subject;
  std::size_t n_train{0};
  std::size_t n_test{0};
  std::optional<double> auc;  // nullopt when the held-out subject has one class
  double fit_seconds{0.0};
};

struct EvalResult {
  double weighted_f1{0.0};
  double kappa{0.0};
  double auc{0.0};
  std::vector<FoldResult> folds;
  std::vector<double> scores;  // pooled out-of-fold P(MW), in row order
  double total_fit_seconds() const;
};

// One fold per subject (in order of first appearance). The fold-f model is
// seeded with mix_seed(seed, f). MW is predicted when P(MW) > 0.5.
EvalResult loso_cv(const FeatureMatrix& X, const ClassifierSpec& spec, std::uint64_t seed, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Random hyperparameter search

using ParamValue = std::variant<std::int64_t, double, std::string>;
using ParamSet = std::map<std::string, ParamValue>;

struct IntRange {
  std::int64_t lo;
  std::int64_t hi;  // inclusive
};
struct RealRange {
  double lo;
  double hi;
};
struct Choice {
  std::vector<ParamValue> options;
};

struct ParamDist {
  std::string name;
  std::variant<IntRange, RealRange, Choice> dist;
};

using SearchSpace = std::vector<ParamDist>;

// Recognized names: n_trees, max_depth, max_features ("sqrt", "all" or a
// fraction), min_samples_leaf, n_neighbors.
ClassifierSpec apply_params(const ClassifierSpec& base, const ParamSet& params);
SearchSpace default_search_space(ClassifierKind kind);
std::string to_string(const ParamValue& v);

struct CandidateResult {
  ParamSet params;
  double mean_auc{0.0};
  std::vector<double> fold_auc;
  std::vector<std::size_t> degenerate_folds;  // scored 0.5
};

struct SearchResult {
  ParamSet best;
  double best_auc{0.0};
  std::size_t best_index{0};
  std::vector<CandidateResult> candidates;
  std::vector<std::vector<std::string>> fold_subjects;
};

// Subjects are shuffled and dealt round-robin into n_folds groups. Each
// candidate is scored by mean held-out AUC; a fold whose training or test part
// has a single class scores 0.5. Ties go to the earlier candidate.
SearchResult random_search(const SearchSpace& space, const ClassifierSpec& base, const FeatureMatrix& X,
                           int n_candidates = 100, int n_folds = 5, std::uint64_t seed = 0, unsigned threads = 1);

}  // namespace mwd
