#include "mwd/cv.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "mwd/metrics.hpp"

namespace mwd {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<std::size_t> rows_where(const FeatureMatrix& X, const std::set<std::string>& subjects, bool inside) {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < X.n_rows; ++r)
    if ((subjects.count(X.subject_ids[r]) > 0) == inside) out.push_back(r);
  return out;
}

bool both_classes(const std::vector<int>& y) {
  bool s[2] = {false, false};
  for (int v : y) s[v] = true;
  return s[0] && s[1];
}

}  // namespace

double EvalResult::total_fit_seconds() const {
  double s = 0.0;
  for (const auto& f : folds) s += f.fit_seconds;
  return s;
}

EvalResult loso_cv(const FeatureMatrix& X, const ClassifierSpec& spec, std::uint64_t seed, unsigned threads) {
  X.validate();
  const auto subjects = X.subjects();
  if (subjects.size() < 2) throw invalid_argument("loso_cv: need at least 2 subjects");

  EvalResult res;
  res.scores.assign(X.n_rows, 0.0);
  std::vector<char> covered(X.n_rows, 0);
  for (std::size_t f = 0; f < subjects.size(); ++f) {
    const std::set<std::string> held{subjects[f]};
    const auto test_rows = rows_where(X, held, true);
    const auto train_rows = rows_where(X, held, false);
    for (std::size_t r : train_rows)
      if (X.subject_ids[r] == subjects[f]) throw Error(ErrorKind::Internal, "loso_cv: subject leaked into training");

    const FeatureMatrix train = X.select_rows(train_rows);
    const FeatureMatrix test = X.select_rows(test_rows);
    auto model = make_classifier(spec, mix_seed(seed, f), threads);
    const auto t0 = Clock::now();
    model->fit(train, train.labels);
    const auto t1 = Clock::now();
    const auto p = model->predict_proba(test);

    FoldResult fr;
    fr.test_subject = subjects[f];
    fr.n_train = train_rows.size();
    fr.n_test = test_rows.size();
    fr.fit_seconds = std::chrono::duration<double>(t1 - t0).count();
    if (both_classes(test.labels)) fr.auc = roc_auc(test.labels, p);
    res.folds.push_back(fr);
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      if (covered[test_rows[i]]) throw Error(ErrorKind::Internal, "loso_cv: overlapping test folds");
      covered[test_rows[i]] = 1;
      res.scores[test_rows[i]] = p[i];
    }
  }

  std::vector<int> pred(X.n_rows);
  for (std::size_t r = 0; r < X.n_rows; ++r) pred[r] = res.scores[r] > 0.5 ? 1 : 0;
  res.weighted_f1 = weighted_f1(X.labels, pred);
  res.kappa = cohens_kappa(X.labels, pred);
  res.auc = roc_auc(X.labels, res.scores);
  return res;
}

// ---------------------------------------------------------------------------

std::string to_string(const ParamValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  std::ostringstream os;
  os.precision(17);
  os << std::get<double>(v);
  return os.str();
}

namespace {

std::int64_t as_int(const std::string& name, const ParamValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto* d = std::get_if<double>(&v)) {
    if (std::floor(*d) == *d) return static_cast<std::int64_t>(*d);
  }
  throw invalid_argument("parameter '" + name + "' must be an integer");
}

}  // namespace

ClassifierSpec apply_params(const ClassifierSpec& base, const ParamSet& params) {
  ClassifierSpec s = base;
  for (const auto& [name, v] : params) {
    if (name == "n_trees") {
      s.forest.n_trees = static_cast<int>(as_int(name, v));
    } else if (name == "max_depth") {
      s.forest.max_depth = static_cast<int>(as_int(name, v));
    } else if (name == "min_samples_leaf") {
      s.forest.min_samples_leaf = static_cast<int>(as_int(name, v));
    } else if (name == "n_neighbors") {
      s.knn_k = static_cast<int>(as_int(name, v));
    } else if (name == "max_features") {
      if (const auto* str = std::get_if<std::string>(&v)) {
        if (*str == "sqrt" || *str == "auto")
          s.forest.max_features = MaxFeatures::Sqrt;
        else if (*str == "all")
          s.forest.max_features = MaxFeatures::All;
        else
          throw invalid_argument("max_features must be 'sqrt', 'all' or a fraction");
      } else if (const auto* d = std::get_if<double>(&v)) {
        s.forest.max_features = MaxFeatures::Fraction;
        s.forest.max_features_fraction = *d;
      } else {
        throw invalid_argument("max_features must be 'sqrt', 'all' or a fraction");
      }
    } else {
      throw invalid_argument("unknown hyperparameter '" + name + "'");
    }
  }
  s.forest.validate();
  if (s.knn_k < 1) throw invalid_argument("n_neighbors must be >= 1");
  return s;
}

SearchSpace default_search_space(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::RandomForest:
      return {{"n_trees", IntRange{100, 1000}},
              {"max_depth", IntRange{2, 20}},
              {"max_features", Choice{{std::string("sqrt"), 0.1, 0.3}}},
              {"min_samples_leaf", IntRange{1, 5}}};
    case ClassifierKind::Knn: return {{"n_neighbors", IntRange{1, 30}}};
    case ClassifierKind::NaiveBayes: return {};
  }
  return {};
}

SearchResult random_search(const SearchSpace& space, const ClassifierSpec& base, const FeatureMatrix& X,
                           int n_candidates, int n_folds, std::uint64_t seed, unsigned threads) {
  if (n_candidates < 1) throw invalid_argument("random_search: n_candidates must be >= 1");
  if (n_folds < 2) throw invalid_argument("random_search: n_folds must be >= 2");
  X.validate();
  auto subjects = X.subjects();
  if (subjects.size() < static_cast<std::size_t>(n_folds))
    throw invalid_argument("random_search: " + std::to_string(subjects.size()) + " subjects cannot fill " +
                           std::to_string(n_folds) + " folds");

  SearchResult res;
  std::mt19937_64 fold_rng(mix_seed(seed, 0x5eed));
  std::shuffle(subjects.begin(), subjects.end(), fold_rng);
  res.fold_subjects.resize(static_cast<std::size_t>(n_folds));
  for (std::size_t i = 0; i < subjects.size(); ++i)
    res.fold_subjects[i % static_cast<std::size_t>(n_folds)].push_back(subjects[i]);

  struct Split {
    FeatureMatrix train;
    FeatureMatrix test;
    bool degenerate;
  };
  std::vector<Split> splits;
  for (const auto& fs : res.fold_subjects) {
    const std::set<std::string> held(fs.begin(), fs.end());
    Split s{X.select_rows(rows_where(X, held, false)), X.select_rows(rows_where(X, held, true)), false};
    s.degenerate = !both_classes(s.train.labels) || !both_classes(s.test.labels);
    splits.push_back(std::move(s));
  }

  std::mt19937_64 rng(seed);
  for (int c = 0; c < n_candidates; ++c) {
    CandidateResult cand;
    for (const auto& pd : space) {
      ParamValue v;
      if (const auto* ir = std::get_if<IntRange>(&pd.dist)) {
        if (ir->lo > ir->hi) throw invalid_argument("random_search: empty range for " + pd.name);
        v = std::uniform_int_distribution<std::int64_t>(ir->lo, ir->hi)(rng);
      } else if (const auto* rr = std::get_if<RealRange>(&pd.dist)) {
        if (rr->lo > rr->hi) throw invalid_argument("random_search: empty range for " + pd.name);
        v = rr->lo == rr->hi ? rr->lo : std::uniform_real_distribution<double>(rr->lo, rr->hi)(rng);
      } else {
        const auto& ch = std::get<Choice>(pd.dist);
        if (ch.options.empty()) throw invalid_argument("random_search: empty choice for " + pd.name);
        v = ch.options[std::uniform_int_distribution<std::size_t>(0, ch.options.size() - 1)(rng)];
      }
      cand.params[pd.name] = v;
    }
    const ClassifierSpec spec = apply_params(base, cand.params);
    double sum = 0.0;
    for (std::size_t f = 0; f < splits.size(); ++f) {
      double auc = 0.5;
      if (splits[f].degenerate) {
        cand.degenerate_folds.push_back(f);
      } else {
        auto model = make_classifier(spec, mix_seed(mix_seed(seed, static_cast<std::uint64_t>(c) + 1), f), threads);
        model->fit(splits[f].train, splits[f].train.labels);
        auc = roc_auc(splits[f].test.labels, model->predict_proba(splits[f].test));
      }
      cand.fold_auc.push_back(auc);
      sum += auc;
    }
    cand.mean_auc = sum / static_cast<double>(splits.size());
    if (c == 0 || cand.mean_auc > res.best_auc) {
      res.best_auc = cand.mean_auc;
      res.best = cand.params;
      res.best_index = static_cast<std::size_t>(c);
    }
    res.candidates.push_back(std::move(cand));
  }
  return res;
}

}  // namespace mwd
