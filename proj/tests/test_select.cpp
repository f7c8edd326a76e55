#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <set>

#include "mwd/select.hpp"
#include "oracles.hpp"

using namespace mwd;

namespace {

// Channels "C0".."C{n_ch-1}", `per_ch` columns each. Column 0 of every channel
// in `informative` is shifted by `sep` in MW rows.
FeatureMatrix channel_data(int n_ch, int per_ch, int n_subjects, int per_subject, std::set<int> informative, double sep,
                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::vector<std::string> stats{"Mean", "MeanPower", "FirstDiff", "SecondDiff", "HjComp"};
  FeatureMatrix m;
  for (int c = 0; c < n_ch; ++c)
    for (int f = 0; f < per_ch; ++f) {
      const std::string ch = "C" + std::to_string(c);
      m.names.push_back(ch + "_MPE-" + std::to_string(f + 1));
      m.channel_of.push_back(ch);
    }
  for (int s = 0; s < n_subjects; ++s)
    for (int e = 0; e < per_subject; ++e) {
      const int label = e % 2;
      for (int c = 0; c < n_ch; ++c)
        for (int f = 0; f < per_ch; ++f)
          m.values.push_back(g(rng) + (f == 0 && label && informative.count(c) ? sep : 0.0));
      m.labels.push_back(label);
      m.subject_ids.push_back("S" + std::to_string(s));
      ++m.n_rows;
    }
  return m;
}

ForestParams forest(int trees, std::uint64_t seed = 0) {
  ForestParams p;
  p.n_trees = trees;
  p.seed = seed;
  return p;
}

void check_selection(const FeatureSelection& s, const FeatureMatrix& X, std::size_t k) {
  CHECK(s.selected.size() == k);
  CHECK(s.importance.size() == k);
  std::set<std::string> uniq(s.selected.begin(), s.selected.end());
  CHECK(uniq.size() == k);
  for (const auto& n : s.selected) CHECK(std::find(X.names.begin(), X.names.end(), n) != X.names.end());
  CHECK(std::is_sorted(s.importance.rbegin(), s.importance.rend()));
  CHECK(s.seconds >= 0.0);
}

}  // namespace

TEST_CASE("pearson") {
  const std::vector<double> x{0.3, -1.2, 2.5, 4.0, 0.0};
  std::vector<double> neg(x.size());
  std::transform(x.begin(), x.end(), neg.begin(), [](double v) { return -v; });
  CHECK(*pearson(x, x) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(*pearson(x, neg) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(*pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 4}) ==
        doctest::Approx(0.9819805060619656).epsilon(1e-14));
  CHECK_FALSE(pearson(x, std::vector<double>(5, 2.0)).has_value());
  CHECK_THROWS_AS(pearson(x, std::vector<double>{1, 2}), Error);
}

TEST_CASE("Mann-Whitney p-values") {
  const std::vector<double> v{1, 2, 2, 3, 5, 7, 2, 4, 4, 6, 8, 9, 10};
  const std::vector<int> l{0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1};
  CHECK(mann_whitney_p(v, l) == doctest::Approx(0.09807508393321022).epsilon(1e-12));
  const std::vector<double> w{0.5, 1.5, 2.5, 3.5, 4.5, 5.5, 6.5, 7.5, 8.5};
  const std::vector<int> lw{1, 1, 1, 1, 0, 0, 0, 0, 0};
  CHECK(mann_whitney_p(w, lw) == doctest::Approx(0.019964453305216043).epsilon(1e-12));
  CHECK(mann_whitney_p(std::vector<double>(6, 1.0), std::vector<int>{0, 1, 0, 1, 0, 1}) == 1.0);

  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> sep;
  std::vector<int> ls;
  for (int i = 0; i < 200; ++i) {
    ls.push_back(i % 2);
    sep.push_back(g(rng) + (i % 2 ? 5.0 : 0.0));
  }
  CHECK(mann_whitney_p(sep, ls) < 1e-6);
}

TEST_CASE("salient counts") {
  const auto X = channel_data(3, 6, 2, 100, {1}, 5.0, 2);
  const auto c = salient_feature_counts(X, 0.05);
  REQUIRE(c.size() == 3);
  CHECK(c[1].channel == "C1");
  CHECK(c[1].salient >= 1);
  CHECK(c[1].total == 6);
  for (const auto& e : salient_feature_counts(X, 0.0)) CHECK(e.salient == 0);
  CHECK_THROWS_AS(salient_feature_counts(X, 1.0), Error);

  double frac = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto N = channel_data(10, 20, 1, 100, {}, 0.0, 100 + s);
    std::size_t hits = 0;
    for (const auto& e : salient_feature_counts(N, 0.05)) hits += e.salient;
    frac += static_cast<double>(hits) / 200.0 / 5.0;
  }
  CHECK((frac >= 0.02 && frac <= 0.08));
}

TEST_CASE("channel ranking") {
  const auto X = channel_data(5, 4, 6, 20, {3, 1}, 2.5, 3);
  ClassifierSpec spec;
  spec.forest = forest(30);
  for (auto method : {RankMethod::PValue, RankMethod::Auc}) {
    const auto r = rank_channels(X, method, spec, 7);
    REQUIRE(r.entries.size() == 5);
    const auto top = r.top(2);
    CHECK(std::set<std::string>(top.begin(), top.end()) == std::set<std::string>{"C1", "C3"});
    for (std::size_t i = 1; i < r.entries.size(); ++i) CHECK(r.entries[i - 1].score >= r.entries[i].score);
    std::set<std::string> uniq;
    for (const auto& e : r.entries) CHECK(uniq.insert(e.channel).second);
    CHECK(r.method == method);
  }
  const std::vector<std::size_t> cols{0, 1, 2, 3};
  const auto one = X.select_columns(cols);
  CHECK(rank_channels(one, RankMethod::Auc, spec, 7).entries.size() == 1);
  CHECK(rank_method_from_string("auc") == RankMethod::Auc);
  CHECK_THROWS_AS(rank_method_from_string("gini"), Error);
}

TEST_CASE("AUC ranking of noise channels is flat") {
  ClassifierSpec spec;
  spec.forest = forest(20);
  double spread = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto X = channel_data(4, 3, 10, 40, {}, 0.0, 200 + s);
    const auto r = rank_channels(X, RankMethod::Auc, spec, s);
    spread += (r.entries.front().score - r.entries.back().score) / 20.0;
  }
  MESSAGE("mean top-bottom AUC spread " << spread);
  CHECK(spread < 0.1);
}

TEST_CASE("channel curve") {
  const auto X = channel_data(4, 3, 4, 12, {0}, 2.0, 4);
  ClassifierSpec spec;
  spec.forest = forest(20);
  const auto r = rank_channels(X, RankMethod::PValue, spec, 1);
  const auto curve = channel_curve(X, r, 3, spec, 9);
  REQUIRE(curve.size() == 3);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(curve[i].k == i + 1);
    CHECK(curve[i].channels == r.top(i + 1));
  }
  const auto direct = loso_cv(X.select_columns(X.columns_for_channels(r.top(1))), spec, 9);
  CHECK(curve[0].eval.auc == direct.auc);
  CHECK(curve[0].eval.scores == direct.scores);
  CHECK_THROWS_AS(channel_curve(X, r, 5, spec, 9), Error);
}

TEST_CASE("correlation clusters") {
  auto X = channel_data(1, 6, 1, 80, {}, 0.0, 5);
  // Column 4 duplicates column 1; column 5 is column 1 negated.
  for (std::size_t r = 0; r < X.n_rows; ++r) {
    X.at(r, 4) = X.at(r, 1);
    X.at(r, 5) = -X.at(r, 1);
  }
  const auto cm = correlation_clusters(X, 0.9);
  CHECK(cm.n_clusters() == 4);
  CHECK(cm.cluster_of[1] == cm.cluster_of[4]);
  CHECK(cm.cluster_of[1] == cm.cluster_of[5]);
  CHECK(std::is_sorted(cm.representatives.begin(), cm.representatives.end()));
  for (std::size_t c = 0; c < cm.n_clusters(); ++c) CHECK(cm.cluster_of[cm.representatives[c]] == c);
  // Ties on mean |rho| go to the lowest index.
  CHECK(std::find(cm.representatives.begin(), cm.representatives.end(), 1) != cm.representatives.end());

  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto N = channel_data(1, 50, 1, 200, {}, 0.0, 300 + s);
    CHECK(correlation_clusters(N, 0.9).n_clusters() == 50);
  }
}

TEST_CASE("cluster properties on correlated data") {
  // Latent factors with varying noise give chains and mixed cluster sizes.
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0.0, 1.0);
  FeatureMatrix X;
  const std::size_t n_cols = 60;
  for (std::size_t c = 0; c < n_cols; ++c) {
    X.names.push_back("C_MDE-" + std::to_string(c % 20 + 1) + std::string(c / 20, 'x'));
    X.channel_of.push_back("C");
  }
  for (int r = 0; r < 120; ++r) {
    std::array<double, 6> z;
    for (auto& v : z) v = g(rng);
    for (std::size_t c = 0; c < n_cols; ++c) X.values.push_back(z[c % 6] + (0.05 + 0.02 * static_cast<double>(c / 6)) * g(rng));
    X.labels.push_back(r % 2);
    X.subject_ids.push_back("S");
    ++X.n_rows;
  }
  std::vector<std::vector<double>> cols(n_cols);
  for (std::size_t c = 0; c < n_cols; ++c) cols[c] = X.column(c);

  std::size_t prev = 0;
  for (double rho : {0.5, 0.8, 0.9, 0.95, 0.98, 0.99, 1.01}) {
    const auto cm = correlation_clusters(X, rho);
    CHECK(cm.n_clusters() >= prev);
    prev = cm.n_clusters();
    std::vector<std::size_t> size(cm.n_clusters(), 0);
    for (auto c : cm.cluster_of) ++size[c];
    for (std::size_t i = 0; i < n_cols; ++i) {
      if (size[cm.cluster_of[i]] < 2) continue;
      bool linked = false;
      for (std::size_t j = 0; j < n_cols && !linked; ++j)
        linked = j != i && cm.cluster_of[j] == cm.cluster_of[i] && std::abs(*pearson(cols[i], cols[j])) >= rho;
      CHECK(linked);
    }
    auto permuted = X;
    std::shuffle(permuted.labels.begin(), permuted.labels.end(), rng);
    const auto pm = correlation_clusters(permuted, rho);
    CHECK(pm.cluster_of == cm.cluster_of);
    CHECK(pm.representatives == cm.representatives);
  }
  CHECK(prev == n_cols);
  CHECK(correlation_clusters(X, 0.9, 1).cluster_of == correlation_clusters(X, 0.9, 4).cluster_of);
}

TEST_CASE("IFE") {
  auto X = channel_data(2, 10, 1, 200, {}, 0.0, 7);
  for (std::size_t r = 0; r < X.n_rows; ++r) X.labels[r] = X.at(r, 0) > 0.0;
  const auto fp = forest(60, 3);
  const auto f = train_random_forest(X, X.labels, fp);
  std::vector<std::size_t> order(X.n_cols());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return f.importances[a] > f.importances[b]; });
  for (std::size_t k : {1u, 5u, 20u}) {
    const auto s = ife(X, k, fp);
    check_selection(s, X, k);
    CHECK(s.n_fits == 1);
    CHECK(s.selected[0] == X.names[0]);
    for (std::size_t i = 0; i < k; ++i) CHECK(s.selected[i] == X.names[order[i]]);
  }
  CHECK_THROWS_AS(ife(X, 0, fp), Error);
  CHECK_THROWS_AS(ife(X, 21, fp), Error);
}

TEST_CASE("RFE") {
  auto X = channel_data(2, 15, 1, 150, {}, 0.0, 8);
  for (std::size_t r = 0; r < X.n_rows; ++r) X.labels[r] = X.at(r, 2) + X.at(r, 17) > 0.0;
  const auto fp = forest(40, 4);
  const auto all = rfe(X, 30, 0, fp);
  check_selection(all, X, 30);
  CHECK(all.n_fits == 1);
  CHECK(all.selected == ife(X, 30, fp).selected);

  CHECK(rfe(X, 6, 24, fp).selected == ife(X, 6, fp).selected);

  const auto r = rfe(X, 5, 0, fp);
  check_selection(r, X, 5);
  CHECK(r.n_fits > 1);
  CHECK(*r.step == 0);
  const std::set<std::string> sel(r.selected.begin(), r.selected.end());
  CHECK(sel.count(X.names[2]) == 1);
  CHECK(sel.count(X.names[17]) == 1);
  CHECK(rfe(X, 5, 0, fp).selected == r.selected);
  CHECK(rfe(X, 5, 0, fp, 3).selected == r.selected);

  const auto ones = rfe(X, 5, 1, fp);
  CHECK(ones.n_fits == 25);
  CHECK_THROWS_AS(rfe(X, 31, 1, fp), Error);
}

TEST_CASE("CIFE") {
  auto X = channel_data(2, 12, 1, 150, {}, 0.0, 9);
  for (std::size_t r = 0; r < X.n_rows; ++r) {
    X.at(r, 5) = X.at(r, 0);
    X.at(r, 20) = 3.0 * X.at(r, 0) + 1.0;
    X.labels[r] = X.at(r, 0) > 0.0;
  }
  const auto fp = forest(50, 5);
  const auto c = cife(X, 0.9, 8, fp);
  check_selection(c, X, 8);
  CHECK(c.n_clusters == 22);
  CHECK(*c.rho_thres == 0.9);
  CHECK(c.n_fits == 1);
  CHECK(c.cluster_seconds <= c.seconds);
  const std::set<std::string> sel(c.selected.begin(), c.selected.end());
  CHECK(sel.count(X.names[0]) + sel.count(X.names[5]) + sel.count(X.names[20]) == 1);

  for (std::size_t k : {1u, 8u, 24u}) CHECK(cife(X, 1.0 + 1e-9, k, fp).selected == ife(X, k, fp).selected);
  CHECK_THROWS_AS(cife(X, 0.9, 23, fp), Error);
  CHECK_THROWS_AS(cife(X, 0.0, 5, fp), Error);
  CHECK(to_string(SelectMethod::Cife) == std::string("CIFE"));
}
