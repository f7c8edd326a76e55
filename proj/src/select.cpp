#include "mwd/select.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace mwd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void check_labels(const FeatureMatrix& X) {
  bool s[2] = {false, false};
  for (int v : X.labels) {
    if (v != 0 && v != 1) throw invalid_argument("labels must be 0 or 1");
    s[v] = true;
  }
  if (!s[0] || !s[1]) throw invalid_argument("both classes must be present");
}

// Indices sorted by importance, descending, lower index first on ties.
std::vector<std::size_t> importance_order(const std::vector<double>& imp) {
  std::vector<std::size_t> order(imp.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return imp[a] > imp[b]; });
  return order;
}

void check_k(std::size_t k, std::size_t n, const char* what) {
  if (k < 1 || k > n)
    throw invalid_argument(std::string(what) + ": k = " + std::to_string(k) + " outside 1.." + std::to_string(n));
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
};

}  // namespace

double mann_whitney_p(std::span<const double> values, std::span<const int> labels) {
  if (values.size() != labels.size()) throw invalid_argument("mann_whitney_p: length mismatch");
  const std::size_t n = values.size();
  double n1 = 0.0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw invalid_argument("mann_whitney_p: labels must be 0 or 1");
    n1 += l;
  }
  const double n2 = static_cast<double>(n) - n1;
  if (n1 == 0.0 || n2 == 0.0) throw invalid_argument("mann_whitney_p: both classes must be present");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  double r1 = 0.0;
  double tie_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    const double t = static_cast<double>(j - i + 1);
    tie_sum += t * t * t - t;
    for (std::size_t q = i; q <= j; ++q)
      if (labels[order[q]] == 1) r1 += mid;
    i = j + 1;
  }
  const double nn = static_cast<double>(n);
  const double u = r1 - n1 * (n1 + 1.0) / 2.0;
  const double mu = n1 * n2 / 2.0;
  const double var = n1 * n2 / 12.0 * ((nn + 1.0) - tie_sum / (nn * (nn - 1.0)));
  if (!(var > 0.0)) return 1.0;
  const double z = std::max(0.0, std::abs(u - mu) - 0.5) / std::sqrt(var);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

std::vector<ChannelCount> salient_feature_counts(const FeatureMatrix& X, double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw invalid_argument("salient_feature_counts: alpha must be in [0, 1)");
  X.validate();
  check_labels(X);
  std::vector<ChannelCount> out;
  for (const auto& ch : X.channels()) out.push_back({ch, 0, 0});
  for (std::size_t c = 0; c < X.n_cols(); ++c) {
    auto it = std::find_if(out.begin(), out.end(), [&](const ChannelCount& cc) { return cc.channel == X.channel_of[c]; });
    ++it->total;
    if (mann_whitney_p(X.column(c), X.labels) < alpha) ++it->salient;
  }
  return out;
}

const char* to_string(RankMethod m) { return m == RankMethod::PValue ? "pvalue" : "auc"; }

RankMethod rank_method_from_string(const std::string& s) {
  if (s == "pvalue") return RankMethod::PValue;
  if (s == "auc") return RankMethod::Auc;
  throw invalid_argument("unknown channel ranking method '" + s + "'");
}

std::vector<std::string> ChannelRanking::top(std::size_t k) const {
  if (k > entries.size()) throw invalid_argument("ranking has only " + std::to_string(entries.size()) + " channels");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(entries[i].channel);
  return out;
}

ChannelRanking rank_channels(const FeatureMatrix& X, RankMethod method, const ClassifierSpec& spec,
                             std::uint64_t seed, unsigned threads, double alpha) {
  const auto t0 = Clock::now();
  ChannelRanking r;
  r.method = method;
  if (method == RankMethod::PValue) {
    for (const auto& cc : salient_feature_counts(X, alpha)) r.entries.push_back({cc.channel, static_cast<double>(cc.salient)});
  } else {
    X.validate();
    check_labels(X);
    for (const auto& ch : X.channels()) {
      const auto cols = X.columns_for_channels({ch});
      const auto sub = X.select_columns(cols);
      r.entries.push_back({ch, loso_cv(sub, spec, seed, threads).auc});
    }
  }
  std::stable_sort(r.entries.begin(), r.entries.end(),
                   [](const ChannelScore& a, const ChannelScore& b) { return a.score > b.score; });
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<CurvePoint> channel_curve(const FeatureMatrix& X, const ChannelRanking& ranking, std::size_t k_max,
                                      const ClassifierSpec& spec, std::uint64_t seed, unsigned threads) {
  if (k_max < 1 || k_max > ranking.entries.size())
    throw invalid_argument("channel_curve: K_max must be in 1.." + std::to_string(ranking.entries.size()));
  std::vector<CurvePoint> out;
  for (std::size_t k = 1; k <= k_max; ++k) {
    CurvePoint p;
    p.k = k;
    p.channels = ranking.top(k);
    p.eval = loso_cv(X.select_columns(X.columns_for_channels(p.channels)), spec, seed, threads);
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------

const char* to_string(SelectMethod m) {
  switch (m) {
    case SelectMethod::Rfe: return "RFE";
    case SelectMethod::Ife: return "IFE";
    case SelectMethod::Cife: return "CIFE";
  }
  return "?";
}

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw invalid_argument("pearson: length mismatch");
  if (a.size() < 2) throw invalid_argument("pearson: need at least 2 values");
  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

ClusterMap correlation_clusters(const FeatureMatrix& X, double rho_thres, unsigned threads) {
  if (!(rho_thres > 0.0)) throw invalid_argument("correlation_clusters: rho_thres must be positive");
  const std::size_t k = X.n_cols();
  const std::size_t n = X.n_rows;
  if (n < 2) throw invalid_argument("correlation_clusters: need at least 2 rows");

  // Standardized columns, so rho is a scaled dot product. Constant columns stay zero.
  std::vector<double> z(k * n, 0.0);
  std::vector<char> constant(k, 0);
  for (std::size_t c = 0; c < k; ++c) {
    const auto col = X.column(c);
    const double m = mean(col);
    double ss = 0.0;
    for (double v : col) ss += (v - m) * (v - m);
    if (!(ss > 0.0)) {
      constant[c] = 1;
      continue;
    }
    const double inv = 1.0 / std::sqrt(ss);
    for (std::size_t r = 0; r < n; ++r) z[c * n + r] = (col[r] - m) * inv;
  }

  // |rho| for the upper triangle, one row of the matrix per work item.
  std::vector<std::vector<double>> abs_rho(k);
  parallel_for(k, threads, [&](std::size_t i) {
    auto& row = abs_rho[i];
    row.assign(k - i, 0.0);
    if (constant[i]) return;
    const double* zi = z.data() + i * n;
    for (std::size_t j = i + 1; j < k; ++j) {
      if (constant[j]) continue;
      const double* zj = z.data() + j * n;
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += zi[r] * zj[r];
      row[j - i] = std::min(1.0, std::abs(s));
    }
  });
  auto rho = [&](std::size_t a, std::size_t b) { return a < b ? abs_rho[a][b - a] : abs_rho[b][a - b]; };

  UnionFind uf(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if (rho(i, j) >= rho_thres) uf.unite(i, j);

  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t c = 0; c < k; ++c) members[uf.find(c)].push_back(c);

  ClusterMap cm;
  cm.cluster_of.assign(k, 0);
  for (std::size_t root = 0; root < k; ++root) {
    const auto& mem = members[root];
    if (mem.empty()) continue;
    std::size_t best = mem.front();
    double best_score = -1.0;
    for (std::size_t a : mem) {
      double s = 0.0;
      for (std::size_t b : mem)
        if (a != b) s += rho(a, b);
      s = mem.size() > 1 ? s / static_cast<double>(mem.size() - 1) : 0.0;
      if (s > best_score) {
        best_score = s;
        best = a;
      }
    }
    cm.representatives.push_back(best);
  }
  std::sort(cm.representatives.begin(), cm.representatives.end());
  for (std::size_t id = 0; id < cm.representatives.size(); ++id) {
    const std::size_t root = uf.find(cm.representatives[id]);
    for (std::size_t c : members[root]) cm.cluster_of[c] = id;
  }
  return cm;
}

FeatureSelection ife(const FeatureMatrix& X, std::size_t k, const ForestParams& fp, unsigned threads) {
  check_k(k, X.n_cols(), "ife");
  const auto t0 = Clock::now();
  const auto forest = train_random_forest(X, X.labels, fp, threads);
  const auto order = importance_order(forest.importances);
  FeatureSelection s;
  s.method = SelectMethod::Ife;
  s.k = k;
  s.n_fits = 1;
  for (std::size_t i = 0; i < k; ++i) {
    s.selected.push_back(X.names[order[i]]);
    s.importance.push_back(forest.importances[order[i]]);
  }
  s.seconds = seconds_since(t0);
  return s;
}

FeatureSelection rfe(const FeatureMatrix& X, std::size_t k, std::size_t step, const ForestParams& fp,
                     unsigned threads) {
  check_k(k, X.n_cols(), "rfe");
  const auto t0 = Clock::now();
  FeatureSelection s;
  s.method = SelectMethod::Rfe;
  s.k = k;
  s.step = step;

  std::vector<std::size_t> remaining(X.n_cols());
  std::iota(remaining.begin(), remaining.end(), 0);
  std::vector<double> last_imp;
  std::vector<std::size_t> last_order;
  do {
    const FeatureMatrix sub = X.select_columns(remaining);
    const auto forest = train_random_forest(sub, sub.labels, fp, threads);
    ++s.n_fits;
    last_imp = forest.importances;
    last_order = importance_order(last_imp);
    if (remaining.size() == k) break;
    const std::size_t want = step > 0 ? step : std::max<std::size_t>(1, remaining.size() / 10);
    const std::size_t keep = remaining.size() - std::min(want, remaining.size() - k);
    std::vector<std::size_t> kept_pos(last_order.begin(), last_order.begin() + static_cast<std::ptrdiff_t>(keep));
    if (keep == k) {
      // Final round: keep the ranking of this fit, no refit.
      std::vector<std::size_t> next;
      std::vector<double> imp;
      for (std::size_t p : kept_pos) {
        next.push_back(remaining[p]);
        imp.push_back(last_imp[p]);
      }
      for (std::size_t i = 0; i < next.size(); ++i) {
        s.selected.push_back(X.names[next[i]]);
        s.importance.push_back(imp[i]);
      }
      s.seconds = seconds_since(t0);
      return s;
    }
    std::sort(kept_pos.begin(), kept_pos.end());
    std::vector<std::size_t> next;
    for (std::size_t p : kept_pos) next.push_back(remaining[p]);
    remaining = std::move(next);
  } while (true);

  for (std::size_t p : last_order) {
    s.selected.push_back(X.names[remaining[p]]);
    s.importance.push_back(last_imp[p]);
  }
  s.seconds = seconds_since(t0);
  return s;
}

FeatureSelection cife(const FeatureMatrix& X, double rho_thres, std::size_t k, const ForestParams& fp,
                      unsigned threads) {
  check_k(k, X.n_cols(), "cife");
  const auto t0 = Clock::now();
  const ClusterMap cm = correlation_clusters(X, rho_thres, threads);
  const double cluster_s = seconds_since(t0);
  if (k > cm.n_clusters())
    throw invalid_argument("cife: k = " + std::to_string(k) + " exceeds the " + std::to_string(cm.n_clusters()) +
                           " correlation clusters");
  const FeatureMatrix reps = X.select_columns(cm.representatives);
  const auto forest = train_random_forest(reps, reps.labels, fp, threads);
  const auto order = importance_order(forest.importances);
  FeatureSelection s;
  s.method = SelectMethod::Cife;
  s.k = k;
  s.rho_thres = rho_thres;
  s.n_fits = 1;
  s.n_clusters = cm.n_clusters();
  s.cluster_seconds = cluster_s;
  for (std::size_t i = 0; i < k; ++i) {
    s.selected.push_back(reps.names[order[i]]);
    s.importance.push_back(forest.importances[order[i]]);
  }
  s.seconds = seconds_since(t0);
  return s;
}

}  // namespace mwd
