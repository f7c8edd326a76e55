#include "mwd/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "mwd/common.hpp"

namespace mwd {

namespace {

void check_binary(std::span<const int> y, const char* what) {
  for (int v : y)
    if (v != 0 && v != 1) throw invalid_argument(std::string(what) + ": labels must be 0 or 1");
}

void check_pair(std::span<const int> a, std::span<const int> b, const char* what) {
  if (a.size() != b.size()) throw invalid_argument(std::string(what) + ": length mismatch");
  if (a.empty()) throw invalid_argument(std::string(what) + ": empty input");
  check_binary(a, what);
  check_binary(b, what);
}

}  // namespace

double weighted_f1(std::span<const int> y_true, std::span<const int> y_pred) {
  check_pair(y_true, y_pred, "weighted_f1");
  // cm[t][p]
  double cm[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < y_true.size(); ++i) cm[y_true[i]][y_pred[i]] += 1.0;
  const double n = static_cast<double>(y_true.size());
  double out = 0.0;
  for (int c = 0; c < 2; ++c) {
    const double tp = cm[c][c];
    const double fp = cm[1 - c][c];
    const double fn = cm[c][1 - c];
    const double denom = 2.0 * tp + fp + fn;
    const double f1 = denom > 0.0 ? 2.0 * tp / denom : 0.0;
    out += (tp + fn) / n * f1;
  }
  return out;
}

double cohens_kappa(std::span<const int> y_true, std::span<const int> y_pred) {
  check_pair(y_true, y_pred, "cohens_kappa");
  const double n = static_cast<double>(y_true.size());
  double agree = 0.0;
  double t1 = 0.0;
  double p1 = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    agree += (y_true[i] == y_pred[i]) ? 1.0 : 0.0;
    t1 += y_true[i];
    p1 += y_pred[i];
  }
  const double p0 = agree / n;
  const double pe = (t1 / n) * (p1 / n) + ((n - t1) / n) * ((n - p1) / n);
  if (pe >= 1.0) return p0 >= 1.0 ? 1.0 : 0.0;
  return (p0 - pe) / (1.0 - pe);
}

double roc_auc(std::span<const int> y_true, std::span<const double> scores) {
  if (y_true.size() != scores.size()) throw invalid_argument("roc_auc: length mismatch");
  check_binary(y_true, "roc_auc");
  const std::size_t n = y_true.size();
  std::size_t n_pos = 0;
  for (int v : y_true) n_pos += static_cast<std::size_t>(v);
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw invalid_argument("roc_auc: both classes must be present");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Sum of midranks of the positives, doubled to stay in integers.
  double rank2_pos = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double rank2 = static_cast<double>(i + 1 + j + 1);  // 2 x midrank
    for (std::size_t t = i; t <= j; ++t)
      if (y_true[order[t]] == 1) rank2_pos += rank2;
    i = j + 1;
  }
  const double np = static_cast<double>(n_pos);
  const double u2 = rank2_pos - np * (np + 1.0);  // 2U
  return u2 / (2.0 * np * static_cast<double>(n_neg));
}

}  // namespace mwd
