// Naive reference implementations used as test oracles. These follow the
// definitions literally (explicit templates, explicit pattern vectors, full
// pair enumeration) and share no code with the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

inline std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

inline double sd_unbiased(const std::vector<double>& x) {
  long double m = 0;
  for (double v : x) m += v;
  m /= x.size();
  long double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return static_cast<double>(std::sqrt(s / (x.size() - 1)));
}

inline double shannon(const std::map<std::vector<int>, long>& counts, long total) {
  double h = 0.0;
  for (const auto& [k, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log(p);
  }
  return h;
}

// Returns NaN when undefined.
inline double sample_entropy(const std::vector<double>& y, int m, double r) {
  const std::size_t n = y.size();
  const std::size_t count = n - static_cast<std::size_t>(m);
  auto templ = [&](std::size_t i, int len) { return std::vector<double>(y.begin() + i, y.begin() + i + len); };
  auto close = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::fabs(a[k] - b[k]));
    return d < r;
  };
  long A = 0, B = 0;
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = i + 1; j < count; ++j) {
      if (close(templ(i, m), templ(j, m))) ++B;
      if (close(templ(i, m + 1), templ(j, m + 1))) ++A;
    }
  if (A == 0 || B == 0) return std::nan("");
  return -std::log(static_cast<double>(A) / static_cast<double>(B));
}

inline double permutation_entropy(const std::vector<double>& y, int m, int d) {
  std::map<std::vector<int>, long> counts;
  const std::size_t span = static_cast<std::size_t>((m - 1) * d);
  long total = 0;
  for (std::size_t i = 0; i + span < y.size(); ++i) {
    std::vector<int> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return y[i + a * d] < y[i + b * d]; });
    ++counts[idx];
    ++total;
  }
  return shannon(counts, total);
}

inline std::vector<int> classes(const std::vector<double>& y, int c) {
  long double mu = 0;
  for (double v : y) mu += v;
  mu /= y.size();
  const double sigma = sd_unbiased(y);
  std::vector<int> z;
  for (double v : y) {
    const double u = 0.5 * (1.0 + std::erf((v - static_cast<double>(mu)) / (sigma * std::sqrt(2.0))));
    int k = static_cast<int>(std::lround(c * u + 0.5));
    z.push_back(std::min(c, std::max(1, k)));
  }
  return z;
}

inline double dispersion_entropy(const std::vector<double>& y, int m, int c, int d) {
  const auto z = classes(y, c);
  std::map<std::vector<int>, long> counts;
  long total = 0;
  const std::size_t span = static_cast<std::size_t>((m - 1) * d);
  for (std::size_t i = 0; i + span < z.size(); ++i) {
    std::vector<int> pat;
    for (int k = 0; k < m; ++k) pat.push_back(z[i + k * d]);
    ++counts[pat];
    ++total;
  }
  return shannon(counts, total);
}

inline double fluctuation_dispersion_entropy(const std::vector<double>& y, int m, int c, int d) {
  const auto z = classes(y, c);
  std::map<std::vector<int>, long> counts;
  long total = 0;
  const std::size_t span = static_cast<std::size_t>((m - 1) * d);
  for (std::size_t i = 0; i + span < z.size(); ++i) {
    std::vector<int> pat;
    for (int k = 0; k + 1 < m; ++k) pat.push_back(z[i + (k + 1) * d] - z[i + k * d]);
    ++counts[pat];
    ++total;
  }
  return shannon(counts, total);
}

// Brute-force metrics.
inline double weighted_f1(const std::vector<int>& t, const std::vector<int>& p) {
  double out = 0.0;
  for (int cls = 0; cls < 2; ++cls) {
    long tp = 0, fp = 0, fn = 0, support = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] == cls) ++support;
      if (t[i] == cls && p[i] == cls) ++tp;
      if (t[i] != cls && p[i] == cls) ++fp;
      if (t[i] == cls && p[i] != cls) ++fn;
    }
    const double prec = (tp + fp) ? static_cast<double>(tp) / (tp + fp) : 0.0;
    const double rec = (tp + fn) ? static_cast<double>(tp) / (tp + fn) : 0.0;
    const double f1 = (prec + rec) > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    out += static_cast<double>(support) / t.size() * f1;
  }
  return out;
}

inline double kappa(const std::vector<int>& t, const std::vector<int>& p) {
  const double n = static_cast<double>(t.size());
  long cm[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < t.size(); ++i) ++cm[t[i]][p[i]];
  const double p0 = (cm[0][0] + cm[1][1]) / n;
  const double pe = ((cm[0][0] + cm[0][1]) / n) * ((cm[0][0] + cm[1][0]) / n) +
                    ((cm[1][0] + cm[1][1]) / n) * ((cm[0][1] + cm[1][1]) / n);
  if (pe == 1.0) return 1.0;
  return (p0 - pe) / (1.0 - pe);
}

inline double auc(const std::vector<int>& t, const std::vector<double>& s) {
  double won = 0.0;
  long pairs = 0;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j)
      if (t[i] == 1 && t[j] == 0) {
        ++pairs;
        if (s[i] > s[j]) won += 1.0;
        else if (s[i] == s[j]) won += 0.5;
      }
  return won / static_cast<double>(pairs);
}

}  // namespace oracle
