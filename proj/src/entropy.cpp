#include "mwd/entropy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

namespace mwd {

const char* short_name(Estimator e) {
  switch (e) {
    case Estimator::SampEn: return "MSE";
    case Estimator::PermEn: return "MPE";
    case Estimator::DispEn: return "MDE";
    case Estimator::FDispEn: return "MFDE";
  }
  return "?";
}

Series coarse_grain(std::span<const double> x, int tau) {
  if (tau < 1 || static_cast<std::size_t>(tau) > x.size())
    throw invalid_argument("coarse_grain: scale " + std::to_string(tau) + " out of range for length " +
                           std::to_string(x.size()));
  const auto t = static_cast<std::size_t>(tau);
  Series out(x.size() / t);
  for (std::size_t j = 0; j < out.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = j * t; i < (j + 1) * t; ++i) s += x[i];
    out[j] = s / static_cast<double>(t);
  }
  return out;
}

double sample_entropy(std::span<const double> y, int m, double r) {
  if (m < 1) throw invalid_argument("sample_entropy: m must be >= 1");
  if (!(r > 0.0)) throw invalid_argument("sample_entropy: r must be positive");
  const auto mm = static_cast<std::size_t>(m);
  if (y.size() < mm + 2) throw invalid_argument("sample_entropy: series shorter than m + 2");
  const std::size_t n_templates = y.size() - mm;
  std::uint64_t b = 0;
  std::uint64_t a = 0;
  const double* v = y.data();
  for (std::size_t i = 0; i + 1 < n_templates; ++i) {
    for (std::size_t j = i + 1; j < n_templates; ++j) {
      std::size_t k = 0;
      while (k < mm && std::abs(v[i + k] - v[j + k]) < r) ++k;
      if (k < mm) continue;
      ++b;
      if (std::abs(v[i + mm] - v[j + mm]) < r) ++a;
    }
  }
  if (a == 0 || b == 0)
    throw UndefinedEntropy("sample entropy undefined: A=" + std::to_string(a) + ", B=" + std::to_string(b), a, b);
  return -std::log(static_cast<double>(a) / static_cast<double>(b));
}

namespace {

std::size_t embedding_count(std::size_t n, int m, int d) {
  const auto span = static_cast<std::size_t>(m - 1) * static_cast<std::size_t>(d);
  if (n < span + 2) throw invalid_argument("series too short for embedding (m=" + std::to_string(m) + ", d=" +
                                           std::to_string(d) + ", N=" + std::to_string(n) + ")");
  return n - span;
}

// Shannon entropy of integer pattern counts, summed in key order.
template <typename Counts>
double shannon_of_counts(const Counts& counts, std::size_t total) {
  double h = 0.0;
  const double n = static_cast<double>(total);
  for (const auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

// Pattern histogram keyed by a dense integer code; falls back to a hash map
// when the code space is large.
class PatternHistogram {
 public:
  explicit PatternHistogram(std::uint64_t space) {
    if (space <= (1u << 20)) dense_.assign(space, 0);
  }
  void add(std::uint64_t code) {
    if (!dense_.empty()) ++dense_[code];
    else ++sparse_[code];
  }
  double entropy(std::size_t total) const {
    if (!dense_.empty()) return shannon_of_counts(dense_, total);
    std::vector<std::pair<std::uint64_t, std::uint32_t>> items(sparse_.begin(), sparse_.end());
    std::sort(items.begin(), items.end());
    std::vector<std::uint32_t> counts;
    counts.reserve(items.size());
    for (const auto& [k, c] : items) counts.push_back(c);
    return shannon_of_counts(counts, total);
  }

 private:
  std::vector<std::uint32_t> dense_;
  std::unordered_map<std::uint64_t, std::uint32_t> sparse_;
};

std::uint64_t factorial(int m) {
  std::uint64_t f = 1;
  for (int i = 2; i <= m; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

std::uint64_t ipow(std::uint64_t base, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

double permutation_entropy(std::span<const double> y, int m, int d) {
  if (m < 1 || m > 12) throw invalid_argument("permutation_entropy: m must be in [1, 12]");
  if (d < 1) throw invalid_argument("permutation_entropy: d must be >= 1");
  const std::size_t n_vec = embedding_count(y.size(), m, d);
  PatternHistogram hist(factorial(m));
  std::array<int, 12> order{};
  for (std::size_t i = 0; i < n_vec; ++i) {
    // Stable insertion sort of positions by value.
    for (int k = 0; k < m; ++k) {
      const double v = y[i + static_cast<std::size_t>(k * d)];
      int pos = k;
      while (pos > 0 && y[i + static_cast<std::size_t>(order[pos - 1] * d)] > v) {
        order[pos] = order[pos - 1];
        --pos;
      }
      order[pos] = k;
    }
    // Lehmer code of the permutation.
    std::uint64_t code = 0;
    for (int k = 0; k < m; ++k) {
      int smaller_after = 0;
      for (int j = k + 1; j < m; ++j) smaller_after += order[j] < order[k];
      code = code * static_cast<std::uint64_t>(m - k) + static_cast<std::uint64_t>(smaller_after);
    }
    hist.add(code);
  }
  return hist.entropy(n_vec);
}

std::vector<int> dispersion_classes(std::span<const double> y, int c, NcdfParams ncdf) {
  if (c < 2) throw invalid_argument("dispersion: c must be >= 2");
  if (!(ncdf.sigma > 0.0)) throw UndefinedEntropy("dispersion: zero standard deviation");
  std::vector<int> z(y.size());
  const double inv = 1.0 / (ncdf.sigma * std::sqrt(2.0));
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double u = 0.5 * std::erfc(-(y[i] - ncdf.mu) * inv);
    const double k = std::round(static_cast<double>(c) * u + 0.5);
    z[i] = static_cast<int>(std::clamp(k, 1.0, static_cast<double>(c)));
  }
  return z;
}

namespace {

NcdfParams estimate_ncdf(std::span<const double> y) {
  if (y.size() < 2) throw invalid_argument("dispersion: series too short");
  const double sd = sample_sd(y);
  if (!(sd > 0.0)) throw UndefinedEntropy("dispersion: zero standard deviation");
  return {mean(y), sd};
}

}  // namespace

double dispersion_entropy(std::span<const double> y, int m, int c, int d) {
  return dispersion_entropy(y, m, c, d, estimate_ncdf(y));
}

double dispersion_entropy(std::span<const double> y, int m, int c, int d, NcdfParams ncdf) {
  if (m < 1 || d < 1) throw invalid_argument("dispersion_entropy: m and d must be >= 1");
  const std::size_t n_vec = embedding_count(y.size(), m, d);
  const auto z = dispersion_classes(y, c, ncdf);
  PatternHistogram hist(ipow(static_cast<std::uint64_t>(c), m));
  for (std::size_t i = 0; i < n_vec; ++i) {
    std::uint64_t code = 0;
    for (int k = 0; k < m; ++k) code = code * static_cast<std::uint64_t>(c) + static_cast<std::uint64_t>(z[i + static_cast<std::size_t>(k * d)] - 1);
    hist.add(code);
  }
  return hist.entropy(n_vec);
}

double fluctuation_dispersion_entropy(std::span<const double> y, int m, int c, int d) {
  return fluctuation_dispersion_entropy(y, m, c, d, estimate_ncdf(y));
}

double fluctuation_dispersion_entropy(std::span<const double> y, int m, int c, int d, NcdfParams ncdf) {
  if (m < 2) throw invalid_argument("fluctuation_dispersion_entropy: m must be >= 2");
  if (d < 1) throw invalid_argument("fluctuation_dispersion_entropy: d must be >= 1");
  const std::size_t n_vec = embedding_count(y.size(), m, d);
  const auto z = dispersion_classes(y, c, ncdf);
  const auto base = static_cast<std::uint64_t>(2 * c - 1);
  PatternHistogram hist(ipow(base, m - 1));
  for (std::size_t i = 0; i < n_vec; ++i) {
    std::uint64_t code = 0;
    for (int k = 0; k + 1 < m; ++k) {
      const int diff = z[i + static_cast<std::size_t>((k + 1) * d)] - z[i + static_cast<std::size_t>(k * d)];
      code = code * base + static_cast<std::uint64_t>(diff + c - 1);
    }
    hist.add(code);
  }
  return hist.entropy(n_vec);
}

double normalized_shannon(std::span<const double> power) {
  if (power.size() < 2) throw UndefinedEntropy("normalized entropy needs at least 2 bins");
  double total = 0.0;
  for (double p : power) {
    if (p < 0.0 || !std::isfinite(p)) throw invalid_argument("normalized entropy: invalid power value");
    total += p;
  }
  if (!(total > 0.0)) throw UndefinedEntropy("normalized entropy of an all-zero distribution");
  double h = 0.0;
  for (double p : power) {
    if (p <= 0.0) continue;
    const double q = p / total;
    h -= q * std::log(q);
  }
  return h / std::log(static_cast<double>(power.size()));
}

double spectral_entropy(const Psd& psd, std::optional<Band> band) {
  std::vector<double> sel;
  for (std::size_t k = 0; k < psd.freqs.size(); ++k) {
    const double f = psd.freqs[k];
    const bool in = band ? (f >= band->lo && f < band->hi) : f > 0.0;
    if (in) sel.push_back(psd.power[k]);
  }
  if (sel.size() < 2) throw invalid_argument("spectral_entropy: band holds fewer than 2 frequency bins");
  return normalized_shannon(sel);
}

double spectral_entropy(std::span<const double> y, double fs, std::optional<Band> band, const WelchConfig& cfg) {
  if (y.size() < 16) throw invalid_argument("spectral_entropy: series shorter than 16 samples");
  if (band && !(band->lo >= 0.0 && band->lo < band->hi && band->hi <= fs / 2.0))
    throw invalid_argument("spectral_entropy: band outside (0, fs/2)");
  return spectral_entropy(welch_psd(y, fs, cfg), band);
}

double wavelet_log_energy_entropy(std::span<const double> coeffs) {
  std::vector<double> energy(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) energy[i] = coeffs[i] * coeffs[i];
  return normalized_shannon(energy);
}

std::size_t min_viable_length(Estimator e, const EntropyParams& p) {
  switch (e) {
    case Estimator::SampEn: {
      // Conventional N >= 10^m rule for stable template statistics.
      std::size_t n = 1;
      for (int i = 0; i < p.m; ++i) n *= 10;
      return std::max<std::size_t>(n, static_cast<std::size_t>(p.m) + 2);
    }
    case Estimator::PermEn:
    case Estimator::DispEn:
    case Estimator::FDispEn:
      return static_cast<std::size_t>(p.m - 1) * static_cast<std::size_t>(p.d) + 2;
  }
  return 0;
}

std::vector<ScaleValue> multiscale(Estimator e, std::span<const double> x, const EntropyParams& params,
                                   ShortSeries policy) {
  if (params.scales.empty()) throw invalid_argument("multiscale: empty scale list");
  const std::size_t viable = min_viable_length(e, params);
  for (int tau : params.scales) {
    if (tau < 1) throw invalid_argument("multiscale: scales must be positive");
    if (policy == ShortSeries::Error && x.size() / static_cast<std::size_t>(tau) < viable)
      throw invalid_argument(std::string("multiscale: scale ") + std::to_string(tau) + " leaves fewer than " +
                             std::to_string(viable) + " points for " + short_name(e));
  }

  std::optional<NcdfParams> ncdf;
  bool ncdf_undefined = false;
  if (e == Estimator::DispEn || e == Estimator::FDispEn) {
    try {
      ncdf = estimate_ncdf(x);
    } catch (const Error&) {
      if (policy == ShortSeries::Error) throw;
      ncdf_undefined = true;
    }
  }

  std::vector<ScaleValue> out;
  out.reserve(params.scales.size());
  for (int tau : params.scales) {
    ScaleValue sv{tau, std::nullopt};
    if (static_cast<std::size_t>(tau) > x.size() || x.size() / static_cast<std::size_t>(tau) < viable || ncdf_undefined) {
      out.push_back(sv);
      continue;
    }
    const Series y = coarse_grain(x, tau);
    try {
      switch (e) {
        case Estimator::SampEn: sv.value = sample_entropy(y, params.m, params.r); break;
        case Estimator::PermEn: sv.value = permutation_entropy(y, params.m, params.d); break;
        case Estimator::DispEn: sv.value = dispersion_entropy(y, params.m, params.c, params.d, *ncdf); break;
        case Estimator::FDispEn: sv.value = fluctuation_dispersion_entropy(y, params.m, params.c, params.d, *ncdf); break;
      }
    } catch (const UndefinedEntropy&) {
      sv.value = std::nullopt;
    }
    out.push_back(sv);
  }
  return out;
}

}  // namespace mwd
