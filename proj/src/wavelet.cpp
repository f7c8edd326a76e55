#include "mwd/wavelet.hpp"

#include <array>

namespace mwd {

namespace {

constexpr std::array<double, 8> kDb4Lo = {
    0.23037781330885523, 0.7148465705525415,  0.6308807679295904,   -0.02798376941698385,
    -0.18703481171888114, 0.030841381835986965, 0.032883011666982945, -0.010597401784997278};

std::array<double, 8> quadrature_mirror(const std::array<double, 8>& h) {
  std::array<double, 8> g{};
  for (std::size_t n = 0; n < h.size(); ++n) g[n] = ((n % 2 == 0) ? 1.0 : -1.0) * h[h.size() - 1 - n];
  return g;
}

const std::array<double, 8> kDb4Hi = quadrature_mirror(kDb4Lo);

void analysis_step(const Series& x, Series& approx, Series& detail) {
  const std::size_t n = x.size();
  const std::size_t half = n / 2;
  approx.assign(half, 0.0);
  detail.assign(half, 0.0);
  for (std::size_t k = 0; k < half; ++k) {
    double a = 0.0;
    double d = 0.0;
    for (std::size_t t = 0; t < kDb4Lo.size(); ++t) {
      const double v = x[(2 * k + t) % n];
      a += kDb4Lo[t] * v;
      d += kDb4Hi[t] * v;
    }
    approx[k] = a;
    detail[k] = d;
  }
}

Series synthesis_step(const Series& approx, const Series& detail) {
  const std::size_t n = 2 * approx.size();
  Series x(n, 0.0);
  for (std::size_t k = 0; k < approx.size(); ++k)
    for (std::size_t t = 0; t < kDb4Lo.size(); ++t) x[(2 * k + t) % n] += kDb4Lo[t] * approx[k] + kDb4Hi[t] * detail[k];
  return x;
}

}  // namespace

std::span<const double> db4_lowpass() { return kDb4Lo; }

std::vector<const SubBand*> WaveletDecomposition::retained() const {
  std::vector<const SubBand*> out;
  for (std::size_t i = 0; i < bands.size() && i < static_cast<std::size_t>(kRetainedBands); ++i) out.push_back(&bands[i]);
  return out;
}

double WaveletDecomposition::total_energy() const {
  double e = 0.0;
  for (const auto& b : bands)
    for (double c : b.coeffs) e += c * c;
  return e;
}

WaveletDecomposition dwt_decompose(std::span<const double> y, int levels) {
  if (levels < 1) throw invalid_argument("dwt: levels must be >= 1");
  const std::size_t block = std::size_t{1} << levels;
  if (y.size() < block)
    throw invalid_argument("dwt: series of length " + std::to_string(y.size()) + " too short for " +
                           std::to_string(levels) + " levels");
  WaveletDecomposition w;
  w.padded_length = (y.size() + block - 1) / block * block;
  Series approx(y.begin(), y.end());
  approx.resize(w.padded_length, 0.0);

  std::vector<SubBand> details;
  for (int level = 1; level <= levels; ++level) {
    Series a;
    Series d;
    analysis_step(approx, a, d);
    details.push_back({"cD" + std::to_string(level), level, std::move(d)});
    approx = std::move(a);
  }
  w.bands.push_back({"cA" + std::to_string(levels), levels, std::move(approx)});
  for (auto it = details.rbegin(); it != details.rend(); ++it) w.bands.push_back(std::move(*it));
  return w;
}

Series dwt_reconstruct(const WaveletDecomposition& w) {
  if (w.bands.empty()) throw invalid_argument("dwt_reconstruct: empty decomposition");
  Series approx = w.bands.front().coeffs;
  for (std::size_t i = 1; i < w.bands.size(); ++i) approx = synthesis_step(approx, w.bands[i].coeffs);
  return approx;
}

}  // namespace mwd
