#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mwd/common.hpp"

namespace mwd {

enum class Window { Hann, Rectangular };

struct WelchConfig {
  double segment_s{1.0};
  double overlap{0.5};
  Window window{Window::Hann};
  bool detrend_constant{true};
};

// One-sided power spectral density (density scaling, units^2 / Hz).
struct Psd {
  std::vector<double> freqs;
  std::vector<double> power;
};

// Half-open frequency interval [lo, hi).
struct Band {
  double lo;
  double hi;
};

// Welch-averaged periodogram. Segments are round(segment_s * fs) samples,
// clipped to the series length.
Psd welch_psd(std::span<const double> y, double fs, const WelchConfig& cfg = {});

// Real forward DFT magnitudes squared, |X_k|^2 for k = 0..n/2.
std::vector<double> power_spectrum(std::span<const double> y);

}  // namespace mwd
