#pragma once

#include <span>
#include <string>
#include <vector>

#include "mwd/common.hpp"

namespace mwd {

struct SubBand {
  std::string name;  // "cA7", "cD7", ..., "cD1"
  int level;
  Series coeffs;
};

// Full orthonormal decomposition [cA_L, cD_L, ..., cD1]. The retained bands
// used for features are the first five: cA7, cD7, cD6, cD5, cD4.
struct WaveletDecomposition {
  std::vector<SubBand> bands;
  std::size_t padded_length{0};

  std::vector<const SubBand*> retained() const;
  double total_energy() const;
};

inline constexpr int kDwtLevels = 7;
inline constexpr int kRetainedBands = 5;

// Daubechies-4 (8 taps) decomposition low-pass filter.
std::span<const double> db4_lowpass();

// Periodized db4 DWT. The input is zero-padded to a multiple of 2^levels so
// every level is an exact orthonormal split. Requires N >= 2^levels.
WaveletDecomposition dwt_decompose(std::span<const double> y, int levels = kDwtLevels);

// Inverse of dwt_decompose, returning the padded-length signal.
Series dwt_reconstruct(const WaveletDecomposition& w);

}  // namespace mwd
