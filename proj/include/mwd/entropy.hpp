#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mwd/common.hpp"
#include "mwd/spectral.hpp"

namespace mwd {

// Raised when an estimator has no principled value for the input, e.g. sample
// entropy with no template matches. Carries the match counts when relevant.
class UndefinedEntropy : public Error {
 public:
  UndefinedEntropy(const std::string& what, std::uint64_t a = 0, std::uint64_t b = 0)
      : Error(ErrorKind::Undefined, what), a_(a), b_(b) {}
  std::uint64_t matches_m_plus_1() const { return a_; }
  std::uint64_t matches_m() const { return b_; }

 private:
  std::uint64_t a_;
  std::uint64_t b_;
};

enum class Estimator { SampEn, PermEn, DispEn, FDispEn };

const char* short_name(Estimator e);  // "MSE", "MPE", "MDE", "MFDE"

struct EntropyParams {
  int m{2};
  double r{0.2};  // sample entropy tolerance (absolute)
  int c{6};       // dispersion classes
  int d{1};       // delay
  std::vector<int> scales{1};
};

// Parameters of the normal CDF used by the dispersion family.
struct NcdfParams {
  double mu;
  double sigma;
};

// Non-overlapping window averages; the trailing remainder is dropped.
Series coarse_grain(std::span<const double> x, int tau);

// -ln(A/B) over the first N - m templates, Chebyshev distance strictly below r,
// self-matches excluded. Throws UndefinedEntropy when A or B is zero.
double sample_entropy(std::span<const double> y, int m, double r);

// Shannon entropy (nats) of ordinal-pattern frequencies. Ties rank the earlier
// sample lower.
double permutation_entropy(std::span<const double> y, int m, int d);

// Maps samples to 1..c through the normal CDF with the given parameters.
std::vector<int> dispersion_classes(std::span<const double> y, int c, NcdfParams ncdf);

// NCDF parameters default to the sample mean and sample SD of y.
double dispersion_entropy(std::span<const double> y, int m, int c, int d);
double dispersion_entropy(std::span<const double> y, int m, int c, int d, NcdfParams ncdf);
double fluctuation_dispersion_entropy(std::span<const double> y, int m, int c, int d);
double fluctuation_dispersion_entropy(std::span<const double> y, int m, int c, int d, NcdfParams ncdf);

// -sum p ln p / ln(B) over the B given nonnegative power values.
double normalized_shannon(std::span<const double> power);

// Normalized Shannon entropy of the Welch PSD restricted to `band`
// (all bins above DC when no band is given).
double spectral_entropy(std::span<const double> y, double fs, std::optional<Band> band,
                        const WelchConfig& cfg = {});
double spectral_entropy(const Psd& psd, std::optional<Band> band);

// Normalized Shannon entropy of the coefficient energy distribution.
double wavelet_log_energy_entropy(std::span<const double> coeffs);

// Shortest coarse-grained series the multiscale driver accepts for an estimator.
std::size_t min_viable_length(Estimator e, const EntropyParams& p);

struct ScaleValue {
  int scale;
  std::optional<double> value;  // nullopt = undefined at this scale
};

enum class ShortSeries { Error, Undefined };

// Coarse-grains x at every scale and applies the estimator. Dispersion NCDF
// parameters come from x itself (scale 1) and are reused at every scale; the
// sample-entropy tolerance is params.r at every scale.
std::vector<ScaleValue> multiscale(Estimator e, std::span<const double> x, const EntropyParams& params,
                                   ShortSeries policy = ShortSeries::Error);

}  // namespace mwd
