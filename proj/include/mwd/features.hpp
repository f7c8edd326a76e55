#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mwd/common.hpp"
#include "mwd/entropy.hpp"
#include "mwd/signal.hpp"
#include "mwd/spectral.hpp"
#include "mwd/wavelet.hpp"

namespace mwd {

// ---------------------------------------------------------------------------
// Feature-name grammar
//
//   <CH>_Mean | <CH>_MeanPower | <CH>_FirstDiff | <CH>_SecondDiff | <CH>_HjComp
//   <CH>_PSD_<band>        band in {theta, alpha, beta, gamma}
//   <CH>_SpecEnt_<band>    band in {theta, alpha, beta, gamma, full}
//   <CH>_<SB>-WL-<stat>    SB in {cA7, cD7, cD6, cD5, cD4},
//                          stat in {MeanPower, Mean, STD, RAM, Ent, SpecEnt}
//   <CH>_<E>-<s>           E in {MSE, MPE, MDE, MFDE}, s in 1..20
//   <CH>_WL-<E>-<SB>-<s>   E in {MPE, MDE, MFDE}

enum class FeatureFamily {
  TimeStat,        // stat = Mean | MeanPower | FirstDiff | SecondDiff | HjComp
  BandPower,       // band
  SpectralEntropy, // band (or "full")
  WaveletStat,     // sub_band + stat
  TimeEntropy,     // estimator + scale
  WaveletEntropy,  // estimator + sub_band + scale
};

struct FeatureKey {
  std::string channel;
  FeatureFamily family{FeatureFamily::TimeStat};
  std::string stat;
  std::string band;
  std::string sub_band;
  Estimator estimator{Estimator::SampEn};
  int scale{0};

  bool operator==(const FeatureKey&) const = default;
};

inline constexpr int kNumScales = 20;
inline constexpr std::size_t kFeaturesPerChannel = 424;
inline constexpr std::size_t kFeaturesPerChannelNoMse = 404;

std::string format_feature_name(const FeatureKey& key);
// Throws Error(Format) for names outside the grammar.
FeatureKey parse_feature_name(const std::string& name);

// Canonical per-channel ordering of feature suffixes (names without "<CH>_").
const std::vector<std::string>& channel_feature_suffixes(bool include_mse);

// ---------------------------------------------------------------------------

struct NamedValue {
  std::string name;
  std::optional<double> value;  // nullopt = undefined
};

struct EegBand {
  const char* name;
  Band range;
};

// theta [4,8), alpha [8,13), beta [13,30), gamma [30,45) Hz.
const std::vector<EegBand>& eeg_bands();

struct FeatureConfig {
  bool include_mse{true};
  int sampen_m{2};
  double sampen_r_factor{0.15};  // r = factor * SD of the scale-1 series
  int perm_m{4};
  int perm_d{1};
  int disp_m{3};
  int disp_c{6};
  int disp_d{1};
  WelchConfig welch{};
  Band full_band{0.1, 45.0};
};

std::vector<NamedValue> time_stat_features(std::span<const double> y);
std::vector<NamedValue> band_power_features(std::span<const double> y, double fs, const WelchConfig& welch = {});
std::vector<NamedValue> band_power_features(const Psd& psd);
std::vector<NamedValue> wavelet_stat_features(const WaveletDecomposition& w);

struct FeatureVector {
  std::vector<std::string> names;
  std::vector<double> values;    // NaN where undefined
  std::vector<bool> undefined;
};

FeatureVector extract_channel_features(std::span<const double> y, double fs, const std::string& channel,
                                       const FeatureConfig& cfg = {});

// ---------------------------------------------------------------------------

struct FeatureMatrix {
  std::vector<std::string> names;
  std::vector<std::string> channel_of;  // channel per column
  std::size_t n_rows{0};
  std::vector<double> values;  // row-major n_rows x names.size()
  std::vector<int> labels;     // 1 = MW, 0 = nonMW
  std::vector<std::string> subject_ids;

  std::size_t n_cols() const { return names.size(); }
  double at(std::size_t r, std::size_t c) const { return values[r * names.size() + c]; }
  double& at(std::size_t r, std::size_t c) { return values[r * names.size() + c]; }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * names.size(), names.size()}; }
  std::vector<double> column(std::size_t c) const;

  // Ordered list of distinct channels in column order.
  std::vector<std::string> channels() const;
  std::vector<std::size_t> columns_for_channels(const std::vector<std::string>& chs) const;
  std::vector<std::size_t> columns_for_names(const std::vector<std::string>& names) const;
  // Ordered distinct subject ids in row order.
  std::vector<std::string> subjects() const;

  FeatureMatrix select_columns(std::span<const std::size_t> cols) const;
  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;

  void validate() const;
};

struct Substitution {
  std::string feature;
  std::size_t n_rows;
  double value;
};

struct ExtractionResult {
  FeatureMatrix matrix;
  std::vector<Substitution> substitutions;
  std::size_t undefined_count() const;
};

// Extracts every (epoch, channel) in parallel, then replaces undefined values
// with the maximum finite value of that column across the dataset (0 when the
// whole column is undefined).
ExtractionResult extract_matrix(const SubjectDataset& ds, const std::optional<std::vector<std::string>>& channel_subset,
                                const FeatureConfig& cfg = {}, unsigned threads = 1);

}  // namespace mwd
