#include "mwd/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

namespace mwd {

namespace {

const std::vector<std::string> kTimeStats = {"Mean", "MeanPower", "FirstDiff", "SecondDiff", "HjComp"};
const std::vector<std::string> kSpecEntBands = {"theta", "alpha", "beta", "gamma", "full"};
const std::vector<std::string> kWaveletStats = {"MeanPower", "Mean", "STD", "RAM"};
const std::vector<std::string> kWaveletBandStats = {"MeanPower", "Mean", "STD", "RAM", "Ent", "SpecEnt"};
const std::vector<std::string> kSubBands = {"cA7", "cD7", "cD6", "cD5", "cD4"};
const std::vector<Estimator> kTimeEstimators = {Estimator::SampEn, Estimator::PermEn, Estimator::DispEn,
                                                Estimator::FDispEn};
const std::vector<Estimator> kWaveletEstimators = {Estimator::PermEn, Estimator::DispEn, Estimator::FDispEn};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::optional<Estimator> estimator_from_short(const std::string& s) {
  for (Estimator e : kTimeEstimators)
    if (s == short_name(e)) return e;
  return std::nullopt;
}

std::optional<int> parse_scale(const std::string& s) {
  if (s.empty() || s.size() > 2 || s[0] == '0') return std::nullopt;
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v < 1 || v > kNumScales) return std::nullopt;
  return v;
}

// Parses a suffix (the part after "<CH>_"). Returns nullopt if not in the grammar.
std::optional<FeatureKey> parse_suffix(const std::string& s) {
  FeatureKey k;
  if (contains(kTimeStats, s)) {
    k.family = FeatureFamily::TimeStat;
    k.stat = s;
    return k;
  }
  if (s.rfind("PSD_", 0) == 0) {
    const std::string band = s.substr(4);
    if (band == "full" || !contains(kSpecEntBands, band)) return std::nullopt;
    k.family = FeatureFamily::BandPower;
    k.band = band;
    return k;
  }
  if (s.rfind("SpecEnt_", 0) == 0) {
    const std::string band = s.substr(8);
    if (!contains(kSpecEntBands, band)) return std::nullopt;
    k.family = FeatureFamily::SpectralEntropy;
    k.band = band;
    return k;
  }
  if (s.rfind("WL-", 0) == 0) {
    // WL-<E>-<SB>-<s>
    const std::string rest = s.substr(3);
    const auto p1 = rest.find('-');
    if (p1 == std::string::npos) return std::nullopt;
    const auto p2 = rest.find('-', p1 + 1);
    if (p2 == std::string::npos) return std::nullopt;
    const auto e = estimator_from_short(rest.substr(0, p1));
    const std::string sb = rest.substr(p1 + 1, p2 - p1 - 1);
    const auto scale = parse_scale(rest.substr(p2 + 1));
    if (!e || *e == Estimator::SampEn || !contains(kSubBands, sb) || !scale) return std::nullopt;
    k.family = FeatureFamily::WaveletEntropy;
    k.estimator = *e;
    k.sub_band = sb;
    k.scale = *scale;
    return k;
  }
  const auto wl = s.find("-WL-");
  if (wl != std::string::npos) {
    const std::string sb = s.substr(0, wl);
    const std::string stat = s.substr(wl + 4);
    if (!contains(kSubBands, sb) || !contains(kWaveletBandStats, stat)) return std::nullopt;
    k.family = FeatureFamily::WaveletStat;
    k.sub_band = sb;
    k.stat = stat;
    return k;
  }
  const auto dash = s.find('-');
  if (dash != std::string::npos) {
    const auto e = estimator_from_short(s.substr(0, dash));
    const auto scale = parse_scale(s.substr(dash + 1));
    if (!e || !scale) return std::nullopt;
    k.family = FeatureFamily::TimeEntropy;
    k.estimator = *e;
    k.scale = *scale;
    return k;
  }
  return std::nullopt;
}

std::string format_suffix(const FeatureKey& k) {
  switch (k.family) {
    case FeatureFamily::TimeStat: return k.stat;
    case FeatureFamily::BandPower: return "PSD_" + k.band;
    case FeatureFamily::SpectralEntropy: return "SpecEnt_" + k.band;
    case FeatureFamily::WaveletStat: return k.sub_band + "-WL-" + k.stat;
    case FeatureFamily::TimeEntropy: return std::string(short_name(k.estimator)) + "-" + std::to_string(k.scale);
    case FeatureFamily::WaveletEntropy:
      return "WL-" + std::string(short_name(k.estimator)) + "-" + k.sub_band + "-" + std::to_string(k.scale);
  }
  throw Error(ErrorKind::Internal, "format_suffix: bad family");
}

std::vector<std::string> build_suffixes(bool include_mse) {
  std::vector<std::string> out;
  for (const auto& s : kTimeStats) out.push_back(s);
  for (const auto& b : eeg_bands()) out.push_back(std::string("PSD_") + b.name);
  for (const auto& sb : kSubBands)
    for (const auto& st : kWaveletStats) out.push_back(sb + "-WL-" + st);
  for (Estimator e : kTimeEstimators) {
    if (e == Estimator::SampEn && !include_mse) continue;
    for (int s = 1; s <= kNumScales; ++s) out.push_back(std::string(short_name(e)) + "-" + std::to_string(s));
  }
  for (const auto& b : kSpecEntBands) out.push_back("SpecEnt_" + b);
  for (const auto& sb : kSubBands) {
    for (Estimator e : kWaveletEstimators)
      for (int s = 1; s <= kNumScales; ++s)
        out.push_back("WL-" + std::string(short_name(e)) + "-" + sb + "-" + std::to_string(s));
    out.push_back(sb + "-WL-Ent");
    out.push_back(sb + "-WL-SpecEnt");
  }
  return out;
}

template <class F>
std::optional<double> guarded(F&& f) {
  try {
    const double v = f();
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const Error&) {
    return std::nullopt;
  }
}

double mean_abs(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s / static_cast<double>(x.size());
}

std::optional<double> mobility(std::span<const double> x) {
  if (x.size() < 2) return std::nullopt;
  Series dx(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) dx[i] = x[i + 1] - x[i];
  const double sx = population_sd(x);
  if (!(sx > 0.0)) return std::nullopt;
  return population_sd(dx) / sx;
}

std::vector<NamedValue> band_powers_from_psd(const Psd& psd) {
  std::vector<NamedValue> out;
  for (const auto& b : eeg_bands()) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < psd.freqs.size(); ++i) {
      if (psd.freqs[i] >= b.range.lo && psd.freqs[i] < b.range.hi) {
        sum += psd.power[i];
        ++n;
      }
    }
    std::optional<double> v;
    if (n > 0 && sum > 0.0) v = std::log10(sum / static_cast<double>(n));
    out.push_back({std::string("PSD_") + b.name, v});
  }
  return out;
}

void append(FeatureVector& fv, const std::string& prefix, const std::string& suffix, std::optional<double> v) {
  fv.names.push_back(prefix + suffix);
  fv.values.push_back(v ? *v : std::numeric_limits<double>::quiet_NaN());
  fv.undefined.push_back(!v.has_value());
}

std::vector<int> all_scales() {
  std::vector<int> s(kNumScales);
  for (int i = 0; i < kNumScales; ++i) s[static_cast<std::size_t>(i)] = i + 1;
  return s;
}

EntropyParams params_for(Estimator e, const FeatureConfig& cfg, std::span<const double> y) {
  EntropyParams p;
  p.scales = all_scales();
  switch (e) {
    case Estimator::SampEn:
      p.m = cfg.sampen_m;
      p.r = cfg.sampen_r_factor * (y.size() > 1 ? sample_sd(y) : 0.0);
      break;
    case Estimator::PermEn:
      p.m = cfg.perm_m;
      p.d = cfg.perm_d;
      break;
    case Estimator::DispEn:
    case Estimator::FDispEn:
      p.m = cfg.disp_m;
      p.c = cfg.disp_c;
      p.d = cfg.disp_d;
      break;
  }
  return p;
}

void append_multiscale(FeatureVector& fv, const std::string& prefix, Estimator e, std::span<const double> y,
                       const FeatureConfig& cfg, const std::string& sub_band) {
  std::vector<ScaleValue> vals;
  try {
    vals = multiscale(e, y, params_for(e, cfg, y), ShortSeries::Undefined);
  } catch (const Error&) {
    vals.clear();
    for (int s = 1; s <= kNumScales; ++s) vals.push_back({s, std::nullopt});
  }
  for (const auto& sv : vals) {
    FeatureKey k;
    k.estimator = e;
    k.scale = sv.scale;
    if (sub_band.empty()) {
      k.family = FeatureFamily::TimeEntropy;
    } else {
      k.family = FeatureFamily::WaveletEntropy;
      k.sub_band = sub_band;
    }
    std::optional<double> v = sv.value;
    if (v && !std::isfinite(*v)) v.reset();
    append(fv, prefix, format_suffix(k), v);
  }
}

}  // namespace

const std::vector<EegBand>& eeg_bands() {
  static const std::vector<EegBand> bands = {
      {"theta", {4.0, 8.0}}, {"alpha", {8.0, 13.0}}, {"beta", {13.0, 30.0}}, {"gamma", {30.0, 45.0}}};
  return bands;
}

std::string format_feature_name(const FeatureKey& key) {
  if (key.channel.empty()) throw invalid_argument("feature name: empty channel");
  return key.channel + "_" + format_suffix(key);
}

FeatureKey parse_feature_name(const std::string& name) {
  // Channel names may contain '_', so try every split point from the right and
  // keep the longest suffix that is valid.
  for (std::size_t pos = name.find('_'); pos != std::string::npos; pos = name.find('_', pos + 1)) {
    if (pos == 0) continue;
    if (auto k = parse_suffix(name.substr(pos + 1))) {
      k->channel = name.substr(0, pos);
      return *k;
    }
  }
  throw format_error("feature name outside grammar: '" + name + "'");
}

const std::vector<std::string>& channel_feature_suffixes(bool include_mse) {
  static const std::vector<std::string> with = build_suffixes(true);
  static const std::vector<std::string> without = build_suffixes(false);
  return include_mse ? with : without;
}

std::vector<NamedValue> time_stat_features(std::span<const double> y) {
  if (y.empty()) throw invalid_argument("time_stat_features: empty series");
  const double n = static_cast<double>(y.size());
  double sum = 0.0;
  double sq = 0.0;
  for (double v : y) {
    sum += v;
    sq += v * v;
  }
  std::optional<double> d1;
  std::optional<double> d2;
  if (y.size() >= 2) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < y.size(); ++i) s += std::abs(y[i + 1] - y[i]);
    d1 = s / (n - 1.0);
  }
  if (y.size() >= 3) {
    double s = 0.0;
    for (std::size_t i = 0; i + 2 < y.size(); ++i) s += std::abs(y[i + 2] - 2.0 * y[i + 1] + y[i]);
    d2 = s / (n - 2.0);
  }
  std::optional<double> hj;
  if (y.size() >= 3) {
    Series dy(y.size() - 1);
    for (std::size_t i = 0; i + 1 < y.size(); ++i) dy[i] = y[i + 1] - y[i];
    const auto m0 = mobility(y);
    const auto m1 = mobility(dy);
    if (m0 && m1 && *m0 > 0.0) hj = *m1 / *m0;
  }
  return {{"Mean", sum / n}, {"MeanPower", sq / n}, {"FirstDiff", d1}, {"SecondDiff", d2}, {"HjComp", hj}};
}

std::vector<NamedValue> band_power_features(std::span<const double> y, double fs, const WelchConfig& welch) {
  if (!(fs > 0.0)) throw invalid_argument("band_power_features: fs must be positive");
  if (static_cast<double>(y.size()) < fs)
    throw invalid_argument("band_power_features: need at least one second of data");
  return band_powers_from_psd(welch_psd(y, fs, welch));
}

std::vector<NamedValue> band_power_features(const Psd& psd) { return band_powers_from_psd(psd); }

std::vector<NamedValue> wavelet_stat_features(const WaveletDecomposition& w) {
  if (w.bands.size() < static_cast<std::size_t>(kRetainedBands))
    throw invalid_argument("wavelet_stat_features: decomposition has fewer than 5 bands");
  const auto kept = w.retained();
  std::vector<double> abs_means;
  for (const SubBand* b : kept) {
    if (b->coeffs.empty()) throw invalid_argument("wavelet_stat_features: empty sub-band " + b->name);
    abs_means.push_back(mean_abs(b->coeffs));
  }
  std::vector<NamedValue> out;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const auto& c = kept[i]->coeffs;
    double sq = 0.0;
    for (double v : c) sq += v * v;
    const std::size_t next = (i + 1 < kept.size()) ? i + 1 : i - 1;
    std::optional<double> ram;
    if (abs_means[next] > 0.0) ram = abs_means[i] / abs_means[next];
    const std::string p = kept[i]->name + "-WL-";
    out.push_back({p + "MeanPower", sq / static_cast<double>(c.size())});
    out.push_back({p + "Mean", mean(c)});
    out.push_back({p + "STD", population_sd(c)});
    out.push_back({p + "RAM", ram});
  }
  return out;
}

FeatureVector extract_channel_features(std::span<const double> y, double fs, const std::string& channel,
                                       const FeatureConfig& cfg) {
  if (channel.empty()) throw invalid_argument("extract_channel_features: empty channel name");
  if (!(fs > 0.0)) throw invalid_argument("extract_channel_features: fs must be positive");
  FeatureVector fv;
  const std::size_t total = cfg.include_mse ? kFeaturesPerChannel : kFeaturesPerChannelNoMse;
  fv.names.reserve(total);
  fv.values.reserve(total);
  fv.undefined.reserve(total);
  const std::string prefix = channel + "_";

  for (const auto& nv : time_stat_features(y)) append(fv, prefix, nv.name, nv.value);

  const Psd psd = welch_psd(y, fs, cfg.welch);
  for (const auto& nv : band_powers_from_psd(psd)) append(fv, prefix, nv.name, nv.value);

  const WaveletDecomposition w = dwt_decompose(y);
  for (const auto& nv : wavelet_stat_features(w)) append(fv, prefix, nv.name, nv.value);

  for (Estimator e : kTimeEstimators) {
    if (e == Estimator::SampEn && !cfg.include_mse) continue;
    append_multiscale(fv, prefix, e, y, cfg, "");
  }

  for (const auto& b : eeg_bands())
    append(fv, prefix, std::string("SpecEnt_") + b.name, guarded([&] { return spectral_entropy(psd, b.range); }));
  append(fv, prefix, "SpecEnt_full", guarded([&] { return spectral_entropy(psd, cfg.full_band); }));

  for (const SubBand* b : w.retained()) {
    for (Estimator e : kWaveletEstimators) append_multiscale(fv, prefix, e, b->coeffs, cfg, b->name);
    append(fv, prefix, b->name + "-WL-Ent", guarded([&] { return wavelet_log_energy_entropy(b->coeffs); }));
    const double fs_band = fs / static_cast<double>(std::size_t{1} << b->level);
    append(fv, prefix, b->name + "-WL-SpecEnt",
           guarded([&] { return spectral_entropy(b->coeffs, fs_band, std::nullopt, cfg.welch); }));
  }

  if (fv.names.size() != total)
    throw Error(ErrorKind::Internal, "extract_channel_features: produced " + std::to_string(fv.names.size()) +
                                         " features, expected " + std::to_string(total));
  return fv;
}

// ---------------------------------------------------------------------------

std::vector<double> FeatureMatrix::column(std::size_t c) const {
  std::vector<double> out(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) out[r] = at(r, c);
  return out;
}

std::vector<std::string> FeatureMatrix::channels() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& ch : channel_of)
    if (seen.insert(ch).second) out.push_back(ch);
  return out;
}

std::vector<std::size_t> FeatureMatrix::columns_for_channels(const std::vector<std::string>& chs) const {
  std::set<std::string> want;
  const auto have = channels();
  for (const auto& c : chs) {
    if (std::find(have.begin(), have.end(), c) == have.end())
      throw invalid_argument("feature matrix has no channel '" + c + "'");
    want.insert(c);
  }
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < channel_of.size(); ++j)
    if (want.count(channel_of[j])) out.push_back(j);
  return out;
}

std::vector<std::size_t> FeatureMatrix::columns_for_names(const std::vector<std::string>& wanted) const {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < names.size(); ++j) index.emplace(names[j], j);
  std::vector<std::size_t> out;
  out.reserve(wanted.size());
  for (const auto& n : wanted) {
    auto it = index.find(n);
    if (it == index.end()) throw invalid_argument("feature matrix has no column '" + n + "'");
    out.push_back(it->second);
  }
  return out;
}

std::vector<std::string> FeatureMatrix::subjects() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& s : subject_ids)
    if (seen.insert(s).second) out.push_back(s);
  return out;
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::size_t> cols) const {
  FeatureMatrix m;
  m.n_rows = n_rows;
  m.labels = labels;
  m.subject_ids = subject_ids;
  for (std::size_t c : cols) {
    if (c >= n_cols()) throw invalid_argument("select_columns: index out of range");
    m.names.push_back(names[c]);
    m.channel_of.push_back(channel_of[c]);
  }
  m.values.resize(n_rows * cols.size());
  for (std::size_t r = 0; r < n_rows; ++r)
    for (std::size_t j = 0; j < cols.size(); ++j) m.values[r * cols.size() + j] = at(r, cols[j]);
  return m;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  FeatureMatrix m;
  m.names = names;
  m.channel_of = channel_of;
  m.n_rows = rows.size();
  m.values.reserve(rows.size() * n_cols());
  for (std::size_t r : rows) {
    if (r >= n_rows) throw invalid_argument("select_rows: index out of range");
    const auto src = row(r);
    m.values.insert(m.values.end(), src.begin(), src.end());
    m.labels.push_back(labels[r]);
    m.subject_ids.push_back(subject_ids[r]);
  }
  return m;
}

void FeatureMatrix::validate() const {
  if (channel_of.size() != names.size()) throw format_error("feature matrix: channel_of/names size mismatch");
  if (values.size() != n_rows * names.size()) throw format_error("feature matrix: value count mismatch");
  if (labels.size() != n_rows || subject_ids.size() != n_rows)
    throw format_error("feature matrix: labels/subjects size mismatch");
  for (int l : labels)
    if (l != 0 && l != 1) throw format_error("feature matrix: labels must be 0 or 1");
  std::set<std::string> seen;
  for (const auto& n : names)
    if (!seen.insert(n).second) throw format_error("feature matrix: duplicate column '" + n + "'");
}

std::size_t ExtractionResult::undefined_count() const {
  std::size_t n = 0;
  for (const auto& s : substitutions) n += s.n_rows;
  return n;
}

ExtractionResult extract_matrix(const SubjectDataset& ds, const std::optional<std::vector<std::string>>& channel_subset,
                                const FeatureConfig& cfg, unsigned threads) {
  std::vector<std::size_t> ch_idx;
  if (channel_subset) {
    if (channel_subset->empty()) throw invalid_argument("extract_matrix: empty channel subset");
    std::set<std::string> seen;
    for (const auto& name : *channel_subset) {
      auto it = std::find(ds.channels.begin(), ds.channels.end(), name);
      if (it == ds.channels.end()) throw invalid_argument("extract_matrix: unknown channel '" + name + "'");
      if (!seen.insert(name).second) throw invalid_argument("extract_matrix: duplicate channel '" + name + "'");
      ch_idx.push_back(static_cast<std::size_t>(it - ds.channels.begin()));
    }
  } else {
    for (std::size_t c = 0; c < ds.channels.size(); ++c) ch_idx.push_back(c);
  }
  if (ch_idx.empty()) throw invalid_argument("extract_matrix: dataset has no channels");

  struct EpochRef {
    const LabeledEpoch* epoch;
    const std::string* subject;
  };
  std::vector<EpochRef> epochs;
  for (const auto& s : ds.subjects)
    for (const auto& e : s.epochs) epochs.push_back({&e, &s.subject_id});

  const auto& suffixes = channel_feature_suffixes(cfg.include_mse);
  const std::size_t per_ch = suffixes.size();
  const std::size_t n_cols = per_ch * ch_idx.size();

  ExtractionResult res;
  FeatureMatrix& m = res.matrix;
  m.n_rows = epochs.size();
  for (std::size_t c : ch_idx) {
    for (const auto& s : suffixes) {
      m.names.push_back(ds.channels[c] + "_" + s);
      m.channel_of.push_back(ds.channels[c]);
    }
  }
  m.values.assign(m.n_rows * n_cols, 0.0);
  std::vector<char> undefined(m.n_rows * n_cols, 0);
  for (const auto& e : epochs) {
    m.labels.push_back(to_int(e.epoch->label));
    m.subject_ids.push_back(*e.subject);
  }

  parallel_for(epochs.size() * ch_idx.size(), threads, [&](std::size_t job) {
    const std::size_t r = job / ch_idx.size();
    const std::size_t k = job % ch_idx.size();
    const std::size_t ch = ch_idx[k];
    const auto& data = epochs[r].epoch->window;
    if (ch >= data.size()) throw format_error("extract_matrix: epoch is missing channel data");
    const FeatureVector fv = extract_channel_features(data[ch], ds.fs, ds.channels[ch], cfg);
    double* out = m.values.data() + r * n_cols + k * per_ch;
    char* und = undefined.data() + r * n_cols + k * per_ch;
    for (std::size_t j = 0; j < per_ch; ++j) {
      out[j] = fv.values[j];
      und[j] = fv.undefined[j] ? 1 : 0;
    }
  });

  for (std::size_t c = 0; c < n_cols; ++c) {
    std::size_t n_bad = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < m.n_rows; ++r) {
      if (undefined[r * n_cols + c])
        ++n_bad;
      else
        best = std::max(best, m.values[r * n_cols + c]);
    }
    if (n_bad == 0) continue;
    const double fill = std::isfinite(best) ? best : 0.0;
    for (std::size_t r = 0; r < m.n_rows; ++r)
      if (undefined[r * n_cols + c]) m.values[r * n_cols + c] = fill;
    res.substitutions.push_back({m.names[c], n_bad, fill});
  }
  return res;
}

}  // namespace mwd
