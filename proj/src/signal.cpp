#include "mwd/signal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_set>

namespace mwd {

using cplx = std::complex<double>;

std::size_t Recording::channel_index(const std::string& name) const {
  const auto it = std::find(channels.begin(), channels.end(), name);
  if (it == channels.end()) throw invalid_argument("unknown channel '" + name + "' in recording " + subject_id);
  return static_cast<std::size_t>(it - channels.begin());
}

void Recording::validate() const {
  if (!(fs > 0.0) || !std::isfinite(fs)) throw format_error("sampling rate must be positive");
  if (channels.empty()) throw format_error("recording " + subject_id + " has no channels");
  if (samples.size() != channels.size())
    throw format_error("channel-count mismatch in " + subject_id + ": " + std::to_string(channels.size()) +
                       " names vs " + std::to_string(samples.size()) + " rows");
  std::unordered_set<std::string> seen;
  for (const auto& c : channels)
    if (!seen.insert(c).second) throw format_error("duplicate channel name '" + c + "'");
  const std::size_t n = samples.front().size();
  if (n == 0) throw format_error("recording " + subject_id + " has no samples");
  for (const auto& row : samples) {
    if (row.size() != n) throw format_error("ragged channel rows in " + subject_id);
    for (double v : row)
      if (!std::isfinite(v)) throw format_error("non-finite sample in " + subject_id);
  }
  const double dur = duration_s();
  double prev = -1.0;
  for (const auto& e : events) {
    if (!std::isfinite(e.time_s) || e.time_s < 0.0 || e.time_s > dur)
      throw format_error("event time " + std::to_string(e.time_s) + " outside recording " + subject_id);
    if (e.time_s <= prev) throw format_error("event times not strictly increasing in " + subject_id);
    if (e.rating < 1 || e.rating > 7) throw format_error("unknown rating " + std::to_string(e.rating));
    prev = e.time_s;
  }
}

std::size_t SubjectDataset::n_epochs() const {
  std::size_t n = 0;
  for (const auto& s : subjects) n += s.epochs.size();
  return n;
}

std::optional<Label> label_for_rating(int rating) {
  if (rating < 1 || rating > 7) throw format_error("unknown rating " + std::to_string(rating));
  if (rating <= 3) return Label::MW;
  if (rating >= 5) return Label::NonMW;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Butterworth design: analog prototype -> band-pass -> bilinear -> biquads.

std::vector<Biquad> design_butterworth_bandpass(int order, double lo_hz, double hi_hz, double fs) {
  if (order < 1) throw invalid_argument("filter order must be >= 1");
  if (!(fs > 0.0)) throw invalid_argument("sampling rate must be positive");
  if (!(lo_hz > 0.0 && lo_hz < hi_hz && hi_hz < fs / 2.0))
    throw invalid_argument("band edges must satisfy 0 < lo < hi < fs/2");

  const double fs2 = 2.0 * fs;
  const double wl = fs2 * std::tan(std::numbers::pi * lo_hz / fs);
  const double wh = fs2 * std::tan(std::numbers::pi * hi_hz / fs);
  const double bw = wh - wl;
  const double w0 = std::sqrt(wl * wh);

  std::vector<cplx> poles;
  for (int k = 0; k < order; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + order + 1) / (2.0 * order);
    const cplx p_lp = std::polar(1.0, theta) * (bw / 2.0);
    const cplx disc = std::sqrt(p_lp * p_lp - w0 * w0);
    poles.push_back(p_lp + disc);
    poles.push_back(p_lp - disc);
  }
  // Band-pass: `order` zeros at s = 0 (-> z = +1), `order` at infinity (-> z = -1).
  double gain = std::pow(bw, order);
  cplx den(1.0, 0.0);
  cplx num(1.0, 0.0);
  for (int k = 0; k < order; ++k) num *= cplx(fs2, 0.0);
  std::vector<cplx> zpoles;
  for (const auto& p : poles) {
    den *= (fs2 - p);
    zpoles.push_back((fs2 + p) / (fs2 - p));
  }
  gain *= (num / den).real();

  // Pair conjugate poles; real poles are paired among themselves.
  std::vector<cplx> upper;
  std::vector<double> reals;
  for (const auto& p : zpoles) {
    if (std::abs(p.imag()) < 1e-12) reals.push_back(p.real());
    else if (p.imag() > 0) upper.push_back(p);
  }
  std::sort(upper.begin(), upper.end(), [](const cplx& a, const cplx& b) { return std::abs(a) < std::abs(b); });
  std::sort(reals.begin(), reals.end());

  std::vector<Biquad> sos;
  for (const auto& p : upper) sos.push_back({1.0, 0.0, -1.0, -2.0 * p.real(), std::norm(p)});
  for (std::size_t i = 0; i + 1 < reals.size(); i += 2)
    sos.push_back({1.0, 0.0, -1.0, -(reals[i] + reals[i + 1]), reals[i] * reals[i + 1]});
  if (reals.size() % 2 == 1) throw Error(ErrorKind::Internal, "unpaired real pole in band-pass design");
  if (sos.empty()) throw Error(ErrorKind::Internal, "empty band-pass design");
  sos.front().b0 *= gain;
  sos.front().b1 *= gain;
  sos.front().b2 *= gain;
  return sos;
}

double magnitude_response(const std::vector<Biquad>& sos, double f_hz, double fs) {
  const cplx z = std::polar(1.0, 2.0 * std::numbers::pi * f_hz / fs);
  const cplx zi = 1.0 / z;
  cplx h(1.0, 0.0);
  for (const auto& s : sos) h *= (s.b0 + s.b1 * zi + s.b2 * zi * zi) / (1.0 + s.a1 * zi + s.a2 * zi * zi);
  return std::abs(h);
}

namespace {

// Steady-state of one transposed direct-form II section for a unit step.
std::array<double, 2> section_zi(const Biquad& s) {
  // (I - A^T) zi = b[1:] - a[1:] * b0, with A the companion matrix of a.
  const double r0 = s.b1 - s.a1 * s.b0;
  const double r1 = s.b2 - s.a2 * s.b0;
  // [[1 + a1, -1], [a2, 1]] zi = [r0, r1]
  const double det = (1.0 + s.a1) + s.a2;
  const double z0 = (r0 + r1) / det;
  const double z1 = r1 - s.a2 * z0;
  return {z0, z1};
}

void sosfilt_inplace(const std::vector<Biquad>& sos, std::vector<std::array<double, 2>> zi, Series& x) {
  for (std::size_t k = 0; k < sos.size(); ++k) {
    const auto& s = sos[k];
    double z0 = zi[k][0];
    double z1 = zi[k][1];
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + z0;
      z0 = s.b1 * in - s.a1 * out + z1;
      z1 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
}

}  // namespace

Series filtfilt(const std::vector<Biquad>& sos, std::span<const double> x) {
  int ntaps = 2 * static_cast<int>(sos.size()) + 1;
  int zero_b2 = 0;
  int zero_a2 = 0;
  for (const auto& s : sos) {
    zero_b2 += s.b2 == 0.0;
    zero_a2 += s.a2 == 0.0;
  }
  ntaps -= std::min(zero_b2, zero_a2);
  const std::size_t pad = 3 * static_cast<std::size_t>(ntaps);
  const std::size_t n = x.size();
  if (n <= pad) throw invalid_argument("series too short for zero-phase filtering (need > " + std::to_string(pad) + " samples)");

  Series ext(n + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) ext[i] = 2.0 * x[0] - x[pad - i];
  std::copy(x.begin(), x.end(), ext.begin() + static_cast<std::ptrdiff_t>(pad));
  for (std::size_t i = 0; i < pad; ++i) ext[pad + n + i] = 2.0 * x[n - 1] - x[n - 2 - i];

  // Per-section steady state scaled by the DC gain of the preceding sections.
  std::vector<std::array<double, 2>> zi_unit(sos.size());
  double scale = 1.0;
  for (std::size_t k = 0; k < sos.size(); ++k) {
    const auto z = section_zi(sos[k]);
    zi_unit[k] = {z[0] * scale, z[1] * scale};
    const auto& s = sos[k];
    scale *= (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
  }
  auto scaled = [&](double x0) {
    auto zi = zi_unit;
    for (auto& z : zi) {
      z[0] *= x0;
      z[1] *= x0;
    }
    return zi;
  };

  sosfilt_inplace(sos, scaled(ext.front()), ext);
  std::reverse(ext.begin(), ext.end());
  sosfilt_inplace(sos, scaled(ext.front()), ext);
  std::reverse(ext.begin(), ext.end());
  return Series(ext.begin() + static_cast<std::ptrdiff_t>(pad), ext.begin() + static_cast<std::ptrdiff_t>(pad + n));
}

Recording bandpass(const Recording& rec, double lo_hz, double hi_hz, int order) {
  const auto sos = design_butterworth_bandpass(order, lo_hz, hi_hz, rec.fs);
  Recording out = rec;
  for (auto& row : out.samples) row = filtfilt(sos, row);
  return out;
}

Recording rereference(const Recording& rec, const std::string& ref_a, const std::string& ref_b) {
  const std::size_t ia = rec.channel_index(ref_a);
  const std::size_t ib = rec.channel_index(ref_b);
  const std::size_t n = rec.n_samples();
  Series ref(n);
  for (std::size_t i = 0; i < n; ++i) ref[i] = (rec.samples[ia][i] + rec.samples[ib][i]) / 2.0;

  Recording out;
  out.subject_id = rec.subject_id;
  out.fs = rec.fs;
  out.events = rec.events;
  for (std::size_t c = 0; c < rec.n_channels(); ++c) {
    if (c == ia || c == ib) continue;
    out.channels.push_back(rec.channels[c]);
    Series row(n);
    for (std::size_t i = 0; i < n; ++i) row[i] = rec.samples[c][i] - ref[i];
    out.samples.push_back(std::move(row));
  }
  return out;
}

std::vector<LabeledEpoch> epoch_and_label(const Recording& rec, double window_s) {
  if (!(window_s > 0.0)) throw invalid_argument("window_s must be positive");
  const auto w = static_cast<std::ptrdiff_t>(std::llround(window_s * rec.fs));
  if (w < 1) throw invalid_argument("window shorter than one sample");
  const auto n = static_cast<std::ptrdiff_t>(rec.n_samples());
  std::vector<LabeledEpoch> out;
  for (const auto& ev : rec.events) {
    const auto label = label_for_rating(ev.rating);
    if (!label) continue;
    const auto end = static_cast<std::ptrdiff_t>(std::llround(ev.time_s * rec.fs));
    const auto start = end - w;
    if (start < 0 || end > n) {
      std::clog << "warning: " << rec.subject_id << ": probe at " << ev.time_s
                << " s lacks a full window of history; skipped\n";
      continue;
    }
    LabeledEpoch ep;
    ep.subject_id = rec.subject_id;
    ep.channels = rec.channels;
    ep.label = *label;
    ep.source_probe_time_s = ev.time_s;
    ep.window.reserve(rec.n_channels());
    for (const auto& row : rec.samples) ep.window.emplace_back(row.begin() + start, row.begin() + end);
    out.push_back(std::move(ep));
  }
  return out;
}

SubjectDataset drop_single_class_subjects(const SubjectDataset& ds) {
  SubjectDataset out = ds;
  out.subjects.clear();
  std::size_t dropped = 0;
  for (const auto& s : ds.subjects) {
    bool has_mw = false;
    bool has_non = false;
    for (const auto& e : s.epochs) (e.label == Label::MW ? has_mw : has_non) = true;
    if (has_mw && has_non) out.subjects.push_back(s);
    else ++dropped;
  }
  if (out.subjects.empty()) throw invalid_argument("no subject has epochs of both classes");
  out.provenance["dropped_single_class_subjects"] = std::to_string(dropped);
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic data

std::vector<std::string> synth_channel_names(int n_channels) {
  static const char* montage[] = {"FP1", "FP2", "F7",  "F3",  "FZ",  "F4",  "F8",  "FT7", "FC3", "FCZ",
                                  "FC4", "FT8", "T7",  "C3",  "CZ",  "C4",  "T8",  "TP7", "CP3", "CPZ",
                                  "CP4", "TP8", "P7",  "P3",  "PZ",  "P4",  "P8",  "O1",  "OZ",  "O2"};
  std::vector<std::string> names;
  for (int c = 0; c < n_channels; ++c)
    names.push_back(c < 30 ? std::string(montage[c]) : "CH" + std::to_string(c + 1));
  return names;
}

namespace {

struct SubjectTraits {
  double gain;
  double phi_jitter;
  double alpha_hz;
  std::vector<double> channel_gain;
  std::vector<Label> labels;
};

Series synth_channel(std::uint64_t stream_seed, std::size_t w, double fs, double phi, double alpha_amp,
                     double alpha_hz, double gain) {
  std::mt19937_64 rng(stream_seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  const double ph = phase(rng);
  double x = noise(rng) / std::sqrt(1.0 - phi * phi);
  Series out(w);
  for (std::size_t i = 0; i < w; ++i) {
    x = phi * x + noise(rng);
    const double t = static_cast<double>(i) / fs;
    out[i] = 10.0 * gain * (x + alpha_amp * std::sin(2.0 * std::numbers::pi * alpha_hz * t + ph));
  }
  return out;
}

}  // namespace

SubjectDataset synth_dataset(const SynthSpec& spec, unsigned threads) {
  if (spec.n_subjects < 2) throw invalid_argument("synth: n_subjects must be >= 2");
  if (spec.epochs_per_subject < 4) throw invalid_argument("synth: epochs_per_subject must be >= 4");
  if (spec.n_channels < 1) throw invalid_argument("synth: n_channels must be >= 1");
  if (!(spec.separation >= 0.0)) throw invalid_argument("synth: separation must be >= 0");
  if (!(spec.fs > 0.0) || !(spec.window_s > 0.0)) throw invalid_argument("synth: fs and window_s must be positive");
  for (int c : spec.informative_channels)
    if (c < 0 || c >= spec.n_channels) throw invalid_argument("synth: informative channel index out of range");

  const auto w = static_cast<std::size_t>(std::llround(spec.window_s * spec.fs));
  const auto names = synth_channel_names(spec.n_channels);
  const double sep = std::min(spec.separation, 1.0);
  constexpr double kPhiBase = 0.3;
  constexpr double kAlphaBase = 0.3;

  std::vector<SubjectTraits> traits(static_cast<std::size_t>(spec.n_subjects));
  for (int s = 0; s < spec.n_subjects; ++s) {
    std::mt19937_64 rng(mix_seed(spec.seed, static_cast<std::uint64_t>(s)));
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto& t = traits[static_cast<std::size_t>(s)];
    t.gain = std::exp(0.25 * z(rng));
    t.phi_jitter = 0.05 * u(rng);
    t.alpha_hz = 10.0 + 0.5 * u(rng);
    for (int c = 0; c < spec.n_channels; ++c) t.channel_gain.push_back(std::exp(0.1 * z(rng)));
    const int n_mw = spec.epochs_per_subject / 2;
    for (int e = 0; e < spec.epochs_per_subject; ++e) t.labels.push_back(e < n_mw ? Label::MW : Label::NonMW);
    std::shuffle(t.labels.begin(), t.labels.end(), rng);
  }

  SubjectDataset ds;
  ds.fs = spec.fs;
  ds.window_s = spec.window_s;
  ds.channels = names;
  ds.subjects.resize(static_cast<std::size_t>(spec.n_subjects));
  for (int s = 0; s < spec.n_subjects; ++s) {
    auto& subj = ds.subjects[static_cast<std::size_t>(s)];
    std::ostringstream id;
    id << "S" << (s + 1 < 10 ? "0" : "") << (s + 1);
    subj.subject_id = id.str();
    subj.epochs.resize(static_cast<std::size_t>(spec.epochs_per_subject));
    for (int e = 0; e < spec.epochs_per_subject; ++e) {
      auto& ep = subj.epochs[static_cast<std::size_t>(e)];
      ep.subject_id = subj.subject_id;
      ep.channels = names;
      ep.label = traits[static_cast<std::size_t>(s)].labels[static_cast<std::size_t>(e)];
      ep.source_probe_time_s = static_cast<double>((e + 1) * static_cast<long long>(w)) / spec.fs;
      ep.window.resize(static_cast<std::size_t>(spec.n_channels));
    }
  }

  const std::size_t per_subject = static_cast<std::size_t>(spec.epochs_per_subject) * static_cast<std::size_t>(spec.n_channels);
  const std::size_t total = per_subject * static_cast<std::size_t>(spec.n_subjects);
  parallel_for(total, threads, [&](std::size_t item) {
    const std::size_t s = item / per_subject;
    const std::size_t e = (item % per_subject) / static_cast<std::size_t>(spec.n_channels);
    const std::size_t c = item % static_cast<std::size_t>(spec.n_channels);
    const auto& t = traits[s];
    const bool informative = spec.informative_channels.count(static_cast<int>(c)) > 0;
    const bool mw = t.labels[e] == Label::MW;
    double phi = kPhiBase + t.phi_jitter;
    double alpha = kAlphaBase;
    if (informative && mw) {
      phi += 0.5 * sep;
      alpha *= 1.0 + 2.0 * spec.separation;
    }
    const std::uint64_t stream = mix_seed(mix_seed(spec.seed, s), 1000 + item % per_subject);
    ds.subjects[s].epochs[e].window[c] =
        synth_channel(stream, w, spec.fs, phi, alpha, t.alpha_hz, t.gain * t.channel_gain[c]);
  });

  std::ostringstream inf;
  for (int c : spec.informative_channels) inf << (inf.tellp() > 0 ? "," : "") << names[static_cast<std::size_t>(c)];
  auto num = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  ds.provenance["source"] = "synthetic";
  ds.provenance["seed"] = std::to_string(spec.seed);
  ds.provenance["separation"] = num(spec.separation);
  ds.provenance["informative_channels"] = inf.str();
  ds.provenance["n_subjects"] = std::to_string(spec.n_subjects);
  ds.provenance["epochs_per_subject"] = std::to_string(spec.epochs_per_subject);
  return ds;
}

std::vector<Recording> to_recordings(const SubjectDataset& ds) {
  std::vector<Recording> out;
  for (const auto& subj : ds.subjects) {
    Recording rec;
    rec.subject_id = subj.subject_id;
    rec.fs = ds.fs;
    rec.channels = ds.channels;
    rec.samples.assign(ds.channels.size(), Series{});
    std::size_t offset = 0;
    for (const auto& ep : subj.epochs) {
      if (ep.window.size() != ds.channels.size()) throw format_error("epoch channel count mismatch");
      const std::size_t w = ep.window.front().size();
      for (std::size_t c = 0; c < ep.window.size(); ++c)
        rec.samples[c].insert(rec.samples[c].end(), ep.window[c].begin(), ep.window[c].end());
      offset += w;
      rec.events.push_back({static_cast<double>(offset) / ds.fs, ep.label == Label::MW ? 2 : 6});
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace mwd
