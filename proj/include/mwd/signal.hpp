#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mwd/common.hpp"

namespace mwd {

// Thought-probe response. Rating is the 7-point focus scale:
// 1 = completely wandering ... 7 = very focused.
struct ProbeEvent {
  double time_s{0.0};
  int rating{0};
};

// Multichannel, uniformly sampled recording. samples[ch][i] in microvolts.
struct Recording {
  std::string subject_id;
  double fs{0.0};
  std::vector<std::string> channels;
  std::vector<Series> samples;
  std::vector<ProbeEvent> events;

  std::size_t n_channels() const { return channels.size(); }
  std::size_t n_samples() const { return samples.empty() ? 0 : samples.front().size(); }
  double duration_s() const { return static_cast<double>(n_samples()) / fs; }
  std::size_t channel_index(const std::string& name) const;

  // Throws Error(Format) when any invariant is broken: ragged rows, duplicate
  // channel names, non-positive fs, non-finite samples, bad events.
  void validate() const;
};

struct LabeledEpoch {
  std::string subject_id;
  std::vector<std::string> channels;
  std::vector<Series> window;  // channels x W
  Label label{Label::NonMW};
  double source_probe_time_s{0.0};
};

struct SubjectEpochs {
  std::string subject_id;
  std::vector<LabeledEpoch> epochs;
};

struct SubjectDataset {
  double fs{0.0};
  double window_s{0.0};
  std::vector<std::string> channels;
  std::vector<SubjectEpochs> subjects;
  // Free-form provenance: seed, generator parameters, ingestion source.
  std::map<std::string, std::string> provenance;

  std::size_t n_epochs() const;
};

// Label map on the rating scale: <= 3 is MW, >= 5 is nonMW, 4 has no label.
// Ratings outside 1..7 are rejected.
std::optional<Label> label_for_rating(int rating);

// Butterworth band-pass in second-order sections, designed through the
// bilinear transform with pre-warped band edges. `order` is the order of
// the low-pass prototype; the band-pass has 2 * order poles.
struct Biquad {
  double b0, b1, b2, a1, a2;  // a0 == 1
};

std::vector<Biquad> design_butterworth_bandpass(int order, double lo_hz, double hi_hz, double fs);

// Zero-phase application (forward then backward) with odd-extension padding
// and steady-state initial conditions.
Series filtfilt(const std::vector<Biquad>& sos, std::span<const double> x);

// Magnitude of the one-pass frequency response at f_hz.
double magnitude_response(const std::vector<Biquad>& sos, double f_hz, double fs);

Recording bandpass(const Recording& rec, double lo_hz, double hi_hz, int order = 4);

// Subtracts the average of the two reference channels from every other channel
// and removes the reference channels from the output.
Recording rereference(const Recording& rec, const std::string& ref_a, const std::string& ref_b);

// One epoch per usable probe, covering the window_s seconds before probe onset.
// The probe onset maps to sample index round(time_s * fs); the epoch is the W
// samples that precede it. Probes without W samples of history are skipped.
std::vector<LabeledEpoch> epoch_and_label(const Recording& rec, double window_s);

SubjectDataset drop_single_class_subjects(const SubjectDataset& ds);

struct SynthSpec {
  int n_subjects{10};
  int epochs_per_subject{40};
  int n_channels{8};
  std::set<int> informative_channels{0, 1};
  double separation{1.0};
  double fs{1000.0};
  double window_s{10.0};
  std::uint64_t seed{0};
};

// Standard channel names used by the generator (first 30 follow the 10-20
// montage of a 32-channel cap without mastoids).
std::vector<std::string> synth_channel_names(int n_channels);

// Each subject gets exactly floor(E/2) MW epochs in shuffled order. Class
// differences exist only on informative channels: MW epochs have a larger
// AR(1) pole and a stronger 10 Hz rhythm, both scaled by `separation`.
SubjectDataset synth_dataset(const SynthSpec& spec, unsigned threads = 1);

// Lays out a dataset's epochs back to back as one recording per subject with a
// probe at the end of each epoch (rating 2 for MW, 6 for nonMW).
std::vector<Recording> to_recordings(const SubjectDataset& ds);

}  // namespace mwd
