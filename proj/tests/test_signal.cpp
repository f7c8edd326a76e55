#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "mwd/signal.hpp"
#include "oracles.hpp"

using namespace mwd;

namespace {

Recording make_rec(std::vector<std::string> chans, std::vector<Series> samples, double fs = 100.0) {
  Recording r;
  r.subject_id = "S";
  r.fs = fs;
  r.channels = std::move(chans);
  r.samples = std::move(samples);
  return r;
}

Series sine(double f, double fs, std::size_t n, double amp = 1.0) {
  Series x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / fs);
  return x;
}

double max_abs_mid(const Series& x, std::size_t edge) {
  double m = 0.0;
  for (std::size_t i = edge; i + edge < x.size(); ++i) m = std::max(m, std::abs(x[i]));
  return m;
}

}  // namespace

TEST_CASE("label map is total on 1..7 and skips 4") {
  for (int r : {1, 2, 3}) CHECK(label_for_rating(r) == Label::MW);
  for (int r : {5, 6, 7}) CHECK(label_for_rating(r) == Label::NonMW);
  CHECK_FALSE(label_for_rating(4).has_value());
  CHECK_THROWS_AS(label_for_rating(0), Error);
  CHECK_THROWS_AS(label_for_rating(8), Error);
}

TEST_CASE("recording validation") {
  auto r = make_rec({"A", "B"}, {{1, 2, 3}, {1, 2}});
  CHECK_THROWS_AS(r.validate(), Error);
  r = make_rec({"A", "A"}, {{1, 2}, {1, 2}});
  CHECK_THROWS_AS(r.validate(), Error);
  r = make_rec({"A"}, {{1, std::nan(""), 3}});
  CHECK_THROWS_AS(r.validate(), Error);
  r = make_rec({"A"}, {{1, 2, 3}});
  r.events = {{0.02, 2}, {0.01, 6}};
  CHECK_THROWS_AS(r.validate(), Error);
  r.events = {{0.01, 2}, {0.02, 6}};
  CHECK_NOTHROW(r.validate());
}

TEST_CASE("bandpass rejects DC") {
  auto r = make_rec({"A"}, {Series(10000, 5.0)}, 1000.0);
  const auto out = bandpass(r, 0.1, 45.0);
  CHECK(out.samples[0].size() == 10000);
  CHECK(max_abs_mid(out.samples[0], 1000) < 1e-3);
}

TEST_CASE("bandpass keeps 10 Hz and attenuates 60 Hz") {
  // The 0.1 Hz edge settles slowly, so measure well inside a long record.
  const double fs = 1000.0;
  auto r10 = make_rec({"A"}, {sine(10.0, fs, 120000)}, fs);
  const double a10 = max_abs_mid(bandpass(r10, 0.1, 45.0).samples[0], 40000);
  CHECK(a10 == doctest::Approx(1.0).epsilon(0.01));
  auto r60 = make_rec({"A"}, {sine(60.0, fs, 120000)}, fs);
  const double a60 = max_abs_mid(bandpass(r60, 0.1, 45.0).samples[0], 40000);
  CHECK(20.0 * std::log10(a60) <= -20.0);
}

TEST_CASE("designed filter magnitude matches the analytic Butterworth response") {
  const double fs = 1000.0;
  const auto sos = design_butterworth_bandpass(4, 0.1, 45.0, fs);
  CHECK(sos.size() == 4);
  // Both band edges sit at -3 dB after prewarping.
  CHECK(magnitude_response(sos, 45.0, fs) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
  CHECK(magnitude_response(sos, 0.1, fs) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
  CHECK(magnitude_response(sos, 10.0, fs) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("bandpass is linear and zero phase") {
  const double fs = 250.0;
  const auto a = oracle::gaussian(3000, 1);
  const auto b = oracle::gaussian(3000, 2);
  Series mix(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) mix[i] = 2.0 * a[i] - 0.5 * b[i];
  const auto sos = design_butterworth_bandpass(4, 0.5, 40.0, fs);
  const auto fa = filtfilt(sos, a);
  const auto fb = filtfilt(sos, b);
  const auto fm = filtfilt(sos, mix);
  double scale = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    scale = std::max(scale, std::abs(fm[i]));
    err = std::max(err, std::abs(fm[i] - (2.0 * fa[i] - 0.5 * fb[i])));
  }
  CHECK(err <= 1e-9 * scale);

  // A pass-band sinusoid comes back without a shift: peak cross-correlation at lag 0.
  const auto s = sine(8.0, fs, 3000);
  const auto fs8 = filtfilt(sos, s);
  double best = -1e300;
  int best_lag = 99;
  for (int lag = -5; lag <= 5; ++lag) {
    double c = 0.0;
    for (std::size_t i = 500; i < 2500; ++i) c += s[i] * fs8[static_cast<std::size_t>(static_cast<int>(i) + lag)];
    if (c > best) {
      best = c;
      best_lag = lag;
    }
  }
  CHECK(best_lag == 0);
}

TEST_CASE("bandpass rejects invalid edges") {
  auto r = make_rec({"A"}, {Series(1000, 0.0)}, 100.0);
  CHECK_THROWS_AS(bandpass(r, 0.0, 10.0), Error);
  CHECK_THROWS_AS(bandpass(r, 10.0, 5.0), Error);
  CHECK_THROWS_AS(bandpass(r, 1.0, 50.0), Error);
}

TEST_CASE("rereference examples") {
  auto r = make_rec({"X", "M1", "M2"}, {{1, 1}, {2, 2}, {0, 0}});
  const auto out = rereference(r, "M1", "M2");
  REQUIRE(out.channels == std::vector<std::string>{"X"});
  CHECK(out.samples[0] == Series{0, 0});
  const auto swapped = rereference(r, "M2", "M1");
  CHECK(swapped.samples == out.samples);

  auto z = make_rec({"X", "Y", "M1", "M2"}, {{1, 2}, {3, 4}, {0, 0}, {0, 0}});
  const auto zo = rereference(z, "M1", "M2");
  CHECK(zo.channels == std::vector<std::string>{"X", "Y"});
  CHECK(zo.samples[0] == Series{1, 2});
  CHECK(zo.samples[1] == Series{3, 4});
  CHECK_THROWS_AS(rereference(z, "M1", "Q"), Error);
}

TEST_CASE("epoching at probe onset") {
  const double fs = 100.0;
  Series x(2000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
  auto r = make_rec({"A"}, {x}, fs);

  SUBCASE("probe at 15 s, rating 2 covers [5, 15) and is MW") {
    r.events = {{15.0, 2}};
    const auto ep = epoch_and_label(r, 10.0);
    REQUIRE(ep.size() == 1);
    CHECK(ep[0].label == Label::MW);
    CHECK(ep[0].window[0].size() == 1000);
    CHECK(ep[0].window[0].front() == 500.0);
    CHECK(ep[0].window[0].back() == 1499.0);
    CHECK(ep[0].source_probe_time_s == 15.0);
  }
  SUBCASE("rating 4 emits nothing") {
    r.events = {{15.0, 4}};
    CHECK(epoch_and_label(r, 10.0).empty());
  }
  SUBCASE("probe at 6 s has too little history") {
    r.events = {{6.0, 2}, {15.0, 6}};
    const auto ep = epoch_and_label(r, 10.0);
    REQUIRE(ep.size() == 1);
    CHECK(ep[0].label == Label::NonMW);
  }
}

TEST_CASE("single-class subjects are dropped") {
  SubjectDataset ds;
  ds.fs = 1;
  ds.window_s = 1;
  ds.channels = {"A"};
  LabeledEpoch mw;
  mw.label = Label::MW;
  LabeledEpoch non;
  non.label = Label::NonMW;
  ds.subjects = {{"S1", {mw, mw}}, {"S2", {mw, non}}};
  const auto out = drop_single_class_subjects(ds);
  REQUIRE(out.subjects.size() == 1);
  CHECK(out.subjects[0].subject_id == "S2");
  ds.subjects = {{"S1", {mw, mw}}, {"S2", {non}}};
  CHECK_THROWS_AS(drop_single_class_subjects(ds), Error);
}

TEST_CASE("synthetic dataset is reproducible and independent of thread count") {
  SynthSpec s;
  s.n_subjects = 3;
  s.epochs_per_subject = 6;
  s.n_channels = 4;
  s.fs = 200.0;
  s.window_s = 2.0;
  s.seed = 42;
  const auto a = synth_dataset(s, 1);
  const auto b = synth_dataset(s, 3);
  REQUIRE(a.subjects.size() == 3);
  for (std::size_t i = 0; i < a.subjects.size(); ++i) {
    REQUIRE(a.subjects[i].epochs.size() == 6);
    std::size_t mw = 0;
    for (std::size_t e = 0; e < 6; ++e) {
      CHECK(a.subjects[i].epochs[e].window == b.subjects[i].epochs[e].window);
      CHECK(a.subjects[i].epochs[e].label == b.subjects[i].epochs[e].label);
      CHECK(a.subjects[i].epochs[e].window[0].size() == 400);
      mw += a.subjects[i].epochs[e].label == Label::MW;
    }
    CHECK(mw == 3);
  }
  CHECK(a.provenance.count("separation") == 1);
  CHECK(a.provenance.at("seed") == "42");
  s.seed = 43;
  const auto c = synth_dataset(s, 1);
  CHECK(c.subjects[0].epochs[0].window != a.subjects[0].epochs[0].window);
}

TEST_CASE("synthetic generator rejects bad specs") {
  SynthSpec s;
  s.n_subjects = 1;
  CHECK_THROWS_AS(synth_dataset(s), Error);
  s = {};
  s.epochs_per_subject = 3;
  CHECK_THROWS_AS(synth_dataset(s), Error);
  s = {};
  s.informative_channels = {9};
  CHECK_THROWS_AS(synth_dataset(s), Error);
}

TEST_CASE("recordings laid out from a dataset epoch back to identical windows") {
  SynthSpec s;
  s.n_subjects = 2;
  s.epochs_per_subject = 4;
  s.n_channels = 2;
  s.fs = 128.0;
  s.window_s = 1.5;
  const auto ds = synth_dataset(s);
  const auto recs = to_recordings(ds);
  REQUIRE(recs.size() == 2);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto ep = epoch_and_label(recs[i], s.window_s);
    REQUIRE(ep.size() == ds.subjects[i].epochs.size());
    for (std::size_t e = 0; e < ep.size(); ++e) {
      CHECK(ep[e].window == ds.subjects[i].epochs[e].window);
      CHECK(ep[e].label == ds.subjects[i].epochs[e].label);
    }
  }
}
