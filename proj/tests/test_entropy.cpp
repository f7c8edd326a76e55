#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "mwd/entropy.hpp"
#include "oracles.hpp"

using namespace mwd;

TEST_CASE("coarse_grain examples") {
  CHECK(coarse_grain(Series{1, 2, 3, 4, 5, 6}, 2) == Series{1.5, 3.5, 5.5});
  CHECK(coarse_grain(Series{1, 2, 3, 4, 5, 6, 7}, 3) == Series{2, 5});
  const auto x = oracle::gaussian(37, 3);
  CHECK(coarse_grain(x, 1) == x);
  CHECK_THROWS_AS(coarse_grain(x, 0), Error);
  CHECK_THROWS_AS(coarse_grain(x, 38), Error);
}

TEST_CASE("coarse_grain preserves the mean of the covered prefix") {
  const auto x = oracle::gaussian(1003, 4);
  for (int tau : {2, 5, 7, 20}) {
    const auto y = coarse_grain(x, tau);
    CHECK(y.size() == x.size() / static_cast<std::size_t>(tau));
    const std::span<const double> prefix(x.data(), y.size() * static_cast<std::size_t>(tau));
    CHECK(std::abs(mean(y) - mean(prefix)) <= 1e-12);
  }
}

TEST_CASE("sample entropy examples") {
  CHECK(sample_entropy(Series(100, 1.0), 2, 0.2) == 0.0);
  Series ramp(50);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i);
  try {
    sample_entropy(ramp, 2, 0.5);
    FAIL("expected UndefinedEntropy");
  } catch (const UndefinedEntropy& e) {
    CHECK(e.kind() == ErrorKind::Undefined);
    CHECK(e.matches_m() == 0);
  }
  const auto x = oracle::gaussian(64, 11);
  const double r = 0.2 * oracle::sd_unbiased(x);
  CHECK(std::abs(sample_entropy(x, 2, r) - oracle::sample_entropy(x, 2, r)) <= 1e-12);
  CHECK_THROWS_AS(sample_entropy(x, 2, 0.0), Error);
  CHECK_THROWS_AS(sample_entropy(Series{1, 2, 3}, 2, 1.0), Error);
}

TEST_CASE("permutation entropy examples") {
  Series inc(10);
  for (std::size_t i = 0; i < inc.size(); ++i) inc[i] = static_cast<double>(i + 1);
  CHECK(permutation_entropy(inc, 3, 1) == 0.0);
  const double h = -(4.0 / 6) * std::log(4.0 / 6) - (2.0 / 6) * std::log(2.0 / 6);
  CHECK(permutation_entropy(Series{4, 7, 9, 10, 6, 11, 3}, 2, 1) == doctest::Approx(h).epsilon(1e-14));
  CHECK(permutation_entropy(Series{1, 2, 1, 2, 1}, 2, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(permutation_entropy(Series{1, 2, 3}, 3, 1), Error);
}

TEST_CASE("permutation entropy ties rank the earlier sample lower") {
  // [5, 5] ties: earlier index lower -> ascending pattern, same as [1, 2].
  CHECK(permutation_entropy(Series{5, 5, 5, 5}, 2, 1) == 0.0);
  CHECK(permutation_entropy(Series{5, 5, 6, 7, 8}, 2, 1) == 0.0);
  const Series t{3, 1, 3, 3, 2, 2, 1, 1, 3};
  CHECK(permutation_entropy(t, 3, 1) == doctest::Approx(oracle::permutation_entropy({t.begin(), t.end()}, 3, 1)).epsilon(1e-14));
}

TEST_CASE("dispersion family matches enumeration oracles on short series") {
  const auto x = oracle::gaussian(30, 21);
  CHECK(std::abs(dispersion_entropy(x, 2, 3, 1) - oracle::dispersion_entropy(x, 2, 3, 1)) <= 1e-12);
  CHECK(std::abs(fluctuation_dispersion_entropy(x, 3, 3, 1) - oracle::fluctuation_dispersion_entropy(x, 3, 3, 1)) <=
        1e-12);
}

TEST_CASE("dispersion classes span 1..c and clamp") {
  const auto z = dispersion_classes(Series{-1e9, 0.0, 1e9}, 6, {0.0, 1.0});
  CHECK(z == std::vector<int>{1, 4, 6});
  CHECK_THROWS_AS(dispersion_entropy(Series(20, 3.0), 3, 6, 1), UndefinedEntropy);
  CHECK_THROWS_AS(fluctuation_dispersion_entropy(oracle::gaussian(20, 1), 1, 6, 1), Error);
}

TEST_CASE("estimators agree with naive oracles over random parameters") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(32, 300)(rng);
    const auto x = oracle::gaussian(n, 1000 + static_cast<std::uint64_t>(trial));
    const int m = std::uniform_int_distribution<int>(2, 4)(rng);
    const int d = std::uniform_int_distribution<int>(1, 3)(rng);
    const int c = std::uniform_int_distribution<int>(2, 6)(rng);
    const double r = std::uniform_real_distribution<double>(0.1, 0.5)(rng) * oracle::sd_unbiased(x);
    const double se = oracle::sample_entropy(x, 2, r);
    if (!std::isnan(se)) CHECK(std::abs(sample_entropy(x, 2, r) - se) <= 1e-9 * std::abs(se) + 1e-15);
    const double pe = oracle::permutation_entropy(x, m, d);
    CHECK(std::abs(permutation_entropy(x, m, d) - pe) <= 1e-9 * pe);
    const double de = oracle::dispersion_entropy(x, m, c, d);
    CHECK(std::abs(dispersion_entropy(x, m, c, d) - de) <= 1e-9 * de);
    const double fde = oracle::fluctuation_dispersion_entropy(x, m, c, d);
    CHECK(std::abs(fluctuation_dispersion_entropy(x, m, c, d) - fde) <= 1e-9 * fde);
  }
}

TEST_CASE("bounds and invariances") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto x = oracle::gaussian(200, s);
    Series affine(x.size());
    Series expx(x.size());
    Series shifted(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      affine[i] = 2.0 * x[i] + 3.0;
      expx[i] = std::exp(x[i]);
      shifted[i] = x[i] + 7.25;
    }
    CHECK(permutation_entropy(x, 4, 1) <= std::log(24.0));
    CHECK(dispersion_entropy(x, 3, 6, 1) <= 3.0 * std::log(6.0) + 1e-12);
    CHECK(fluctuation_dispersion_entropy(x, 3, 6, 1) <= 2.0 * std::log(11.0) + 1e-12);
    CHECK(permutation_entropy(expx, 4, 1) == permutation_entropy(x, 4, 1));
    CHECK(dispersion_entropy(affine, 3, 6, 1) == dispersion_entropy(x, 3, 6, 1));
    CHECK(fluctuation_dispersion_entropy(affine, 3, 6, 1) == fluctuation_dispersion_entropy(x, 3, 6, 1));
    CHECK(fluctuation_dispersion_entropy(shifted, 3, 6, 1) == fluctuation_dispersion_entropy(x, 3, 6, 1));
  }
}

TEST_CASE("large pattern spaces use the sparse histogram") {
  // c^m = 10^7 codes exceeds the dense limit.
  const auto x = oracle::gaussian(400, 5);
  CHECK(std::abs(dispersion_entropy(x, 7, 10, 1) - oracle::dispersion_entropy(x, 7, 10, 1)) <= 1e-12);
  CHECK(std::abs(permutation_entropy(x, 9, 1) - oracle::permutation_entropy(x, 9, 1)) <= 1e-12);
}

TEST_CASE("normalized Shannon and spectral entropy") {
  std::vector<double> two(10, 0.0);
  two[2] = 1.0;
  two[7] = 1.0;
  CHECK(normalized_shannon(two) == doctest::Approx(std::log(2.0) / std::log(10.0)).epsilon(1e-14));
  CHECK_THROWS_AS(normalized_shannon(std::vector<double>(5, 0.0)), UndefinedEntropy);
  CHECK_THROWS_AS(normalized_shannon(std::vector<double>{1.0}), Error);

  // Tone exactly on a bin with a rectangular window: all power in one bin.
  const double fs = 256.0;
  Series tone(2048);
  for (std::size_t i = 0; i < tone.size(); ++i) tone[i] = std::sin(2.0 * std::numbers::pi * 16.0 * static_cast<double>(i) / fs);
  WelchConfig rect;
  rect.window = Window::Rectangular;
  CHECK(spectral_entropy(tone, fs, std::nullopt, rect) <= 1e-9);

  double mean_h = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    std::mt19937_64 rng(s);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Series noise(8192);
    for (auto& v : noise) v = u(rng);
    mean_h += spectral_entropy(noise, 1000.0, std::nullopt);
  }
  CHECK(mean_h / 20.0 >= 0.95);

  CHECK_THROWS_AS(spectral_entropy(Series(10, 1.0), 100.0, std::nullopt), Error);
  CHECK_THROWS_AS(spectral_entropy(oracle::gaussian(1000, 1), 100.0, Band{10.0, 60.0}), Error);
}

TEST_CASE("spectral entropy is unchanged by affine maps") {
  const auto x = oracle::gaussian(4000, 8);
  Series a(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) a[i] = 2.0 * x[i] + 3.0;
  CHECK(spectral_entropy(a, 1000.0, Band{8.0, 13.0}) == doctest::Approx(spectral_entropy(x, 1000.0, Band{8.0, 13.0})).epsilon(1e-12));
}

TEST_CASE("wavelet log-energy entropy") {
  CHECK(wavelet_log_energy_entropy(Series{0, 0, 5, 0}) == 0.0);
  CHECK(wavelet_log_energy_entropy(Series{2, -2, 2, -2}) == doctest::Approx(1.0).epsilon(1e-14));
  const double p = 9.0 / 25.0;
  const double q = 16.0 / 25.0;
  const double expect = (-p * std::log(p) - q * std::log(q)) / std::log(2.0);
  CHECK(wavelet_log_energy_entropy(Series{3, 4}) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(expect == doctest::Approx(0.942683).epsilon(1e-6));
  CHECK_THROWS_AS(wavelet_log_energy_entropy(Series{0, 0}), UndefinedEntropy);
}

TEST_CASE("multiscale driver") {
  const auto x = oracle::gaussian(500, 2);
  EntropyParams p;
  p.m = 3;
  p.scales = {1};
  const auto one = multiscale(Estimator::PermEn, x, p);
  REQUIRE(one.size() == 1);
  CHECK(*one[0].value == permutation_entropy(x, 3, 1));

  p.m = 2;
  p.r = 0.15 * sample_sd(x);
  p.scales = {1, 2, 3};
  const auto se = multiscale(Estimator::SampEn, x, p);
  CHECK(*se[1].value == sample_entropy(coarse_grain(x, 2), 2, p.r));

  // Dispersion NCDF comes from the scale-1 series.
  p.m = 3;
  p.c = 6;
  p.scales = {4};
  const auto de = multiscale(Estimator::DispEn, x, p);
  CHECK(*de[0].value == dispersion_entropy(coarse_grain(x, 4), 3, 6, 1, {mean(x), sample_sd(x)}));

  const auto short_x = oracle::gaussian(100, 3);
  p.m = 2;
  p.r = 0.2;
  p.scales = {20};
  CHECK_THROWS_AS(multiscale(Estimator::SampEn, short_x, p), Error);
  const auto und = multiscale(Estimator::SampEn, short_x, p, ShortSeries::Undefined);
  CHECK_FALSE(und[0].value.has_value());

  // No-match at some scale is recorded as undefined, not substituted.
  Series ramp(400);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i);
  p.r = 0.5;
  p.scales = {1};
  const auto r = multiscale(Estimator::SampEn, ramp, p);
  CHECK_FALSE(r[0].value.has_value());
}
