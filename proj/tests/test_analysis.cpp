#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qtfkit/analysis.hpp"
#include "qtfkit/siggen.hpp"
#include "test_util.hpp"

using namespace qtfkit;

TEST_CASE("white noise density is flat at 2 sigma^2 / rate") {
  const double rate = 1000.0;
  const SampleSeries x(rate, testutil::gaussian(1 << 18, 3));
  const PsdEstimate p = psd_welch(x);
  CHECK(p.freqs_hz.size() == kWelchSegment / 2 + 1);
  CHECK(p.freqs_hz.back() == doctest::Approx(rate / 2.0));
  CHECK(p.window_name == "hann");
  double mean_db = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 1; k + 1 < p.power_density.size(); ++k, ++n) mean_db += p.power_density[k];
  mean_db = testutil::db(mean_db / static_cast<double>(n) / (2.0 / rate));
  CHECK(std::abs(mean_db) <= 1.0);
}

TEST_CASE("tone lands in its bin and keeps its power") {
  const double rate = 8192.0;
  std::vector<double> x(1 << 15);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 3.0 * std::sin(2.0 * std::numbers::pi * 1000.0 * static_cast<double>(i) / rate);
  const PsdEstimate p = psd_welch(SampleSeries(rate, x));
  std::size_t arg = 0;
  for (std::size_t k = 0; k < p.power_density.size(); ++k) {
    if (p.power_density[k] > p.power_density[arg]) arg = k;
  }
  CHECK(p.freqs_hz[arg] == doctest::Approx(1000.0));
  CHECK(band_power(p, {0.0, rate / 2.0}) == doctest::Approx(4.5).epsilon(0.02));
}

TEST_CASE("integrated PSD matches the mean square") {
  const SampleSeries x = noise(20000.0, 5.0, [] {
    NoiseSpec s;
    s.frontend_bandwidth_hz = 3000.0;
    s.seed = 8;
    return s;
  }());
  double ms = 0.0;
  for (double v : x.values()) ms += v * v;
  ms /= static_cast<double>(x.size());
  const PsdEstimate p = psd_welch(x);
  CHECK(std::abs(band_power(p, {0.0, 10000.0}) / ms - 1.0) <= 0.02);
}

TEST_CASE("band power is additive") {
  const PsdEstimate p = psd_welch(SampleSeries(1000.0, testutil::gaussian(20000, 5)), 256, 0.5);
  const double whole = band_power(p, {10.3, 400.7});
  const double parts = band_power(p, {10.3, 123.4}) + band_power(p, {123.4, 250.0}) + band_power(p, {250.0, 400.7});
  CHECK(parts == doctest::Approx(whole).epsilon(1e-12));
  CHECK(band_power(p, {100.0, 200.0}) >= 0.0);
  CHECK_THROWS_AS(band_power(p, {200.0, 100.0}), std::invalid_argument);
  CHECK_THROWS_AS(band_power(p, {0.0, 600.0}), std::invalid_argument);
}

TEST_CASE("welch argument checks") {
  const SampleSeries x(1.0, testutil::gaussian(100, 1));
  CHECK_THROWS_AS(psd_welch(x, 200), std::invalid_argument);
  CHECK_THROWS_AS(psd_welch(x, 64, 1.0), std::invalid_argument);
  CHECK_NOTHROW(psd_welch(x, 64, 0.0));
}

TEST_CASE("residual_rms") {
  const SampleSeries a(10.0, {1, 2, 3, 4});
  CHECK(residual_rms(a, a) == 0.0);
  const SampleSeries b(10.0, {1, 2, 3, 6});
  CHECK(residual_rms(a, b) == doctest::Approx(1.0));
  CHECK(residual_rms(a, b, 0.3) == doctest::Approx(2.0));
  CHECK(residual_rms(a, b, 1.0) == 0.0);
  CHECK_THROWS(residual_rms(a, SampleSeries(20.0, {1, 2, 3, 4})));
  CHECK_THROWS(residual_rms(a, SampleSeries(10.0, {1, 2, 3})));

  const SampleSeries g(1.0, testutil::gaussian(50, 2)), h(1.0, testutil::gaussian(50, 3));
  CHECK(residual_rms(g, h) >= 0.0);
  CHECK(residual_rms(g, h) == doctest::Approx(residual_rms(h, g)));
  CHECK(db_ratio(10.0, 1.0) == doctest::Approx(10.0));
}
