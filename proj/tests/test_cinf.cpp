#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qtfkit/analysis.hpp"
#include "qtfkit/cinf.hpp"
#include "qtfkit/siggen.hpp"
#include "test_util.hpp"

using namespace qtfkit;

namespace {

constexpr double kRate = 20000.0;

CinfConfig config(double mu) {
  CinfConfig c;
  c.signal_band = {1800.0, 2200.0};
  c.final_band = c.signal_band;
  c.fir_taps = 255;
  c.fence = {1.5, mu, 0.0};
  return c;
}

SampleSeries impulsive_mix(std::size_t n, std::uint64_t seed) {
  NoiseSpec s;
  s.kind = NoiseSpec::Kind::kMixture;
  s.sigma = 0.05;
  s.impulse_rate_hz = 80.0;
  s.impulse_amplitude = 3.0;
  s.frontend_bandwidth_hz = 8000.0;
  s.seed = seed;
  const SampleSeries imp = noise(kRate, static_cast<double>(n) / kRate, s);
  return add(imp, am_tone(constant(kRate, n, 1.0), 2000.0));
}

}  // namespace

TEST_CASE("cleaned output is bandpass plus the fenced excess band") {
  const SampleSeries x = impulsive_mix(16384, 3);
  const CinfOutput out = cinf_run(x, config(4000.0));
  REQUIRE(out.mask.any());
  for (std::size_t i = 0; i < x.size(); ++i) REQUIRE(out.cleaned[i] == out.bandpassed[i] + out.excess_band_inf[i]);
  CHECK(out.split_delay == 127);
  CHECK(out.passband_delay == 254);
}

TEST_CASE("no outliers means no change") {
  const SampleSeries x = am_tone(constant(kRate, 16384, 1.0), 2000.0);
  // Excess band of a pure in-band tone is near zero; any positive rate keeps it inside.
  const CinfOutput out = cinf_run(x, config(1000.0));
  CHECK_FALSE(out.mask.any());
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(out.passband_cinf[i] - out.passband_linear[i]));
  CHECK(worst <= 1e-12);
}

TEST_CASE("linear passband equals the delayed final filter") {
  const SampleSeries x(kRate, testutil::gaussian(4096, 5));
  const CinfConfig c = config(100.0);
  const CinfFilters f = design_cinf_filters(c, kRate);
  const CinfOutput out = cinf_run(x, c);
  const SampleSeries ref = delay(apply_filter(f.final_filter, x), out.split_delay);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(out.passband_linear[i] == ref[i]);
}

TEST_CASE("CINF improves the passband on impulsive noise") {
  const std::size_t n = 1 << 16;
  const SampleSeries signal = am_tone(constant(kRate, n, 1.0), 2000.0);
  const SampleSeries x = impulsive_mix(n, 12);
  const CinfConfig c = config(inclusive_mu(max_slew(signal), 1.5) / 3.0);
  const CinfOutput out = cinf_run(x, c);
  const CinfFilters f = design_cinf_filters(c, kRate);
  const SampleSeries ref = delay(apply_filter(f.final_filter, signal), out.split_delay);
  const double skip = 0.1;
  CHECK(residual_rms(out.passband_cinf, ref, skip) < residual_rms(out.passband_linear, ref, skip));
}

TEST_CASE("stream, batch and pipelined runs agree exactly") {
  const SampleSeries x = impulsive_mix(20000, 8);
  for (const auto& cfg : {config(3000.0), [] {
                            CinfConfig c = config(3000.0);
                            c.final_band = {1900.0, 2100.0};
                            c.fence.eps = 0.01;
                            return c;
                          }()}) {
    const CinfOutput batch = cinf_run(x, cfg);
    CinfStream stream(cfg, kRate);
    CHECK(stream.split_delay() == batch.split_delay);
    CHECK(stream.passband_delay() == batch.passband_delay);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto o = stream.push(x[i]);
      REQUIRE(o.cleaned == batch.cleaned[i]);
      REQUIRE(o.passband_cinf == batch.passband_cinf[i]);
      REQUIRE(o.passband_linear == batch.passband_linear[i]);
      REQUIRE(o.flagged == batch.mask.flags[i]);
    }
    for (std::size_t block : {1000u, 4096u, 30000u}) {
      const CinfOutput piped = cinf_run_pipelined(x, cfg, block, 2);
      CHECK(piped.cleaned.values() == batch.cleaned.values());
      CHECK(piped.passband_cinf.values() == batch.passband_cinf.values());
      CHECK(piped.passband_linear.values() == batch.passband_linear.values());
      CHECK(piped.excess_band_inf.values() == batch.excess_band_inf.values());
      CHECK(piped.mask.flags == batch.mask.flags);
    }
  }
}

TEST_CASE("config validation") {
  CinfConfig c = config(10.0);
  c.fir_taps = 254;
  CHECK_THROWS_AS(cinf_run(SampleSeries(kRate, testutil::gaussian(1000, 1)), c), std::invalid_argument);
  c = config(10.0);
  c.signal_band = {1800.0, 12000.0};
  CHECK_THROWS_AS(cinf_run(SampleSeries(kRate, testutil::gaussian(1000, 1)), c), std::invalid_argument);
  CHECK_THROWS_AS(cinf_run(SampleSeries(kRate, {}), config(10.0)), std::invalid_argument);
}

TEST_CASE("separation with no wide component") {
  const std::size_t n = 1 << 14;
  const SampleSeries narrow = am_tone(constant(kRate, n, 1.0), 2000.0);
  CinfConfig c = config(inclusive_mu(max_slew(narrow), 1.5));
  c.warmup_s = 0.05;
  const SeparationResult r = separate_wide_narrow(narrow, c, 99, narrow);
  CHECK(r.flagged == 0);
  CHECK(r.delta_cinf == doctest::Approx(r.delta_linear).epsilon(1e-9));
  for (std::size_t i = 0; i < n; ++i) REQUIRE(std::abs(r.wide[i] + r.narrow[i] - narrow[i]) <= 1e-9);
  CHECK_THROWS_AS(separate_wide_narrow(SampleSeries(kRate, testutil::gaussian(1000, 1)), c, 1,
                                       SampleSeries(kRate, testutil::gaussian(1000, 1))),
                  std::invalid_argument);
}

TEST_CASE("excess-band impulses are flagged near where they occur") {
  const double rate = 48000.0, f_c = 2000.0;
  const std::size_t n = 48000;
  const SampleSeries chirp = linear_chirp(rate, 0.0, f_c, 1.0, 1.0);
  std::vector<double> spikes(n, 0.0);
  const std::vector<std::size_t> at{20000, 30000, 40000};
  for (auto i : at) spikes[i] = 20.0;
  const SampleSeries mix = add(chirp, apply_filter(bessel_lowpass(rate, 6000.0, 4), SampleSeries(rate, spikes)));
  const ChirpDemoResult d = chirp_excess_band_demo(mix, f_c, 1.0);
  CHECK(d.mu_max == doctest::Approx(2.0 * std::numbers::pi * f_c));
  CHECK(d.mu_robust == doctest::Approx(0.2 * d.mu_max));
  const std::size_t lag = excess_band_filter(rate, f_c).bandstop.group_delay();
  for (auto i : at) {
    bool hit = false;
    for (std::size_t k = i + lag; k < i + lag + 48; ++k) hit = hit || d.mask_excess.flags[k];
    CHECK(hit);
  }
}
