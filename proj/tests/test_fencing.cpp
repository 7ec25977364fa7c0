#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qtfkit/fencing.hpp"
#include "qtfkit/oracle.hpp"
#include "qtfkit/siggen.hpp"
#include "test_util.hpp"

using namespace qtfkit;

namespace {

FenceSeries fences_from(const std::vector<double>& q1, const std::vector<double>& q3, double beta) {
  std::vector<double> lo(q1.size()), up(q1.size()), mid(q1.size());
  for (std::size_t i = 0; i < q1.size(); ++i) {
    const double spread = q3[i] - q1[i];
    lo[i] = q1[i] - beta * spread;
    up[i] = q3[i] + beta * spread;
    mid[i] = 0.5 * (q1[i] + q3[i]);
  }
  return {SampleSeries(1.0, lo), SampleSeries(1.0, up), SampleSeries(1.0, mid),
          SampleSeries(1.0, q1), SampleSeries(1.0, q3), beta, 0};
}

}  // namespace

TEST_CASE("constant input collapses the fences") {
  const SampleSeries c = constant(100.0, 400, -1.25);
  const FenceSeries f = compute_fences(c, {1.5, 2.0, 0.0});
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(f.lower[i] == -1.25);
    CHECK(f.upper[i] == -1.25);
  }
  const SampleSeries w = range_width(f, 1.5);
  for (double v : w.values()) CHECK(v == 0.0);
  CHECK_FALSE(detect_outliers(c, f).any());
}

TEST_CASE("fence arithmetic") {
  const FenceSeries f = fences_from({-1.0}, {1.0}, 1.5);
  CHECK(f.lower[0] == doctest::Approx(-4.0));
  CHECK(f.upper[0] == doctest::Approx(4.0));
  CHECK(range_width(f, 1.5)[0] == doctest::Approx(8.0));
  CHECK(range_width(fences_from({3.0}, {5.0}, 1.5), 1.5)[0] == doctest::Approx(8.0));
  CHECK(range_width(fences_from({0.0}, {1.0}, 3.0), 3.0)[0] == doctest::Approx(7.0));
  CHECK(range_width(fences_from({2.0}, {2.0}, 3.0), 3.0)[0] == 0.0);
}

TEST_CASE("trackers that cross during start-up are swapped") {
  // Starting at x(0) and stepping down, the q = 3/4 tracker moves less than
  // the q = 1/4 one, so the raw outputs invert briefly.
  std::vector<double> x(200, 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) x[i] = -10.0;
  const FenceSeries f = compute_fences(SampleSeries(100.0, x), {1.5, 1.0, 0.0});
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(f.q1[i] <= f.q3[i]);
    CHECK(f.lower[i] <= f.upper[i]);
    CHECK(f.midhinge[i] == doctest::Approx(0.5 * (f.q1[i] + f.q3[i])));
  }
}

TEST_CASE("detect_outliers is strict") {
  const FenceSeries f = fences_from({-1, -1, -1, -1}, {1, 1, 1, 1}, 1.5);
  CHECK_FALSE(detect_outliers(SampleSeries(1.0, {0, 4, -4, 3.9}), f).any());
  const OutlierMask m = detect_outliers(SampleSeries(1.0, {0, 5, -4, 3.9}), f);
  CHECK(m.count() == 1);
  CHECK(m.flags[1]);
}

TEST_CASE("inf_apply replaces only flagged samples") {
  const FenceSeries f = fences_from({0.1, 0.1, 0.1}, {0.5, 0.5, 0.5}, 1.5);
  const SampleSeries s(1.0, {0.2, 9.0, -0.7});
  const OutlierMask none{{false, false, false}};
  const SampleSeries same = inf_apply(s, f, none);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(same[i] == s[i]);

  const OutlierMask one{{false, true, false}};
  const SampleSeries mid = inf_apply(s, f, one);
  CHECK(mid[0] == s[0]);
  CHECK(mid[1] == doctest::Approx(0.3));
  CHECK(mid[2] == s[2]);
  const SampleSeries clamped = inf_apply(s, f, one, Replacement::kClampToFence);
  CHECK(clamped[1] == doctest::Approx(0.5 + 1.5 * 0.4));
  CHECK_THROWS_AS(inf_apply(s, f, OutlierMask{{true}}), std::invalid_argument);
}

TEST_CASE("inf_filter rejects empty input") {
  CHECK_THROWS_AS(inf_filter(SampleSeries(1.0, {}), {1.5, 1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(compute_fences(SampleSeries(1.0, {1.0}), {0.0, 1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("tone fences approach +/- 2 sqrt2 A") {
  const SampleSeries x = am_tone(constant(10000.0, 200000, 2.0), 10.0);
  const FenceSeries f = compute_fences(x, {1.5, 0.5, 0.0});
  const double expect = 2.0 * std::numbers::sqrt2 * 2.0;
  CHECK(std::abs(testutil::mean(f.upper.values(), 150000) - expect) <= 0.05 * expect);
  CHECK(std::abs(testutil::mean(f.lower.values(), 150000) + expect) <= 0.05 * expect);
}

TEST_CASE("rate helpers") {
  CHECK(inclusive_mu(6.0, 1.5) == doctest::Approx(2.0));
  CHECK(inclusive_mu(0.0, 1.5) == 0.0);
  CHECK(protrusion_slew(2.0, 1.5) == doctest::Approx(6.0));
  CHECK(protrusion_slew(inclusive_mu(7.3, 0.8), 0.8) == doctest::Approx(7.3));
}

TEST_CASE("inclusive rate contains smooth signals after warm-up") {
  qtfkit::Rng rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> x(5000);
    const double f1 = 1.0 + 30.0 * rng.uniform(), f2 = 1.0 + 30.0 * rng.uniform();
    const double a1 = rng.normal(), a2 = rng.normal();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double t = static_cast<double>(i) / 1000.0;
      x[i] = a1 * std::sin(2 * std::numbers::pi * f1 * t) + a2 * std::cos(2 * std::numbers::pi * f2 * t);
    }
    const SampleSeries s(1000.0, x);
    const double beta = 0.5 + 2.5 * rng.uniform();
    const FenceParams p{beta, inclusive_mu(max_slew(s), beta), 0.0};
    const OutlierMask m = detect_outliers(s, compute_fences(s, p));
    const std::size_t warm = fence_warmup_samples(s, p.mu);
    std::size_t after = 0;
    for (std::size_t i = warm; i < m.size(); ++i) after += m.flags[i];
    CHECK(after == 0);
  }
}

TEST_CASE("protrusion onsets need a steep step") {
  qtfkit::Rng rng(99);
  const double rate = 1000.0;
  std::vector<double> x(20000);
  for (auto& v : x) v = rng.normal() + (rng.uniform() < 0.01 ? 20.0 * rng.normal() : 0.0);
  const SampleSeries s(rate, x);
  for (double beta : {0.5, 1.5, 3.0}) {
    const double mu = 40.0;
    const OutlierMask m = detect_outliers(s, compute_fences(s, {beta, mu, 0.0}));
    REQUIRE(m.any());
    for (std::size_t i = 1; i < m.size(); ++i) {
      if (m.flags[i] && !m.flags[i - 1]) CHECK(std::abs(x[i] - x[i - 1]) * rate > protrusion_slew(mu, beta));
    }
  }
}

TEST_CASE("a second pass with the same fences flags nothing") {
  const SampleSeries s(1000.0, [] {
    auto g = testutil::gaussian(20000, 5);
    for (std::size_t i = 0; i < g.size(); i += 97) g[i] += 15.0;
    return g;
  }());
  const InfResult r = inf_filter(s, {1.5, 30.0, 0.0});
  REQUIRE(r.mask.any());
  CHECK_FALSE(detect_outliers(r.cleaned, r.fences).any());
}

TEST_CASE("QTF fences match oracle-window fences on Gaussian noise") {
  const double rate = 10000.0, window = 0.05;
  const SampleSeries x(rate, testutil::gaussian(1 << 16, 17));
  const double range = iqr(x);
  const FenceSeries f = compute_fences(x, {1.5, 2.0 * range / window, 0.0});
  const oracle::WindowSpec w{window, oracle::Alignment::kCausal};
  const SampleSeries o1 = oracle::windowed_quantile(x, w, 0.25);
  const SampleSeries o3 = oracle::windowed_quantile(x, w, 0.75);
  double up = 0.0, lo = 0.0;
  std::size_t n = 0;
  for (std::size_t i = f.warmup_samples; i < x.size(); ++i, ++n) {
    const double ou = o3[i] + 1.5 * (o3[i] - o1[i]);
    const double ol = o1[i] - 1.5 * (o3[i] - o1[i]);
    up += (f.upper[i] - ou) * (f.upper[i] - ou);
    lo += (f.lower[i] - ol) * (f.lower[i] - ol);
  }
  CHECK(std::sqrt(up / n) <= 0.2 * range);
  CHECK(std::sqrt(lo / n) <= 0.2 * range);
}

TEST_CASE("streaming INF equals batch INF") {
  auto g = testutil::gaussian(30000, 44);
  for (std::size_t i = 0; i < g.size(); i += 301) g[i] *= 12.0;
  const SampleSeries s(2000.0, g);
  for (auto mode : {Replacement::kMidhinge, Replacement::kClampToFence}) {
    for (double eps : {0.0, 0.05}) {
      const FenceParams p{1.5, 25.0, eps};
      const InfResult batch = inf_filter(s, p, mode);
      StreamingInf stream(p, s.rate_hz(), mode);
      for (std::size_t i = 0; i < s.size(); ++i) {
        const auto o = stream.push(s[i]);
        REQUIRE(o.value == batch.cleaned[i]);
        REQUIRE(o.flagged == batch.mask.flags[i]);
        REQUIRE(o.upper == batch.fences.upper[i]);
      }
    }
  }
}

TEST_CASE("warm-up length is 2 IQR / mu") {
  const SampleSeries s(100.0, {1, 2, 3, 4, 5, 6, 7, 8});
  // IQR = 6.25 - 2.75 = 3.5; 2 * 3.5 / 7 = 1 s = 100 samples, capped at the length.
  CHECK(fence_warmup_samples(s, 7.0) == 8);
  CHECK(fence_warmup_samples(s, 7000.0) == 1);
}
