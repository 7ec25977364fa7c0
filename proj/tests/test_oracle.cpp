#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qtfkit/oracle.hpp"
#include "qtfkit/qtf.hpp"
#include "qtfkit/siggen.hpp"
#include "test_util.hpp"

using namespace qtfkit;
using oracle::Alignment;
using oracle::WindowSpec;

TEST_CASE("window width in samples") {
  CHECK(WindowSpec{0.05, Alignment::kCausal}.samples(1000.0) == 50);
  CHECK_THROWS_AS((WindowSpec{0.001, Alignment::kCausal}).samples(1000.0), std::invalid_argument);
  CHECK_THROWS_AS((WindowSpec{0.0, Alignment::kCausal}).samples(1000.0), std::invalid_argument);
}

TEST_CASE("windowed quantile of a constant is the constant") {
  const SampleSeries c = constant(100.0, 300, 4.5);
  for (auto a : {Alignment::kCausal, Alignment::kCentered}) {
    const SampleSeries out = oracle::windowed_quantile(c, {0.2, a}, 0.3);
    for (double v : out.values()) CHECK(v == 4.5);
  }
}

TEST_CASE("windowed median of 1..5") {
  const SampleSeries s(1.0, {1, 2, 3, 4, 5});
  const SampleSeries out = oracle::windowed_quantile(s, {5.0, Alignment::kCentered}, 0.5);
  CHECK(out[2] == 3.0);
  CHECK(out[0] == doctest::Approx(2.0));  // truncated window {1, 2, 3}
  const SampleSeries causal = oracle::windowed_quantile(s, {5.0, Alignment::kCausal}, 0.5);
  CHECK(causal[4] == 3.0);
  CHECK(causal[0] == 1.0);
  CHECK_THROWS_AS(oracle::windowed_quantile(s, {6.0, Alignment::kCausal}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(oracle::windowed_quantile(s, {2.0, Alignment::kCausal}, 1.0), std::invalid_argument);
}

TEST_CASE("windowed quantile matches a brute-force sort") {
  const auto g = testutil::gaussian(600, 31);
  const SampleSeries s(100.0, g);
  for (auto a : {Alignment::kCausal, Alignment::kCentered}) {
    for (double q : {0.25, 0.5, 0.9}) {
      const SampleSeries out = oracle::windowed_quantile(s, {0.37, a}, q);
      for (std::size_t n = 0; n < g.size(); ++n) {
        const std::size_t w = 37;
        std::size_t lo, hi;
        if (a == Alignment::kCausal) {
          lo = n + 1 >= w ? n + 1 - w : 0;
          hi = n + 1;
        } else {
          lo = n >= 18 ? n - 18 : 0;
          hi = std::min(g.size(), n + 19);
        }
        std::vector<double> win(g.begin() + static_cast<std::ptrdiff_t>(lo), g.begin() + static_cast<std::ptrdiff_t>(hi));
        REQUIRE(out[n] == doctest::Approx(testutil::ref_quantile(win, q)).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("Gaussian window quartile") {
  const SampleSeries s(1000.0, testutil::gaussian(1001, 2));
  const SampleSeries out = oracle::windowed_quantile(s, {1.001, Alignment::kCausal}, 0.75);
  CHECK(std::abs(out[1000] - 0.6745) <= 0.05);
  CHECK(oracle::stationary_quantile(s, 0.75) == doctest::Approx(out[1000]).epsilon(1e-14));
}

TEST_CASE("stationary quantile") {
  std::vector<double> lin(401);
  for (std::size_t i = 0; i < lin.size(); ++i) lin[i] = static_cast<double>(i) / 400.0;
  const SampleSeries r(1.0, lin);
  CHECK(oracle::stationary_quantile(r, 0.75) == doctest::Approx(0.75));
  CHECK(std::abs(oracle::stationary_quantile(r, 0.25) - 0.25) <= 1.0 / 401.0);

  std::vector<double> sym(lin.size());
  for (std::size_t i = 0; i < lin.size(); ++i) sym[i] = 2.0 * lin[i] - 1.0;
  CHECK(std::abs(oracle::stationary_quantile(SampleSeries(1.0, sym), 0.5)) <= 1e-12);
  CHECK_THROWS_AS(oracle::stationary_quantile(SampleSeries(1.0, {}), 0.5), std::invalid_argument);
}

TEST_CASE("stationary quantile solves the sign balance") {
  const auto g = testutil::gaussian(5000, 19);
  const SampleSeries s(1.0, g);
  for (double q : {0.2, 0.5, 0.8}) {
    const double Q = oracle::stationary_quantile(s, q);
    double balance = 0.0;
    for (double x : g) balance += (x > Q) - (x < Q);
    balance /= static_cast<double>(g.size());
    CHECK(std::abs(balance - (1.0 - 2.0 * q)) <= 2.0 / static_cast<double>(g.size()));
  }
}

TEST_CASE("slow QTF settles at the stationary quantile") {
  const SampleSeries s(1000.0, testutil::gaussian(400000, 23));
  const double Q = oracle::stationary_quantile(s, 0.75);
  const SampleSeries out = qtf_run(s, {0.75, 2.0, 0.0});
  CHECK(std::abs(testutil::mean(out.values(), 200000) - Q) <= 0.03);
}

TEST_CASE("hampel replaces isolated spikes only") {
  auto g = testutil::gaussian(2000, 3);
  const std::vector<std::size_t> spikes{100, 700, 1500};
  for (auto i : spikes) g[i] += 40.0;
  const SampleSeries s(100.0, g);
  const SampleSeries out = oracle::hampel(s, {0.21, Alignment::kCentered}, 3.0);
  for (auto i : spikes) CHECK(std::abs(out[i]) < 3.0);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const std::size_t lo = n >= 10 ? n - 10 : 0, hi = std::min(g.size(), n + 11);
    std::vector<double> win(g.begin() + static_cast<std::ptrdiff_t>(lo), g.begin() + static_cast<std::ptrdiff_t>(hi));
    const double med = testutil::ref_quantile(win, 0.5);
    for (double& v : win) v = std::abs(v - med);
    const double mad = oracle::kMadScale * testutil::ref_quantile(win, 0.5);
    REQUIRE(out[n] == (std::abs(g[n] - med) > 3.0 * mad ? med : g[n]));
  }

  const SampleSeries c = constant(10.0, 50, 1.0);
  const SampleSeries same = oracle::hampel(c, {0.5, Alignment::kCentered}, 3.0);
  for (double v : same.values()) CHECK(v == 1.0);
  CHECK_THROWS_AS(oracle::hampel(c, {0.5, Alignment::kCentered}, 0.0), std::invalid_argument);
}
