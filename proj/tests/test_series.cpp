#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "qtfkit/series.hpp"
#include "qtfkit/series_io.hpp"
#include "test_util.hpp"

using namespace qtfkit;

TEST_CASE("SampleSeries rejects bad rates and non-finite samples") {
  CHECK_THROWS_AS(SampleSeries(0.0, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(SampleSeries(-5.0, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(SampleSeries(10.0, {1.0, std::nan("")}), DataError);
  CHECK_THROWS_AS(SampleSeries(10.0, {std::numeric_limits<double>::infinity()}), DataError);
}

TEST_CASE("SampleSeries time axis") {
  const SampleSeries s(4.0, {0, 1, 2, 3, 4, 5}, 2.0);
  CHECK(s.time(0) == 2.0);
  CHECK(s.time(3) == doctest::Approx(2.75));
  CHECK(s.duration() == doctest::Approx(1.5));
  CHECK(s.step() == 0.25);
}

TEST_CASE("BandSpec validation") {
  CHECK_NOTHROW((BandSpec{0.0, 50.0}).validate(100.0));
  CHECK_THROWS_AS((BandSpec{10.0, 10.0}).validate(100.0), std::invalid_argument);
  CHECK_THROWS_AS((BandSpec{-1.0, 10.0}).validate(100.0), std::invalid_argument);
  CHECK_THROWS_AS((BandSpec{10.0, 50.1}).validate(100.0), std::invalid_argument);
}

TEST_CASE("quantile follows linear interpolation between order statistics") {
  const std::vector<double> v{4, 1, 3, 2};
  CHECK(quantile(v, 0.25) == doctest::Approx(1.75));
  CHECK(quantile(v, 0.75) == doctest::Approx(3.25));
  CHECK(quantile(v, 0.0) == 1.0);
  CHECK(quantile(v, 1.0) == 4.0);
  const auto g = testutil::gaussian(1001, 3);
  for (double q : {0.1, 0.25, 0.5, 0.9}) CHECK(quantile(g, q) == doctest::Approx(testutil::ref_quantile(g, q)).epsilon(1e-14));
}

TEST_CASE("iqr") {
  CHECK(iqr(SampleSeries(1.0, {5, 5, 5, 5})) == 0.0);
  CHECK(iqr(SampleSeries(1.0, {1, 2, 3, 4})) == doctest::Approx(1.5));
  CHECK_THROWS_AS(iqr(SampleSeries(1.0, {1, 2, 3})), std::invalid_argument);

  const auto g = testutil::gaussian(1 << 16, 1);
  const double brute = testutil::ref_quantile(g, 0.75) - testutil::ref_quantile(g, 0.25);
  const double got = iqr(SampleSeries(1.0, g));
  CHECK(got == doctest::Approx(brute).epsilon(1e-14));
  CHECK(std::abs(got - 1.349) <= 0.03);
}

TEST_CASE("iqr is translation invariant and scales linearly") {
  qtfkit::Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = testutil::gaussian(257, 100 + trial);
    const double a = 10.0 * rng.normal(), b = 100.0 * rng.normal();
    std::vector<double> t(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) t[i] = a * g[i] + b;
    const double base = iqr(SampleSeries(1.0, g));
    CHECK(iqr(SampleSeries(1.0, t)) == doctest::Approx(std::abs(a) * base).epsilon(1e-12));
  }
}

TEST_CASE("crossing_rate") {
  std::vector<double> sine(10000);
  for (std::size_t i = 0; i < sine.size(); ++i) sine[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 1000.0 + 0.1);
  CHECK(std::abs(crossing_rate(SampleSeries(1000.0, sine), 0.0) - 2.0) <= 0.1);
  CHECK(crossing_rate(SampleSeries(10.0, std::vector<double>(50, 3.0)), 1.0) == 0.0);

  std::vector<double> alt(100);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 == 0 ? 1.0 : -1.0;
  CHECK(crossing_rate(SampleSeries(100.0, alt), 0.0) == doctest::Approx(99.0));

  // Samples on the level inherit the previous sign: +,0,0,+ has no crossing.
  CHECK(crossing_rate(SampleSeries(1.0, {1, 0, 0, 1}), 0.0) == 0.0);
  CHECK(crossing_rate(SampleSeries(1.0, {1, 0, 0, -1}), 0.0) == doctest::Approx(0.25));
}

TEST_CASE("crossing_rate is odd-symmetric") {
  const auto g = testutil::gaussian(5000, 9);
  std::vector<double> neg(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) neg[i] = -g[i];
  for (double level : {-0.5, 0.0, 0.3}) {
    CHECK(crossing_rate(SampleSeries(100.0, g), level) == crossing_rate(SampleSeries(100.0, neg), -level));
  }
}

TEST_CASE("par_db") {
  CHECK(par_db(SampleSeries(1.0, std::vector<double>(16, -2.0))) == doctest::Approx(0.0));
  std::vector<double> sine(1000);
  for (std::size_t i = 0; i < sine.size(); ++i) sine[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 100.0);
  CHECK(std::abs(par_db(SampleSeries(1.0, sine)) - 3.01) <= 0.05);
  std::vector<double> imp(1024, 0.0);
  imp[100] = 1.0;
  CHECK(par_db(SampleSeries(1.0, imp)) == doctest::Approx(10.0 * std::log10(1024.0)));
  CHECK_THROWS_AS(par_db(SampleSeries(1.0, std::vector<double>(8, 0.0))), std::invalid_argument);

  const auto g = testutil::gaussian(300, 4);
  std::vector<double> scaled(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) scaled[i] = -3.7 * g[i];
  CHECK(par_db(SampleSeries(1.0, scaled)) == doctest::Approx(par_db(SampleSeries(1.0, g))).epsilon(1e-12));
}

TEST_CASE("max_slew and rms") {
  CHECK(max_slew(SampleSeries(10.0, {0, 1, 3, 2})) == doctest::Approx(20.0));
  CHECK(rms(std::vector<double>{3, -4}) == doctest::Approx(std::sqrt(12.5)));
}

TEST_CASE("CSV round trip is exact") {
  const auto g = testutil::gaussian(200, 12);
  const SampleSeries s(48000.0, g, 0.5);
  std::stringstream buf;
  write_csv(buf, s);
  const SampleSeries back = read_csv(buf);
  CHECK(back.rate_hz() == doctest::Approx(48000.0).epsilon(1e-9));
  CHECK(back.t0() == doctest::Approx(0.5));
  REQUIRE(back.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(back[i] == s[i]);
}

TEST_CASE("CSV reader rejects malformed input") {
  std::stringstream bad_header("time,value\n0,1\n1,2\n");
  CHECK_THROWS_AS(read_csv(bad_header), DataError);
  std::stringstream uneven("t,x\n0,1\n1,2\n3,4\n");
  CHECK_THROWS_AS(read_csv(uneven), DataError);
  std::stringstream garbage("t,x\n0,1\n0.1,abc\n");
  CHECK_THROWS_AS(read_csv(garbage), DataError);
  std::stringstream nan("t,x\n0,1\n0.1,nan\n");
  CHECK_THROWS_AS(read_csv(nan), DataError);
}

TEST_CASE("binary round trip and format dispatch") {
  const auto dir = std::filesystem::temp_directory_path() / "qtfkit_series_test";
  std::filesystem::create_directories(dir);
  const SampleSeries s(1234.5, testutil::gaussian(77, 13));
  write_binary(dir / "a.bin", s);
  write_csv(dir / "a.csv", s);
  for (const auto* name : {"a.bin", "a.csv"}) {
    const SampleSeries back = read_series(dir / name);
    CHECK(back.rate_hz() == doctest::Approx(1234.5).epsilon(1e-9));
    REQUIRE(back.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(back[i] == s[i]);
  }
  {
    std::ofstream f(dir / "bad.bin", std::ios::binary);
    f << "NOPE";
  }
  CHECK_THROWS_AS(read_series(dir / "bad.bin"), DataError);
  std::filesystem::remove_all(dir);
}
