#include "qtfkit/siggen.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qtfkit/fft.hpp"
#include "qtfkit/linfilt.hpp"
#include "qtfkit/rng.hpp"

namespace qtfkit {
namespace {

constexpr double kPi = std::numbers::pi;

// Distinct streams for the Gaussian and impulsive parts of one NoiseSpec.
constexpr std::uint64_t kImpulseStream = 0x9E3779B97F4A7C15ULL;

std::size_t sample_count(double rate_hz, double duration_s) {
  if (!(rate_hz > 0.0) || !(duration_s >= 0.0)) throw std::invalid_argument("bad rate or duration");
  return static_cast<std::size_t>(std::llround(duration_s * rate_hz));
}

double mean_square(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

struct Impulse {
  std::size_t index;
  double weight;
};

std::vector<Impulse> draw_impulses(double rate_hz, std::size_t n, const NoiseSpec& spec) {
  std::vector<Impulse> out;
  if (spec.impulse_rate_hz <= 0.0) return out;
  Rng rng(spec.seed ^ kImpulseStream);
  const double start = spec.window_start_s.value_or(0.0);
  const double end = spec.window_end_s.value_or(static_cast<double>(n) / rate_hz);
  double t = start + rng.exponential(spec.impulse_rate_hz);
  while (t < end) {
    const double weight = spec.impulse_amp_dist == NoiseSpec::AmplitudeDist::kFixed
                              ? rng.sign() * spec.impulse_amplitude
                              : rng.normal() * spec.impulse_amplitude;
    const auto index = static_cast<std::size_t>(std::floor(t * rate_hz));
    if (index < n) out.push_back({index, weight});
    t += rng.exponential(spec.impulse_rate_hz);
  }
  return out;
}

}  // namespace

void NoiseSpec::validate(double rate_hz) const {
  if (!(sigma >= 0.0)) throw std::invalid_argument("noise: sigma must be >= 0");
  if (!(impulse_rate_hz >= 0.0)) throw std::invalid_argument("noise: impulse rate must be >= 0");
  if (!(frontend_bandwidth_hz > 0.0 && frontend_bandwidth_hz < 0.5 * rate_hz)) {
    throw std::invalid_argument("noise: front-end bandwidth must lie in (0, rate/2)");
  }
  if (kind != Kind::kGaussian && !(impulse_rate_hz > 0.0)) {
    throw std::invalid_argument("noise: impulsive and mixture kinds need a positive impulse rate");
  }
  if (kind == Kind::kMixture && !(sigma > 0.0)) {
    throw std::invalid_argument("noise: mixture needs a positive Gaussian sigma");
  }
  if (target_rms && !(*target_rms > 0.0)) throw std::invalid_argument("noise: target_rms must be positive");
}

Triplet triplet_from_magnitude(double rate_hz, std::size_t n, const std::function<double(double)>& mag,
                               std::uint64_t seed) {
  if (!is_power_of_two(n) || n < 4) throw std::invalid_argument("triplet: n must be a power of two >= 4");
  std::vector<std::complex<double>> bins(n / 2 + 1);
  for (std::size_t k = 0; k < bins.size(); ++k) {
    const double f = static_cast<double>(k) * rate_hz / static_cast<double>(n);
    const double m = mag(f);
    if (!(m >= 0.0) || !std::isfinite(m)) throw std::invalid_argument("triplet: magnitude must be finite and >= 0");
    // Linear phase places the impulse at the record center: e^{-i pi k}.
    bins[k] = (k % 2 == 0) ? m : -m;
  }
  SampleSeries impulse(rate_hz, irfft(bins, n));
  SampleSeries chirp = allpass_phase(impulse, AllpassPhase::quadratic(kTripletChirpSweep));
  SampleSeries burst = allpass_phase(impulse, AllpassPhase::random(seed));
  return {std::move(impulse), std::move(chirp), std::move(burst)};
}

SampleSeries linear_chirp(double rate_hz, double f_start, double f_end, double duration_s, double amp) {
  if (f_end > 0.5 * rate_hz || f_start > 0.5 * rate_hz) {
    throw std::invalid_argument("linear_chirp: frequencies must not exceed rate/2");
  }
  const std::size_t n = sample_count(rate_hz, duration_s);
  std::vector<double> x(n);
  const double k = (f_end - f_start) / duration_s;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate_hz;
    x[i] = amp * std::sin(2.0 * kPi * (f_start * t + 0.5 * k * t * t));
  }
  return SampleSeries(rate_hz, std::move(x));
}

SampleSeries am_tone(const SampleSeries& envelope, double f_c) {
  std::vector<double> x(envelope.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = envelope[i] * std::sin(2.0 * kPi * f_c * envelope.time(i));
  return envelope.with_samples(std::move(x));
}

SampleSeries ramp(double rate_hz, double duration_s, double slope) {
  const std::size_t n = sample_count(rate_hz, duration_s);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = slope * (static_cast<double>(i) / rate_hz);
  return SampleSeries(rate_hz, std::move(x));
}

SampleSeries constant(double rate_hz, std::size_t n, double value) {
  return SampleSeries(rate_hz, std::vector<double>(n, value));
}

SampleSeries white_gaussian(double rate_hz, std::size_t n, double sigma, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = sigma * rng.normal();
  return SampleSeries(rate_hz, std::move(x));
}

std::vector<std::size_t> impulse_times(double rate_hz, std::size_t n, const NoiseSpec& spec) {
  std::vector<std::size_t> times;
  for (const auto& imp : draw_impulses(rate_hz, n, spec)) times.push_back(imp.index);
  return times;
}

SampleSeries noise(double rate_hz, double duration_s, const NoiseSpec& spec) {
  spec.validate(rate_hz);
  const std::size_t n = sample_count(rate_hz, duration_s);
  const IirBiquadChain frontend = bessel_lowpass(rate_hz, spec.frontend_bandwidth_hz, kFrontendOrder);

  std::vector<double> gauss(n, 0.0);
  if (spec.kind != NoiseSpec::Kind::kImpulsive && spec.sigma > 0.0) {
    gauss = apply_filter(frontend, white_gaussian(rate_hz, n, spec.sigma, spec.seed)).values();
  }
  std::vector<double> imp(n, 0.0);
  if (spec.kind != NoiseSpec::Kind::kGaussian) {
    std::vector<double> weights(n, 0.0);
    for (const auto& i : draw_impulses(rate_hz, n, spec)) weights[i.index] += i.weight;
    imp = apply_filter(frontend, SampleSeries(rate_hz, std::move(weights))).values();
  }

  double imp_scale = 1.0;
  double gauss_scale = 1.0;
  if (spec.target_rms) {
    const double target = *spec.target_rms * *spec.target_rms;
    const double g = mean_square(gauss);
    const double i = mean_square(imp);
    if (spec.kind == NoiseSpec::Kind::kGaussian) {
      if (!(g > 0.0)) throw std::invalid_argument("noise: cannot match power of an all-zero series");
      gauss_scale = std::sqrt(target / g);
    } else {
      if (!(i > 0.0)) throw std::invalid_argument("noise: no impulses drawn, cannot match power");
      double gi = 0.0;
      for (std::size_t k = 0; k < n; ++k) gi += gauss[k] * imp[k];
      gi /= static_cast<double>(n);
      // Solve mean((g + c i)^2) = target for c > 0.
      const double disc = gi * gi - i * (g - target);
      if (disc < 0.0 || g >= target) {
        throw std::invalid_argument("noise: Gaussian component alone exceeds the requested power");
      }
      imp_scale = (-gi + std::sqrt(disc)) / i;
    }
  }

  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = gauss_scale * gauss[k] + imp_scale * imp[k];
  return SampleSeries(rate_hz, std::move(x));
}

SampleSeries add(const SampleSeries& a, const SampleSeries& b) {
  require_aligned(a, b, "add");
  std::vector<double> x(a.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = a[i] + b[i];
  return a.with_samples(std::move(x));
}

SampleSeries scale(const SampleSeries& s, double factor) {
  std::vector<double> x(s.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = factor * s[i];
  return s.with_samples(std::move(x));
}

}  // namespace qtfkit
