#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qtfkit/series.hpp"

namespace qtfkit {

/// Noise model: white Gaussian and/or Poisson-timed impulses, both shaped by
/// the same front-end lowpass (4th order Bessel at `frontend_bandwidth_hz`).
struct NoiseSpec {
  enum class Kind { kGaussian, kImpulsive, kMixture };
  enum class AmplitudeDist { kFixed, kGaussian };

  Kind kind = Kind::kGaussian;
  /// Standard deviation of the white Gaussian before the front end.
  double sigma = 1.0;
  double impulse_rate_hz = 0.0;
  /// Impulse weights are +/- amplitude (fixed, random sign) or N(0, amplitude^2).
  AmplitudeDist impulse_amp_dist = AmplitudeDist::kGaussian;
  double impulse_amplitude = 1.0;
  double frontend_bandwidth_hz = 1.0;
  std::uint64_t seed = 0;
  /// When set, the impulsive component is rescaled so the total output RMS
  /// equals this value; mixtures fail when the Gaussian part alone exceeds it.
  std::optional<double> target_rms;
  /// Impulses are placed only inside [window_start_s, window_end_s) when set.
  std::optional<double> window_start_s;
  std::optional<double> window_end_s;

  void validate(double rate_hz) const;
};

inline constexpr int kFrontendOrder = 4;

struct Triplet {
  SampleSeries impulse;
  SampleSeries chirp;
  SampleSeries burst;
};

/// Group-delay sweep of the chirp member (fraction of the record).
inline constexpr double kTripletChirpSweep = 0.75;

/// Three signals sharing one magnitude spectrum `mag(f)`: an impulse at the
/// record center, its quadratic-phase chirp and its seeded random-phase
/// burst. The chirp and burst are allpass_phase transforms of the impulse.
Triplet triplet_from_magnitude(double rate_hz, std::size_t n, const std::function<double(double)>& mag,
                               std::uint64_t seed);

/// amp * sin(2 pi (f_start t + (f_end - f_start) t^2 / (2 duration))).
SampleSeries linear_chirp(double rate_hz, double f_start, double f_end, double duration_s, double amp);

/// envelope[n] * sin(2 pi f_c t_n).
SampleSeries am_tone(const SampleSeries& envelope, double f_c);

SampleSeries ramp(double rate_hz, double duration_s, double slope);

/// Constant-valued series of the given length.
SampleSeries constant(double rate_hz, std::size_t n, double value);

SampleSeries white_gaussian(double rate_hz, std::size_t n, double sigma, std::uint64_t seed);

/// Impulse times (sample indices) drawn for `spec` over n samples.
std::vector<std::size_t> impulse_times(double rate_hz, std::size_t n, const NoiseSpec& spec);

SampleSeries noise(double rate_hz, double duration_s, const NoiseSpec& spec);

/// Sum of two aligned series.
SampleSeries add(const SampleSeries& a, const SampleSeries& b);
SampleSeries scale(const SampleSeries& s, double factor);

}  // namespace qtfkit
