#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "qtfkit/series.hpp"

namespace qtfkit {

/// Linear-phase (type I) FIR filter: odd tap count, taps symmetric about the
/// center, group delay (len - 1) / 2 samples.
class FirFilter {
 public:
  explicit FirFilter(std::vector<double> taps);

  const std::vector<double>& taps() const { return taps_; }
  std::size_t size() const { return taps_.size(); }
  std::size_t group_delay() const { return (taps_.size() - 1) / 2; }

  std::complex<double> response(double f_hz, double rate_hz) const;

 private:
  std::vector<double> taps_;
};

/// y = b0 x + b1 x[-1] + b2 x[-2] - a1 y[-1] - a2 y[-2].
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  std::complex<double> response(double f_hz, double rate_hz) const;
  bool stable() const;
};

class IirBiquadChain {
 public:
  explicit IirBiquadChain(std::vector<Biquad> stages);

  const std::vector<Biquad>& stages() const { return stages_; }
  std::complex<double> response(double f_hz, double rate_hz) const;

 private:
  std::vector<Biquad> stages_;
};

/// Front-end Bessel lowpass cascaded with a linear-phase bandstop. Its output
/// keeps wideband impulsive structure while blocking the stop band.
struct ExcessBandFilter {
  IirBiquadChain frontend;
  FirFilter bandstop;

  std::complex<double> response(double f_hz, double rate_hz) const {
    return frontend.response(f_hz, rate_hz) * bandstop.response(f_hz, rate_hz);
  }
};

/// Stopband level every FIR design here guarantees.
inline constexpr double kFirStopbandDb = 60.0;

/// Narrowest transition band (Hz) a Kaiser design with `num_taps` reaches
/// at the guaranteed stopband level.
double fir_transition_hz(double rate_hz, std::size_t num_taps);

/// Smallest odd tap count whose transition band is at most `transition_hz`.
std::size_t fir_taps_for_transition(double rate_hz, double transition_hz);

/// Kaiser-windowed sinc bandpass whose passband (within 0.5 dB) is `band`.
/// The transition bands lie outside `band` and are `transition_hz` wide
/// (0 = narrowest the tap count allows). f_lo == 0 gives a lowpass.
///
/// Throws std::invalid_argument when the tap count is even or < 31, or when
/// the transitions do not fit; the message names the tap count required.
FirFilter design_fir_bandpass(double rate_hz, BandSpec band, std::size_t num_taps,
                              double transition_hz = 0.0);

/// Spectral inversion: delayed unit impulse minus the bandpass taps, so that
/// bp(x) + bs(x) is x delayed by the group delay.
FirFilter complement_bandstop(const FirFilter& bandpass);

/// Bessel lowpass (order 2..8) through the bilinear transform with the -3 dB
/// point prewarped onto `corner_hz`. Unity gain at DC.
IirBiquadChain bessel_lowpass(double rate_hz, double corner_hz, int order);

inline constexpr int kExcessBandBesselOrder = 4;

/// Bessel lowpass at 3 f_c followed by a bandstop over [f_c/5, f_c] with
/// transitions of f_c/10.
ExcessBandFilter excess_band_filter(double rate_hz, double f_c);

/// Causal filtering with zero initial state; output length == input length.
SampleSeries apply_filter(const FirFilter& f, const SampleSeries& s);
SampleSeries apply_filter(const IirBiquadChain& f, const SampleSeries& s);
SampleSeries apply_filter(const ExcessBandFilter& f, const SampleSeries& s);

/// Streaming FIR with O(taps) state.
class FirStream {
 public:
  explicit FirStream(const FirFilter& f);
  double push(double x);

 private:
  std::vector<double> taps_;
  std::vector<double> history_;  // circular, newest at head_
  std::size_t head_ = 0;
};

/// Streaming biquad cascade (transposed direct form II).
class BiquadChainStream {
 public:
  explicit BiquadChainStream(const IirBiquadChain& f);
  double push(double x);

 private:
  struct Stage {
    Biquad c;
    double s1 = 0.0;
    double s2 = 0.0;
  };
  std::vector<Stage> stages_;
};

/// x delayed by `samples` (zeros shifted in, tail dropped).
SampleSeries delay(const SampleSeries& s, std::size_t samples);

/// x advanced by `samples` (head dropped, zeros appended).
SampleSeries advance(const SampleSeries& s, std::size_t samples);

/// Phase rule for a block all-pass transform of a power-of-two record.
struct AllpassPhase {
  enum class Kind { kQuadratic, kRandom };

  Kind kind = Kind::kRandom;
  /// Quadratic: fraction of the record the group delay sweeps across.
  double sweep = 0.0;
  std::uint64_t seed = 0;
  bool conjugate = false;

  static AllpassPhase quadratic(double sweep) { return {Kind::kQuadratic, sweep, 0, false}; }
  static AllpassPhase random(std::uint64_t seed) { return {Kind::kRandom, 0.0, seed, false}; }
  static AllpassPhase conjugate_of(AllpassPhase prior) {
    prior.conjugate = !prior.conjugate;
    return prior;
  }

  /// Phase (radians) added to bins 0..n/2; DC and Nyquist get 0.
  std::vector<double> phases(std::size_t n) const;
};

/// Adds the phase rule to every frequency bin of the whole record, keeping
/// magnitudes. Requires a power-of-two length.
SampleSeries allpass_phase(const SampleSeries& s, const AllpassPhase& phase);

}  // namespace qtfkit
