#include "qtfkit/linfilt.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qtfkit/fft.hpp"
#include "qtfkit/rng.hpp"

namespace qtfkit {
namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// Kaiser design level. Kaiser's empirical formulas undershoot by up to about
// a dB near the band edges, so the window is sized for a deeper stopband
// than the one we promise.
constexpr double kKaiserDesignDb = 66.0;

double kaiser_beta(double atten_db) {
  if (atten_db > 50.0) return 0.1102 * (atten_db - 8.7);
  if (atten_db >= 21.0) return 0.5842 * std::pow(atten_db - 21.0, 0.4) + 0.07886 * (atten_db - 21.0);
  return 0.0;
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x); }

// Ideal lowpass impulse response at normalized cutoff fc (cycles/sample).
double ideal_lowpass(double fc, double m) { return 2.0 * fc * sinc(2.0 * fc * m); }

cd polyval(const std::vector<double>& coeffs, cd s) {
  cd acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * s + *it;
  return acc;
}

// Reverse Bessel polynomial coefficients, lowest power first.
std::vector<double> bessel_polynomial(int order) {
  std::vector<double> a(order + 1);
  for (int k = 0; k <= order; ++k) {
    // (2n-k)! / (2^(n-k) k! (n-k)!) via lgamma to stay exact enough for n <= 8.
    const double log_value = std::lgamma(2.0 * order - k + 1) - (order - k) * std::log(2.0) -
                             std::lgamma(k + 1.0) - std::lgamma(order - k + 1.0);
    a[k] = std::round(std::exp(log_value));
  }
  return a;
}

std::vector<cd> polynomial_roots(const std::vector<double>& coeffs) {
  const int n = static_cast<int>(coeffs.size()) - 1;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -coeffs[i] / coeffs[n];
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  std::vector<cd> roots;
  for (int i = 0; i < n; ++i) roots.push_back(solver.eigenvalues()[i]);
  return roots;
}

// Frequency where |theta(0)/theta(j w)|^2 = 1/2 for the delay-normalized prototype.
double bessel_3db_frequency(const std::vector<double>& coeffs) {
  const double dc = coeffs.front();
  auto power = [&](double w) { return std::norm(dc / polyval(coeffs, cd(0.0, w))); };
  double lo = 0.0;
  double hi = 1.0;
  while (power(hi) > 0.5) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (power(mid) > 0.5 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

cd bilinear(cd s, double rate_hz) { return (2.0 * rate_hz + s) / (2.0 * rate_hz - s); }

void require_feasible(bool ok, const std::string& what, double rate_hz, double transition_hz) {
  if (ok) return;
  const std::size_t needed = transition_hz > 0.0 ? fir_taps_for_transition(rate_hz, transition_hz) : 0;
  throw std::invalid_argument("design_fir_bandpass: " + what + "; a transition of " +
                              std::to_string(transition_hz) + " Hz needs about " +
                              std::to_string(needed) + " taps");
}

}  // namespace

FirFilter::FirFilter(std::vector<double> taps) : taps_(std::move(taps)) {
  if (taps_.size() % 2 == 0) throw std::invalid_argument("FirFilter: tap count must be odd");
  for (std::size_t i = 0; i < taps_.size() / 2; ++i) {
    if (taps_[i] != taps_[taps_.size() - 1 - i]) {
      throw std::invalid_argument("FirFilter: taps must be symmetric (linear phase)");
    }
  }
}

cd FirFilter::response(double f_hz, double rate_hz) const {
  const double w = 2.0 * kPi * f_hz / rate_hz;
  cd acc = 0.0;
  for (std::size_t k = 0; k < taps_.size(); ++k) acc += taps_[k] * std::polar(1.0, -w * static_cast<double>(k));
  return acc;
}

cd Biquad::response(double f_hz, double rate_hz) const {
  const cd z1 = std::polar(1.0, -2.0 * kPi * f_hz / rate_hz);
  return (b0 + z1 * (b1 + z1 * b2)) / (1.0 + z1 * (a1 + z1 * a2));
}

bool Biquad::stable() const {
  // Jury conditions for 1 + a1 z^-1 + a2 z^-2.
  return std::abs(a2) < 1.0 && std::abs(a1) < 1.0 + a2;
}

IirBiquadChain::IirBiquadChain(std::vector<Biquad> stages) : stages_(std::move(stages)) {
  for (const auto& st : stages_) {
    if (!st.stable()) throw std::domain_error("IirBiquadChain: unstable stage");
  }
}

cd IirBiquadChain::response(double f_hz, double rate_hz) const {
  cd acc = 1.0;
  for (const auto& st : stages_) acc *= st.response(f_hz, rate_hz);
  return acc;
}

double fir_transition_hz(double rate_hz, std::size_t num_taps) {
  if (num_taps < 3) throw std::invalid_argument("fir_transition_hz: need at least 3 taps");
  const double dw = (kKaiserDesignDb - 7.95) / (2.285 * static_cast<double>(num_taps - 1));
  return dw / (2.0 * kPi) * rate_hz;
}

std::size_t fir_taps_for_transition(double rate_hz, double transition_hz) {
  if (!(transition_hz > 0.0)) throw std::invalid_argument("fir_taps_for_transition: width must be positive");
  const double dw = 2.0 * kPi * transition_hz / rate_hz;
  auto taps = static_cast<std::size_t>(std::ceil((kKaiserDesignDb - 7.95) / (2.285 * dw))) + 1;
  if (taps % 2 == 0) ++taps;
  return taps;
}

FirFilter design_fir_bandpass(double rate_hz, BandSpec band, std::size_t num_taps, double transition_hz) {
  band.validate(rate_hz);
  if (num_taps % 2 == 0 || num_taps < 31) {
    throw std::invalid_argument("design_fir_bandpass: tap count must be odd and >= 31");
  }
  const double reachable = fir_transition_hz(rate_hz, num_taps);
  const double tw = transition_hz > 0.0 ? transition_hz : reachable;
  require_feasible(tw >= reachable * (1.0 - 1e-12), "transition too narrow for the tap count", rate_hz, tw);

  const double nyquist = 0.5 * rate_hz;
  const bool lowpass = band.f_lo == 0.0;
  const bool highpass = band.f_hi == nyquist;
  require_feasible(lowpass || band.f_lo >= tw, "lower transition band would cross DC", rate_hz,
                   lowpass ? tw : band.f_lo);
  require_feasible(highpass || band.f_hi + tw <= nyquist, "upper transition band would cross Nyquist",
                   rate_hz, highpass ? tw : nyquist - band.f_hi);

  const double f_upper = highpass ? nyquist : band.f_hi + 0.5 * tw;
  const double f_lower = lowpass ? 0.0 : band.f_lo - 0.5 * tw;
  const double fc_hi = f_upper / rate_hz;
  const double fc_lo = f_lower / rate_hz;

  const std::size_t center = (num_taps - 1) / 2;
  const double beta = kaiser_beta(kKaiserDesignDb);
  const double i0_beta = std::cyl_bessel_i(0.0, beta);
  std::vector<double> taps(num_taps);
  for (std::size_t k = 0; k <= center; ++k) {
    const double m = static_cast<double>(k);
    const double r = m / static_cast<double>(center);
    const double window = std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - r * r)) / i0_beta;
    const double ideal = ideal_lowpass(fc_hi, m) - (lowpass ? 0.0 : ideal_lowpass(fc_lo, m));
    taps[center + k] = taps[center - k] = window * ideal;
  }
  return FirFilter(std::move(taps));
}

FirFilter complement_bandstop(const FirFilter& bandpass) {
  std::vector<double> taps = bandpass.taps();
  for (double& t : taps) t = -t;
  taps[bandpass.group_delay()] += 1.0;
  return FirFilter(std::move(taps));
}

IirBiquadChain bessel_lowpass(double rate_hz, double corner_hz, int order) {
  if (order < 2 || order > 8) throw std::invalid_argument("bessel_lowpass: order must be in 2..8");
  if (!(corner_hz > 0.0 && corner_hz < 0.5 * rate_hz)) {
    throw std::invalid_argument("bessel_lowpass: corner must lie in (0, rate/2)");
  }
  const auto coeffs = bessel_polynomial(order);
  const double w3 = bessel_3db_frequency(coeffs);
  const double warped = 2.0 * rate_hz * std::tan(kPi * corner_hz / rate_hz);

  std::vector<Biquad> stages;
  for (const cd& root : polynomial_roots(coeffs)) {
    const cd pole = bilinear(root / w3 * warped, rate_hz);
    if (root.imag() > 1e-9) {
      Biquad b;
      b.a1 = -2.0 * pole.real();
      b.a2 = std::norm(pole);
      const double g = (1.0 + b.a1 + b.a2) / 4.0;
      b.b0 = g;
      b.b1 = 2.0 * g;
      b.b2 = g;
      stages.push_back(b);
    } else if (std::abs(root.imag()) <= 1e-9) {
      Biquad b;
      b.a1 = -pole.real();
      const double g = (1.0 + b.a1) / 2.0;
      b.b0 = g;
      b.b1 = g;
      stages.push_back(b);
    }
  }
  return IirBiquadChain(std::move(stages));
}

ExcessBandFilter excess_band_filter(double rate_hz, double f_c) {
  if (!(f_c > 0.0) || !(3.0 * f_c < 0.5 * rate_hz)) {
    throw std::invalid_argument("excess_band_filter: requires 0 < 3 f_c < rate/2");
  }
  const double transition = 0.1 * f_c;
  const std::size_t taps = std::max<std::size_t>(31, fir_taps_for_transition(rate_hz, transition));
  const FirFilter bp = design_fir_bandpass(rate_hz, {f_c / 5.0, f_c}, taps, transition);
  return {bessel_lowpass(rate_hz, 3.0 * f_c, kExcessBandBesselOrder), complement_bandstop(bp)};
}

FirStream::FirStream(const FirFilter& f) : taps_(f.taps()), history_(f.size(), 0.0) {}

double FirStream::push(double x) {
  head_ = head_ == 0 ? history_.size() - 1 : head_ - 1;
  history_[head_] = x;
  double acc = 0.0;
  const std::size_t n = taps_.size();
  // history_[(head_ + k) % n] holds x[-k].
  const std::size_t first = n - head_;
  for (std::size_t k = 0; k < first; ++k) acc += taps_[k] * history_[head_ + k];
  for (std::size_t k = first; k < n; ++k) acc += taps_[k] * history_[k - first];
  return acc;
}

BiquadChainStream::BiquadChainStream(const IirBiquadChain& f) {
  for (const auto& st : f.stages()) stages_.push_back({st});
}

double BiquadChainStream::push(double x) {
  for (auto& st : stages_) {
    const double y = st.c.b0 * x + st.s1;
    st.s1 = st.c.b1 * x - st.c.a1 * y + st.s2;
    st.s2 = st.c.b2 * x - st.c.a2 * y;
    x = y;
  }
  return x;
}

SampleSeries apply_filter(const FirFilter& f, const SampleSeries& s) {
  const auto& h = f.taps();
  const auto& x = s.values();
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    const std::size_t kmax = std::min(h.size() - 1, n);
    double acc = 0.0;
    for (std::size_t k = 0; k <= kmax; ++k) acc += h[k] * x[n - k];
    y[n] = acc;
  }
  return s.with_samples(std::move(y));
}

SampleSeries apply_filter(const IirBiquadChain& f, const SampleSeries& s) {
  BiquadChainStream stream(f);
  std::vector<double> y(s.size());
  for (std::size_t n = 0; n < s.size(); ++n) y[n] = stream.push(s[n]);
  return s.with_samples(std::move(y));
}

SampleSeries apply_filter(const ExcessBandFilter& f, const SampleSeries& s) {
  return apply_filter(f.bandstop, apply_filter(f.frontend, s));
}

SampleSeries delay(const SampleSeries& s, std::size_t samples) {
  std::vector<double> y(s.size(), 0.0);
  for (std::size_t n = samples; n < s.size(); ++n) y[n] = s[n - samples];
  return s.with_samples(std::move(y));
}

SampleSeries advance(const SampleSeries& s, std::size_t samples) {
  std::vector<double> y(s.size(), 0.0);
  for (std::size_t n = 0; n + samples < s.size(); ++n) y[n] = s[n + samples];
  return s.with_samples(std::move(y));
}

std::vector<double> AllpassPhase::phases(std::size_t n) const {
  if (!is_power_of_two(n) || n < 2) throw std::invalid_argument("allpass: length must be a power of two");
  const std::size_t half = n / 2;
  std::vector<double> phi(half + 1, 0.0);
  if (kind == Kind::kQuadratic) {
    // Group delay sweeps linearly over `sweep * n` samples; zero at DC and Nyquist.
    const double nd = static_cast<double>(n);
    for (std::size_t k = 1; k < half; ++k) {
      const double kd = static_cast<double>(k);
      phi[k] = -2.0 * kPi * sweep * kd * (kd - 0.5 * nd) / nd;
    }
  } else {
    Rng rng(seed);
    for (std::size_t k = 1; k < half; ++k) phi[k] = 2.0 * kPi * rng.uniform();
  }
  if (conjugate) {
    for (double& p : phi) p = -p;
  }
  return phi;
}

SampleSeries allpass_phase(const SampleSeries& s, const AllpassPhase& phase) {
  const std::size_t n = s.size();
  const auto phi = phase.phases(n);
  auto bins = rfft(s.samples());
  for (std::size_t k = 0; k < bins.size(); ++k) bins[k] *= std::polar(1.0, phi[k]);
  return s.with_samples(irfft(bins, n));
}

}  // namespace qtfkit
