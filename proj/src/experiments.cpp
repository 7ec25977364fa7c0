#include "qtfkit/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "qtfkit/analysis.hpp"
#include "qtfkit/cinf.hpp"
#include "qtfkit/fencing.hpp"
#include "qtfkit/fft.hpp"
#include "qtfkit/linfilt.hpp"
#include "qtfkit/oracle.hpp"
#include "qtfkit/qtf.hpp"
#include "qtfkit/rng.hpp"
#include "qtfkit/series_io.hpp"
#include "qtfkit/siggen.hpp"

namespace qtfkit::experiments {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

using Json = nlohmann::ordered_json;

double num(const Params& p, const char* key) { return p.at(key).get<double>(); }
std::size_t count(const Params& p, const char* key) { return p.at(key).get<std::size_t>(); }
std::uint64_t seed_of(const Params& p, const char* key = "seed") { return p.at(key).get<std::uint64_t>(); }

double mean_square(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

SampleSeries from_flags(const SampleSeries& like, const OutlierMask& m) {
  std::vector<double> v(m.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = m.flags[i] ? 1.0 : 0.0;
  return like.with_samples(std::move(v));
}

// Fraction of event indices with at least one flag in [i + lag, i + lag + width].
double recall(const OutlierMask& m, const std::vector<std::size_t>& events, std::size_t lag, std::size_t width) {
  if (events.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t e : events) {
    const std::size_t lo = e + lag;
    const std::size_t hi = std::min(m.size(), lo + width + 1);
    for (std::size_t k = lo; k < hi; ++k) {
      if (m.flags[k]) {
        ++hit;
        break;
      }
    }
  }
  return static_cast<double>(hit) / static_cast<double>(events.size());
}

// Peak of a filter's response to a unit impulse.
double impulse_peak(const IirBiquadChain& f, double rate_hz) {
  std::vector<double> d(512, 0.0);
  d[0] = 1.0;
  const auto y = apply_filter(f, SampleSeries(rate_hz, std::move(d)));
  double peak = 0.0;
  for (double v : y.values()) peak = std::max(peak, std::abs(v));
  return peak;
}

// Mean number of median crossings per second over two: the typical
// frequency <f> of a record.
double typical_frequency(const SampleSeries& s) {
  return 0.5 * crossing_rate(s, quantile(s.samples(), 0.5));
}

// Working definition of a "small" rate: a tenth of IQR * <f>.
constexpr double kSmallMuFraction = 0.1;

// ---------------------------------------------------------------------------

Report triplet_inf(const Params& p) {
  const double rate = num(p, "rate_hz");
  const std::size_t n = count(p, "samples");
  const double lo = num(p, "band_lo_hz"), hi = num(p, "band_hi_hz"), taper = num(p, "taper_hz");
  const double beta = num(p, "beta");

  auto mag = [=](double f) {
    if (f >= lo && f <= hi) return 1.0;
    if (f > lo - taper && f < lo) return 0.5 - 0.5 * std::cos(kPi * (f - (lo - taper)) / taper);
    if (f > hi && f < hi + taper) return 0.5 + 0.5 * std::cos(kPi * (f - hi) / taper);
    return 0.0;
  };
  const Triplet t = triplet_from_magnitude(rate, n, mag, seed_of(p));

  const double slew = std::max(max_slew(t.chirp), max_slew(t.burst));
  const double mu = num(p, "mu_margin") * inclusive_mu(slew, beta);
  const FenceParams fp{beta, mu, 0.0};

  const double f0 = num(p, "f0_hz"), hw = num(p, "f0_halfwidth_hz");
  const FirFilter bp = design_fir_bandpass(rate, {f0 - hw, f0 + hw}, count(p, "analysis_taps"));
  auto band_ms = [&](const SampleSeries& s) { return mean_square(apply_filter(bp, s).samples()); };

  Report r;
  r.metrics["mu"] = mu;
  r.metrics["max_slew_chirp_burst"] = slew;
  const std::pair<const char*, const SampleSeries*> members[] = {
      {"impulse", &t.impulse}, {"chirp", &t.chirp}, {"burst", &t.burst}};
  Trace signals{"triplet", {}};
  Trace cleaned{"triplet_inf", {}};
  for (const auto& [name, s] : members) {
    const InfResult inf = inf_filter(*s, fp);
    const double change_db = db_ratio(band_ms(*s), band_ms(inf.cleaned));
    const std::string key(name);
    r.metrics[key + "_par_db"] = par_db(*s);
    r.metrics[key + "_flagged"] = inf.mask.count();
    r.metrics[key + "_band_change_db"] = change_db;
    if (key == "impulse") {
      r.checks.push_back(Check::at_least("impulse_band_reduction_db", change_db, 20.0));
    } else {
      r.checks.push_back(Check::at_most(key + "_flagged", static_cast<double>(inf.mask.count()), 0.0));
      r.checks.push_back(Check::at_most(key + "_band_change_db", std::abs(change_db), 0.1));
    }
    signals.columns.emplace_back(key, *s);
    cleaned.columns.emplace_back(key, inf.cleaned);
    if (key == "impulse") {
      r.traces.push_back({"impulse_fences",
                          {{"x", *s}, {"lower", inf.fences.lower}, {"upper", inf.fences.upper},
                           {"flag", from_flags(*s, inf.mask)}}});
    }
  }
  r.traces.push_back(std::move(signals));
  r.traces.push_back(std::move(cleaned));
  return r;
}

// ---------------------------------------------------------------------------

Report psd_reduction(const Params& p) {
  const double rate = num(p, "rate_hz");
  const double duration = static_cast<double>(count(p, "samples")) / rate;
  const double beta = num(p, "beta");
  const double target = num(p, "target_rms");

  NoiseSpec g;
  g.kind = NoiseSpec::Kind::kGaussian;
  g.frontend_bandwidth_hz = num(p, "frontend_hz");
  g.seed = seed_of(p);
  g.target_rms = target;
  const SampleSeries gauss = noise(rate, duration, g);

  // Impulsive row: Gaussian floor carrying `floor_fraction` of the power,
  // impulses filling the rest.
  NoiseSpec floor = g;
  floor.seed = seed_of(p, "floor_seed");
  floor.target_rms = target * std::sqrt(num(p, "floor_fraction"));
  NoiseSpec mix = g;
  mix.kind = NoiseSpec::Kind::kMixture;
  mix.seed = floor.seed;
  mix.sigma = *floor.target_rms / rms(noise(rate, duration, [&] {
                auto unit = floor;
                unit.target_rms.reset();
                return unit;
              }()).samples());
  mix.impulse_rate_hz = num(p, "impulse_rate_hz");
  mix.impulse_amp_dist = NoiseSpec::AmplitudeDist::kGaussian;
  const SampleSeries impulsive = noise(rate, duration, mix);

  const double mu = num(p, "mu_margin") * inclusive_mu(max_slew(gauss), beta);
  const FenceParams fp{beta, mu, 0.0};
  const InfResult inf_g = inf_filter(gauss, fp);
  const InfResult inf_i = inf_filter(impulsive, fp);

  const BandSpec band{num(p, "band_lo_hz"), num(p, "band_hi_hz")};
  const BandSpec low{0.0, num(p, "low_band_hi_hz")};
  auto bpow = [&](const SampleSeries& s, const BandSpec& b) { return band_power(psd_welch(s), b); };
  const double g_change = db_ratio(bpow(gauss, band), bpow(inf_g.cleaned, band));
  const double i_change = db_ratio(bpow(impulsive, band), bpow(inf_i.cleaned, band));

  Report r;
  r.metrics["mu"] = mu;
  r.metrics["gaussian_rms"] = rms(gauss.samples());
  r.metrics["impulsive_rms"] = rms(impulsive.samples());
  r.metrics["gaussian_flagged"] = inf_g.mask.count();
  r.metrics["impulsive_flagged"] = inf_i.mask.count();
  r.metrics["gaussian_band_change_db"] = g_change;
  r.metrics["impulsive_band_reduction_db"] = i_change;
  // Outlier removal raises the low-frequency floor; reported only.
  r.metrics["impulsive_low_band_change_db"] = db_ratio(bpow(inf_i.cleaned, low), bpow(impulsive, low));
  r.checks.push_back(Check::at_most("gaussian_band_change_db", std::abs(g_change), 0.5));
  r.checks.push_back(Check::within("impulsive_band_reduction_db", i_change, 10.0, 3.0));

  const PsdEstimate pg = psd_welch(gauss), pgi = psd_welch(inf_g.cleaned);
  const PsdEstimate pi = psd_welch(impulsive), pii = psd_welch(inf_i.cleaned);
  const SampleSeries freqs(1.0, pg.freqs_hz);
  auto col = [](const PsdEstimate& e) { return SampleSeries(1.0, e.power_density); };
  r.traces.push_back({"psd",
                      {{"freq_hz", freqs}, {"gaussian", col(pg)}, {"gaussian_inf", col(pgi)},
                       {"impulsive", col(pi)}, {"impulsive_inf", col(pii)}}});
  r.traces.push_back({"noise", {{"gaussian", gauss}, {"impulsive", impulsive}, {"impulsive_inf", inf_i.cleaned}}});
  return r;
}

// ---------------------------------------------------------------------------

Report boxcar_equivalence(const Params& p) {
  const double rate = num(p, "rate_hz");
  const SampleSeries x = white_gaussian(rate, count(p, "samples"), num(p, "sigma"), seed_of(p));
  const double window_s = num(p, "window_s");
  const double range = iqr(x);
  const double mu = 2.0 * range / window_s;
  const FenceSeries f = compute_fences(x, {num(p, "beta"), mu, 0.0});

  const oracle::WindowSpec w{window_s, oracle::Alignment::kCausal};
  const SampleSeries o1 = oracle::windowed_quantile(x, w, 0.25);
  const SampleSeries o3 = oracle::windowed_quantile(x, w, 0.75);
  const double skip = std::max(static_cast<double>(f.warmup_samples) / rate, window_s);

  const double d1 = residual_rms(f.q1, o1, skip);
  const double d3 = residual_rms(f.q3, o3, skip);
  Report r;
  r.metrics["iqr"] = range;
  r.metrics["mu"] = mu;
  r.metrics["warmup_s"] = skip;
  r.metrics["q1_rms_dev_over_iqr"] = d1 / range;
  r.metrics["q3_rms_dev_over_iqr"] = d3 / range;
  r.checks.push_back(Check::at_most("q1_rms_dev", d1, 0.2 * range));
  r.checks.push_back(Check::at_most("q3_rms_dev", d3, 0.2 * range));
  r.traces.push_back({"quartiles", {{"x", x}, {"q1", f.q1}, {"q3", f.q3}, {"oracle_q1", o1}, {"oracle_q3", o3}}});
  return r;
}

// ---------------------------------------------------------------------------

Report bandwidth(const Params& p) {
  const double rate = num(p, "rate_hz");
  const double duration = num(p, "duration_s");
  const double narrow = num(p, "narrow_hz");
  const double beta = num(p, "beta");
  const std::size_t n = static_cast<std::size_t>(std::llround(duration * rate));

  auto observe = [&](double bw) {
    NoiseSpec s;
    s.kind = NoiseSpec::Kind::kMixture;
    s.sigma = num(p, "sigma");
    s.impulse_rate_hz = num(p, "impulse_rate_hz");
    s.impulse_amp_dist = NoiseSpec::AmplitudeDist::kFixed;
    s.impulse_amplitude = num(p, "impulse_weight");
    s.frontend_bandwidth_hz = bw;
    s.seed = seed_of(p);
    const SampleSeries sig = ramp(rate, duration, num(p, "signal_slope"));
    return std::make_pair(add(sig, noise(rate, duration, s)), s);
  };
  const auto [x1, spec] = observe(narrow);
  const auto [x4, spec4] = observe(4.0 * narrow);
  const std::vector<std::size_t> events = impulse_times(rate, n, spec);

  // The rate is the tightest that stays inclusive of the narrowband
  // observation, and at least twice the signal's own slew.
  const double mu = std::max(num(p, "mu_margin") * inclusive_mu(max_slew(x1), beta),
                             2.0 * std::abs(num(p, "signal_slope")));
  const InfResult r1 = inf_filter(x1, {beta, mu, 0.0});
  const InfResult r4 = inf_filter(x4, {beta, mu, 0.0});
  const auto width = static_cast<std::size_t>(std::ceil(rate / narrow));
  const double rec1 = recall(r1.mask, events, 0, width);
  const double rec4 = recall(r4.mask, events, 0, width);

  Report r;
  r.metrics["mu"] = mu;
  r.metrics["impulses"] = events.size();
  r.metrics["recall_narrow"] = rec1;
  r.metrics["recall_wide"] = rec4;
  r.metrics["flagged_narrow"] = r1.mask.count();
  r.metrics["flagged_wide"] = r4.mask.count();
  r.checks.push_back(Check::at_least("recall_wide", rec4, 1.0));
  r.checks.push_back(Check::at_most("recall_narrow", rec1, 0.0));
  r.traces.push_back({"bandwidth",
                      {{"x_narrow", x1}, {"lower_narrow", r1.fences.lower}, {"upper_narrow", r1.fences.upper},
                       {"x_wide", x4}, {"lower_wide", r4.fences.lower}, {"upper_wide", r4.fences.upper}}});
  return r;
}

// ---------------------------------------------------------------------------

Report am_fences(const Params& p) {
  const double rate = num(p, "rate_hz");
  const double a = num(p, "amplitude");
  const auto n = static_cast<std::size_t>(std::llround(num(p, "duration_s") * rate));
  const SampleSeries x = am_tone(constant(rate, n, a), num(p, "carrier_hz"));
  const double beta = num(p, "beta");
  const double mu = kSmallMuFraction * iqr(x) * typical_frequency(x);
  const FenceSeries f = compute_fences(x, {beta, mu, 0.0});

  const auto tail = static_cast<std::size_t>(std::llround(num(p, "tail_fraction") * static_cast<double>(n)));
  auto tail_mean = [&](const SampleSeries& s) {
    double acc = 0.0;
    for (std::size_t i = n - tail; i < n; ++i) acc += s[i];
    return acc / static_cast<double>(tail);
  };
  const double q1 = tail_mean(f.q1), q3 = tail_mean(f.q3);
  const double lo = tail_mean(f.lower), up = tail_mean(f.upper);
  const double qa = a / std::numbers::sqrt2;
  const double fa = (1.0 + 2.0 * beta) * a / std::numbers::sqrt2;  // 2 sqrt2 A at beta = 1.5

  Report r;
  r.metrics["mu"] = mu;
  r.metrics["q1_tail_mean"] = q1;
  r.metrics["q3_tail_mean"] = q3;
  r.metrics["lower_tail_mean"] = lo;
  r.metrics["upper_tail_mean"] = up;
  r.checks.push_back(Check::within("q3_rel_error", (q3 - qa) / qa, 0.0, 0.02));
  r.checks.push_back(Check::within("q1_rel_error", (q1 + qa) / qa, 0.0, 0.02));
  r.checks.push_back(Check::within("upper_rel_error", (up - fa) / fa, 0.0, 0.05));
  r.checks.push_back(Check::within("lower_rel_error", (lo + fa) / fa, 0.0, 0.05));
  r.traces.push_back({"am_fences", {{"x", x}, {"lower", f.lower}, {"q1", f.q1}, {"q3", f.q3}, {"upper", f.upper}}});
  return r;
}

// ---------------------------------------------------------------------------

Report trend_quantile(const Params& p) {
  const double rate = num(p, "rate_hz");
  const double duration = num(p, "duration_s");
  const auto n = static_cast<std::size_t>(std::llround(duration * rate));
  const double q = num(p, "q");
  const SampleSeries w = white_gaussian(rate, n, num(p, "sigma"), seed_of(p));
  const double mu = kSmallMuFraction * iqr(w) * typical_frequency(w);
  const double gamma = mu / rate;
  const double skip_s = num(p, "warmup_s");
  const auto skip = static_cast<std::size_t>(std::ceil(skip_s * rate));

  Report r;
  r.metrics["mu"] = mu;
  Trace trace{"trend", {{"noise", w}}};
  for (const double sign : {1.0, -1.0}) {
    const double slope = sign * mu / 4.0;
    const SampleSeries x = add(w, ramp(rate, duration, slope));
    const SampleSeries out = qtf_run(x, {q, mu, 0.0});
    const double q_hat = trend_effective_quantile(q, slope, mu);

    std::vector<double> detrended(n);
    std::size_t below = 0;
    for (std::size_t i = 0; i < n; ++i) {
      detrended[i] = out[i] - slope * (x.time(i) - x.t0());
      if (i >= skip && x[i] < out[i]) ++below;
    }
    const double measured = static_cast<double>(below) / static_cast<double>(n - skip);
    const SampleSeries ref = qtf_run(w, {q_hat, mu, 0.0});
    double worst = 0.0;
    for (std::size_t i = skip; i < n; ++i) worst = std::max(worst, std::abs(detrended[i] - ref[i]));

    // One step increment: the largest per-sample move of either tracker,
    // 2 gamma max(q, 1 - q), plus the trend's own advance per sample.
    const double step_bound = 2.0 * gamma * std::max(q_hat, 1.0 - q_hat) + std::abs(slope) / rate;
    const std::string tag = sign > 0 ? "rising" : "falling";
    r.metrics[tag + "_expected_q"] = q_hat;
    r.metrics[tag + "_measured_q"] = measured;
    r.metrics[tag + "_max_detrended_dev_over_gamma"] = worst / gamma;
    r.checks.push_back(Check::within(tag + "_effective_q", measured, q_hat, 0.03));
    r.checks.push_back(Check::at_most(tag + "_max_detrended_dev", worst, step_bound));
    trace.columns.emplace_back(tag + "_detrended", w.with_samples(std::move(detrended)));
    trace.columns.emplace_back(tag + "_reference", ref);
  }
  r.traces.push_back(std::move(trace));
  return r;
}

// ---------------------------------------------------------------------------

Report lowpass_equivalence(const Params& p) {
  const double rate = num(p, "rate_hz");
  const auto n = static_cast<std::size_t>(std::llround(num(p, "duration_s") * rate));
  const double q = num(p, "q"), eps = num(p, "eps");
  const std::vector<double> amps = p.at("amplitudes").get<std::vector<double>>();
  const std::vector<double> freqs = p.at("freqs_hz").get<std::vector<double>>();
  const std::vector<double> phases = p.at("phases_rad").get<std::vector<double>>();
  if (amps.size() != freqs.size() || amps.size() != phases.size()) {
    throw std::invalid_argument("lowpass-equivalence: tone lists differ in length");
  }

  double mu_max = 0.0;
  for (std::size_t k = 0; k < amps.size(); ++k) mu_max += 2.0 * kPi * freqs[k] * std::abs(amps[k]);
  const double mu = num(p, "mu_factor") * tightest_mu(q, mu_max);
  const double tau = eps / mu;  // corner mu / (2 pi eps)

  std::vector<double> xv(n), lp(n);
  const double offset = (2.0 * q - 1.0) * eps;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    double x = 0.0, y = offset;
    for (std::size_t k = 0; k < amps.size(); ++k) {
      const double w = 2.0 * kPi * freqs[k];
      x += amps[k] * std::sin(w * t + phases[k]);
      // Steady-state response of 1 / (1 + s tau).
      y += amps[k] / std::hypot(1.0, w * tau) * std::sin(w * t + phases[k] - std::atan(w * tau));
    }
    xv[i] = x;
    lp[i] = y;
  }
  const SampleSeries x(rate, std::move(xv));
  const SampleSeries lowpass(rate, std::move(lp));
  const SampleSeries out = qtf_run(x, {q, mu, eps});
  const double skip = num(p, "transient_taus") * tau;
  const double dev = residual_rms(out, lowpass, skip);
  const double ref = residual_rms(lowpass, constant(rate, n, 0.0), skip);

  Report r;
  r.metrics["mu"] = mu;
  r.metrics["mu_q"] = tightest_mu(q, mu_max);
  r.metrics["corner_hz"] = mu / (2.0 * kPi * eps);
  r.metrics["relative_rms_error"] = dev / ref;
  r.checks.push_back(Check::at_most("relative_rms_error", dev / ref, 0.01));
  r.traces.push_back({"lowpass", {{"x", x}, {"qtf", out}, {"lowpass", lowpass}}});
  return r;
}

// ---------------------------------------------------------------------------

SampleSeries smooth_signal(double rate, std::size_t n, Rng& rng) {
  const int tones = 1 + static_cast<int>(rng.uniform() * 6.0);
  std::vector<double> a(tones), f(tones), ph(tones);
  for (int k = 0; k < tones; ++k) {
    a[k] = 0.1 + 2.0 * rng.uniform();
    f[k] = 0.5 + 200.0 * rng.uniform();
    ph[k] = 2.0 * kPi * rng.uniform();
  }
  const double offset = 4.0 * rng.normal();
  const double slope = 2.0 * rng.normal();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    double v = offset + slope * t;
    for (int k = 0; k < tones; ++k) v += a[k] * std::sin(2.0 * kPi * f[k] * t + ph[k]);
    x[i] = v;
  }
  return SampleSeries(rate, std::move(x));
}

Report slew_invariants(const Params& p) {
  const double rate = num(p, "rate_hz");
  const auto n = static_cast<std::size_t>(std::llround(num(p, "duration_s") * rate));
  const double beta_lo = num(p, "beta_min"), beta_hi = num(p, "beta_max");
  Rng rng(seed_of(p));

  std::size_t protrusions = 0;
  const std::size_t smooth = count(p, "smooth_signals");
  for (std::size_t k = 0; k < smooth; ++k) {
    const SampleSeries s = smooth_signal(rate, n, rng);
    const double beta = beta_lo + (beta_hi - beta_lo) * rng.uniform();
    const double mu = inclusive_mu(max_slew(s), beta);
    protrusions += detect_outliers(s, compute_fences(s, {beta, mu, 0.0})).count();
  }

  // Adversarial records: smooth base plus steps, spikes and noise bursts,
  // fenced with a rate far below the inclusive bound.
  std::size_t onsets = 0, violations = 0;
  double worst_ratio = kInf;
  const double factor = num(p, "onset_factor");
  const std::size_t adversarial = count(p, "adversarial_signals");
  for (std::size_t k = 0; k < adversarial; ++k) {
    std::vector<double> x = smooth_signal(rate, n, rng).values();
    const double scale = 1.0 + 5.0 * rng.uniform();
    for (int e = 0; e < 20; ++e) {
      const auto at = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
      const double kind = rng.uniform();
      const double amp = scale * rng.normal();
      if (kind < 0.3) {
        for (std::size_t i = at; i < n; ++i) x[i] += amp;  // step
      } else if (kind < 0.7) {
        x[at] += 3.0 * amp;  // spike
      } else {
        const std::size_t len = 1 + static_cast<std::size_t>(rng.uniform() * 200.0);
        for (std::size_t i = at; i < std::min(n, at + len); ++i) x[i] += amp * rng.normal();
      }
    }
    const SampleSeries s(rate, std::move(x));
    const double beta = beta_lo + (beta_hi - beta_lo) * rng.uniform();
    const double mu = inclusive_mu(max_slew(s), beta) * (0.01 + 0.5 * rng.uniform());
    const OutlierMask m = detect_outliers(s, compute_fences(s, {beta, mu, 0.0}));
    const double needed = protrusion_slew(mu, beta);
    for (std::size_t i = 0; i < n; ++i) {
      if (!m.flags[i] || (i > 0 && m.flags[i - 1])) continue;
      ++onsets;
      const double step = i == 0 ? 0.0 : std::abs(s[i] - s[i - 1]) * rate;
      worst_ratio = std::min(worst_ratio, step / needed);
      if (!(step > factor * needed)) ++violations;
    }
  }

  Report r;
  r.metrics["smooth_protrusions"] = protrusions;
  r.metrics["adversarial_onsets"] = onsets;
  r.metrics["min_onset_slew_over_bound"] = worst_ratio;
  r.checks.push_back(Check::at_most("smooth_protrusions", static_cast<double>(protrusions), 0.0));
  r.checks.push_back(Check::at_most("onsets_below_slew_bound", static_cast<double>(violations), 0.0));
  r.checks.push_back(Check::at_least("adversarial_onsets", static_cast<double>(onsets), 1.0));
  return r;
}

// ---------------------------------------------------------------------------

Report numerical_scheme(const Params& p) {
  const double rate = num(p, "rate_hz");
  const double h = 1.0 / rate;
  const auto n = count(p, "samples");
  const auto segment = count(p, "timing_segment");
  const double q = num(p, "q"), mu = num(p, "mu"), walk = num(p, "walk_sigma");
  const double gamma = mu * h;
  if (2 * segment > n) throw std::invalid_argument("numerical-scheme: timing segments overlap");

  Rng rng(seed_of(p));
  double x = 0.0;
  QuantileTracker tracker({q, mu, 0.0}, x);
  QuantileTracker at_first = tracker;
  std::vector<double> first(segment), last(segment);
  QuantileTracker at_last = tracker;
  std::size_t outside = 0, snaps = 0;
  const double up = 2.0 * q * gamma, down = 2.0 * (q - 1.0) * gamma;
  for (std::size_t i = 0; i < n; ++i) {
    x += walk * rng.normal();
    if (i < segment) first[i] = x;
    if (i == n - segment) at_last = tracker;
    if (i >= n - segment) last[i - (n - segment)] = x;
    const double before = tracker.value();
    const double after = tracker.step(x, h);
    const double d = after - before;
    const double tol = 4.0 * std::numeric_limits<double>::epsilon() * (std::abs(before) + gamma);
    if (after == x) {
      ++snaps;
    } else if (std::abs(d - up) > tol && std::abs(d - down) > tol) {
      ++outside;
    }
  }

  auto time_segment = [&](const QuantileTracker& start, const std::vector<double>& xs) {
    double best = kInf;
    for (int rep = 0; rep < 5; ++rep) {
      QuantileTracker t = start;
      double sink = 0.0;
      const auto t0 = std::chrono::steady_clock::now();
      for (double v : xs) sink += t.step(v, h);
      const auto t1 = std::chrono::steady_clock::now();
      volatile double keep = sink;
      (void)keep;
      best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
  };
  const double t_first = time_segment(at_first, first);
  const double t_last = time_segment(at_last, last);

  Report r;
  r.metrics["samples"] = n;
  r.metrics["snaps"] = snaps;
  r.metrics["ns_per_sample_first"] = 1e9 * t_first / static_cast<double>(segment);
  r.metrics["ns_per_sample_last"] = 1e9 * t_last / static_cast<double>(segment);
  r.checks.push_back(Check::at_most("increments_outside_set", static_cast<double>(outside), 0.0));
  r.checks.push_back(Check::at_least("snap_events", static_cast<double>(snaps), 1.0));
  const double ratio = t_last / t_first;
  Check c = Check::within("time_ratio_last_first", ratio, 1.0, 0.0);
  c.lo = 0.5;
  c.hi = 2.0;
  c.pass = ratio >= 0.5 && ratio <= 2.0;
  r.checks.push_back(c);
  return r;
}

// ---------------------------------------------------------------------------

Report chirp_excess(const Params& p) {
  const double rate = num(p, "rate_hz");
  const double f_c = num(p, "f_c_hz");
  const double a = num(p, "amplitude");
  const double duration = num(p, "duration_s");
  const auto n = static_cast<std::size_t>(std::llround(duration * rate));
  const SampleSeries chirp = linear_chirp(rate, 0.0, f_c, duration, a);

  NoiseSpec s;
  s.kind = NoiseSpec::Kind::kMixture;
  s.impulse_rate_hz = num(p, "impulse_rate_hz");
  s.impulse_amp_dist = NoiseSpec::AmplitudeDist::kFixed;
  s.frontend_bandwidth_hz = num(p, "frontend_hz");
  s.seed = seed_of(p);
  s.window_start_s = num(p, "impulse_start_fraction") * duration;
  s.window_end_s = duration;
  const IirBiquadChain fe = bessel_lowpass(rate, s.frontend_bandwidth_hz, kFrontendOrder);
  s.impulse_amplitude = num(p, "impulse_peak") * a / impulse_peak(fe, rate);
  // sigma is set so the floor's output RMS is floor_rms.
  s.sigma = 1.0;
  {
    NoiseSpec unit = s;
    unit.kind = NoiseSpec::Kind::kGaussian;
    s.sigma = num(p, "floor_rms") / rms(noise(rate, duration, unit).samples());
  }
  const SampleSeries mix = add(chirp, noise(rate, duration, s));
  const std::vector<std::size_t> events = impulse_times(rate, n, s);

  const double beta = num(p, "beta");
  const ChirpDemoResult d = chirp_excess_band_demo(mix, f_c, a, num(p, "mu_factor"), beta);
  const ExcessBandFilter ex = excess_band_filter(rate, f_c);
  const auto width = static_cast<std::size_t>(std::ceil(num(p, "recall_window_s") * rate));
  const std::size_t lag = ex.bandstop.group_delay();
  const double rec_excess = recall(d.mask_excess, events, lag, width);
  const double rec_raw = recall(d.mask_direct, events, 0, width);
  const double rec_tight = recall(d.mask_tight, events, 0, width);
  const double slew_in = max_slew(chirp);
  const double slew_out = max_slew(apply_filter(ex, chirp));

  Report r;
  r.metrics["mu_max"] = d.mu_max;
  r.metrics["mu"] = d.mu_robust;
  r.metrics["impulses"] = events.size();
  r.metrics["recall_excess"] = rec_excess;
  r.metrics["recall_raw"] = rec_raw;
  r.metrics["recall_raw_tight"] = rec_tight;
  r.metrics["flagged_excess"] = d.mask_excess.count();
  r.metrics["flagged_raw"] = d.mask_direct.count();
  r.metrics["chirp_slew_in"] = slew_in;
  r.metrics["chirp_slew_out"] = slew_out;
  r.checks.push_back(Check::at_least("recall_excess", rec_excess, 0.9));
  r.checks.push_back(Check::below("recall_raw", rec_raw, 0.2));
  r.checks.push_back(Check::at_least("chirp_slew_reduction", slew_in / slew_out, 5.0));
  r.traces.push_back({"chirp_excess",
                      {{"mix", mix}, {"excess", d.excess}, {"flag_raw", from_flags(mix, d.mask_direct)},
                       {"flag_excess", from_flags(mix, d.mask_excess)}}});
  return r;
}

// ---------------------------------------------------------------------------

SampleSeries am_signal(const Params& p, double rate, std::size_t n) {
  std::vector<double> env(n);
  const double depth = num(p, "mod_depth"), fm = num(p, "mod_hz"), a = num(p, "amplitude");
  for (std::size_t i = 0; i < n; ++i) {
    env[i] = a * (1.0 + depth * std::sin(2.0 * kPi * fm * static_cast<double>(i) / rate));
  }
  return am_tone(SampleSeries(rate, std::move(env)), num(p, "carrier_hz"));
}

struct CinfScore {
  double delta_linear;
  double delta_cinf;
  CinfOutput out;
};

CinfScore score_cinf(const SampleSeries& signal, const SampleSeries& noise_part, const CinfConfig& cfg) {
  const SampleSeries x = add(signal, noise_part);
  CinfOutput out = cinf_run(x, cfg);
  const FirFilter fin = design_fir_bandpass(x.rate_hz(), cfg.final_band, cfg.fir_taps);
  const SampleSeries ref = delay(apply_filter(fin, signal), out.split_delay);
  const double skip = cfg.warmup_s + static_cast<double>(out.passband_delay + cfg.fir_taps) / x.rate_hz();
  const double dl = residual_rms(out.passband_linear, ref, skip);
  const double dc = residual_rms(out.passband_cinf, ref, skip);
  return {dl, dc, std::move(out)};
}

Report cinf_scenario(const Params& p) {
  const double rate = num(p, "rate_hz");
  const std::size_t n = count(p, "samples");
  const double duration = static_cast<double>(n) / rate;
  const SampleSeries signal = am_signal(p, rate, n);
  const double beta = num(p, "beta");

  CinfConfig cfg;
  cfg.signal_band = {num(p, "band_lo_hz"), num(p, "band_hi_hz")};
  cfg.final_band = cfg.signal_band;
  cfg.fir_taps = count(p, "fir_taps");
  cfg.warmup_s = num(p, "warmup_s");
  cfg.fence = {beta, inclusive_mu(max_slew(signal), beta) / num(p, "mu_divisor"), 0.0};

  auto make_noise = [&](double impulsive_rms) {
    NoiseSpec g;
    g.kind = NoiseSpec::Kind::kGaussian;
    g.frontend_bandwidth_hz = num(p, "frontend_hz");
    g.seed = seed_of(p);
    g.target_rms = num(p, "floor_rms");
    const SampleSeries floor = noise(rate, duration, g);
    if (impulsive_rms <= 0.0) return floor;
    NoiseSpec i = g;
    i.kind = NoiseSpec::Kind::kImpulsive;
    i.seed = seed_of(p, "impulse_seed");
    i.impulse_rate_hz = num(p, "impulse_rate_hz");
    i.impulse_amp_dist = NoiseSpec::AmplitudeDist::kGaussian;
    i.target_rms = impulsive_rms;
    return add(floor, noise(rate, duration, i));
  };

  const CinfScore main = score_cinf(signal, make_noise(num(p, "impulsive_rms")), cfg);
  const double gain_db = 20.0 * std::log10(main.delta_linear / main.delta_cinf);

  // No harm: the floor alone is outlier-free at this rate.
  const CinfScore clean = score_cinf(signal, make_noise(0.0), cfg);
  const double no_harm = residual_rms(clean.out.passband_cinf, clean.out.passband_linear);

  Report r;
  r.metrics["mu"] = cfg.fence.mu;
  r.metrics["delta_linear"] = main.delta_linear;
  r.metrics["delta_cinf"] = main.delta_cinf;
  r.metrics["improvement_db"] = gain_db;
  r.metrics["flagged"] = main.out.mask.count();
  r.metrics["no_harm_flagged"] = clean.out.mask.count();
  r.metrics["no_harm_rms"] = no_harm;
  r.checks.push_back(Check::at_least("improvement_db", gain_db, 6.0));
  r.checks.push_back(Check::at_most("no_harm_rms", no_harm, 1e-9));

  // The benefit grows with the impulsive level.
  const std::vector<double> levels = p.at("sweep_impulsive_rms").get<std::vector<double>>();
  Json sweep = Json::array();
  double prev_gap = -kInf;
  bool monotone = true;
  for (double level : levels) {
    const CinfScore s = score_cinf(signal, make_noise(level), cfg);
    const double gap = s.delta_linear - s.delta_cinf;
    sweep.push_back({{"impulsive_rms", level}, {"delta_linear", s.delta_linear}, {"delta_cinf", s.delta_cinf}});
    monotone = monotone && gap >= prev_gap;
    prev_gap = gap;
  }
  r.metrics["sweep"] = sweep;
  r.checks.push_back(Check::at_least("gap_monotone", monotone ? 1.0 : 0.0, 1.0));

  r.traces.push_back({"cinf",
                      {{"x", add(signal, make_noise(num(p, "impulsive_rms")))},
                       {"excess_band", main.out.excess_band},
                       {"excess_band_inf", main.out.excess_band_inf},
                       {"passband_linear", main.out.passband_linear},
                       {"passband_cinf", main.out.passband_cinf},
                       {"flag", from_flags(signal, main.out.mask)}}});
  return r;
}

// ---------------------------------------------------------------------------

// Real series of length n whose spectrum is `weight(f)` times the spectrum of
// `base` (a circular filter).
SampleSeries spectral_shape(const SampleSeries& base, const std::function<double(double)>& weight) {
  const std::size_t n = base.size();
  auto bins = rfft(base.samples());
  for (std::size_t k = 0; k < bins.size(); ++k) bins[k] *= weight(static_cast<double>(k) * base.rate_hz() / static_cast<double>(n));
  return base.with_samples(irfft(bins, n));
}

std::function<double(double)> flat_band(double lo, double hi, double taper) {
  return [=](double f) {
    if (f >= lo && f <= hi) return 1.0;
    if (f > lo - taper && f < lo) return 0.5 - 0.5 * std::cos(kPi * (f - (lo - taper)) / taper);
    if (f > hi && f < hi + taper) return 0.5 + 0.5 * std::cos(kPi * (f - hi) / taper);
    return 0.0;
  };
}

Report separation(const Params& p) {
  const double rate = num(p, "rate_hz");
  const std::size_t n = count(p, "samples");
  const double taper = num(p, "taper_hz");
  const std::uint64_t seed = seed_of(p);

  // Narrow: band-limited Gaussian noise.
  SampleSeries narrow = spectral_shape(white_gaussian(rate, n, 1.0, seed ^ 0x5EEDu),
                                       flat_band(num(p, "narrow_lo_hz"), num(p, "narrow_hi_hz"), taper));
  narrow = scale(narrow, 1.0 / rms(narrow.samples()));

  // Wide: a sparse impulse train, band-limited, then scrambled by the
  // conjugate all-pass so the separating all-pass restores it.
  std::vector<double> train(n, 0.0);
  Rng rng(seed);
  const double spacing = rate / num(p, "impulse_rate_hz");
  for (double t = rng.exponential(1.0) * spacing; t < static_cast<double>(n); t += rng.exponential(1.0) * spacing) {
    train[static_cast<std::size_t>(t)] += rng.sign();
  }
  const AllpassPhase phase = AllpassPhase::random(seed_of(p, "allpass_seed"));
  SampleSeries wide = spectral_shape(SampleSeries(rate, std::move(train)),
                                     flat_band(num(p, "wide_lo_hz"), num(p, "wide_hi_hz"), taper));
  wide = allpass_phase(wide, AllpassPhase::conjugate_of(phase));
  wide = scale(wide, std::pow(10.0, num(p, "wide_to_narrow_db") / 20.0) / rms(wide.samples()));
  const SampleSeries mix = add(narrow, wide);

  const double beta = num(p, "beta");
  CinfConfig cfg;
  cfg.signal_band = {num(p, "band_lo_hz"), num(p, "band_hi_hz")};
  cfg.final_band = cfg.signal_band;
  cfg.fir_taps = count(p, "fir_taps");
  cfg.warmup_s = num(p, "warmup_s");
  cfg.fence = {beta, inclusive_mu(max_slew(allpass_phase(narrow, phase)), beta) / num(p, "mu_divisor"), 0.0};

  const SeparationResult s = separate_wide_narrow(mix, cfg, phase.seed, narrow);
  const SampleSeries round_trip = allpass_phase(allpass_phase(mix, phase), AllpassPhase::conjugate_of(phase));
  const double identity = residual_rms(round_trip, mix);
  const double ratio_db =
      10.0 * std::log10((num(p, "wide_hi_hz") - num(p, "wide_lo_hz")) / (num(p, "narrow_hi_hz") - num(p, "narrow_lo_hz")));

  Report r;
  r.metrics["mu"] = cfg.fence.mu;
  r.metrics["bandwidth_ratio_db"] = ratio_db;
  r.metrics["delta_linear"] = s.delta_linear;
  r.metrics["delta_cinf"] = s.delta_cinf;
  r.metrics["flagged"] = s.flagged;
  r.metrics["round_trip_rms"] = identity;
  r.checks.push_back(Check::below("delta_cinf_vs_linear", s.delta_cinf, s.delta_linear));
  r.checks.push_back(Check::at_most("round_trip_rms", identity, 1e-9));
  r.traces.push_back({"separation",
                      {{"mix", mix}, {"narrow_truth", narrow}, {"wide_truth", wide}, {"narrow_cinf", s.narrow},
                       {"narrow_linear", s.narrow_linear}, {"wide_cinf", s.wide}}});
  return r;
}

// ---------------------------------------------------------------------------

std::vector<Experiment> build_registry() {
  std::vector<Experiment> e;
  e.push_back({"fig2-triplet-inf",
               "INF on an impulse, chirp and burst sharing one magnitude spectrum",
               {1},
               {{"rate_hz", 10000.0}, {"samples", 65536}, {"band_lo_hz", 500.0}, {"band_hi_hz", 3500.0},
                {"taper_hz", 300.0}, {"f0_hz", 2000.0}, {"f0_halfwidth_hz", 100.0}, {"analysis_taps", 255},
                {"beta", 1.5}, {"mu_margin", 1.05}, {"seed", 7}},
               triplet_inf});
  e.push_back({"fig4-psd-reduction",
               "INF on equal-power Gaussian and impulsive noise, in-band PSD change",
               {2},
               {{"rate_hz", 20000.0}, {"samples", 131072}, {"frontend_hz", 4000.0}, {"target_rms", 1.0},
                {"floor_fraction", 0.05}, {"impulse_rate_hz", 25.0}, {"band_lo_hz", 800.0}, {"band_hi_hz", 1200.0},
                {"low_band_hi_hz", 100.0}, {"beta", 1.5}, {"mu_margin", 1.0}, {"seed", 41}, {"floor_seed", 42}},
               psd_reduction});
  e.push_back({"fig7-boxcar-equivalence",
               "QTF quartiles against windowed sample quartiles with window 2 IQR / mu",
               {5},
               {{"rate_hz", 10000.0}, {"samples", 65536}, {"sigma", 1.0}, {"window_s", 0.05}, {"beta", 1.5},
                {"seed", 11}},
               boxcar_equivalence});
  e.push_back({"fig9-bandwidth",
               "outlier visibility at front-end bandwidth B versus 4B",
               {},
               {{"rate_hz", 20000.0}, {"duration_s", 5.0}, {"narrow_hz", 250.0}, {"sigma", 1.0},
                {"impulse_rate_hz", 10.0}, {"impulse_weight", 60.0}, {"signal_slope", 0.5}, {"beta", 1.5},
                {"mu_margin", 1.05}, {"seed", 9}},
               bandwidth});
  e.push_back({"fig10-am-fences",
               "quartile and fence convergence on a constant-amplitude tone",
               {3},
               {{"rate_hz", 10000.0}, {"duration_s", 20.0}, {"amplitude", 1.0}, {"carrier_hz", 10.0},
                {"beta", 1.5}, {"tail_fraction", 0.25}},
               am_fences});
  e.push_back({"trend-quantile",
               "effective quantile of a q = 3/4 tracker on a ramp of slope mu/4",
               {4},
               {{"rate_hz", 10000.0}, {"duration_s", 20.0}, {"q", 0.75}, {"sigma", 1.0}, {"warmup_s", 1.0},
                {"seed", 23}},
               trend_quantile});
  e.push_back({"lowpass-equivalence",
               "finite-eps QTF against a first-order lowpass on x + (2q - 1) eps",
               {7},
               {{"rate_hz", 10000.0}, {"duration_s", 5.0}, {"q", 0.75}, {"eps", 0.2}, {"mu_factor", 1.25},
                {"amplitudes", {1.0, 0.5}}, {"freqs_hz", {1.0, 3.7}}, {"phases_rad", {0.0, 1.0}},
                {"transient_taus", 50.0}},
               lowpass_equivalence});
  e.push_back({"slew-invariants",
               "fence inclusivity on smooth signals and protrusion slew on adversarial ones",
               {6},
               {{"rate_hz", 10000.0}, {"duration_s", 1.0}, {"smooth_signals", 100}, {"adversarial_signals", 50},
                {"beta_min", 0.5}, {"beta_max", 3.0}, {"onset_factor", 0.95}, {"seed", 100}},
               slew_invariants});
  e.push_back({"numerical-scheme",
               "per-sample increments and cost of the clamped Euler step",
               {11},
               {{"rate_hz", 10000.0}, {"samples", 10000000}, {"timing_segment", 1000000}, {"q", 0.75},
                {"mu", 10000.0}, {"walk_sigma", 1.0}, {"seed", 5}},
               numerical_scheme});
  e.push_back({"fig11-chirp-excess",
               "outlier recall on a chirp mixture, raw versus excess band",
               {8},
               {{"rate_hz", 48000.0}, {"f_c_hz", 2000.0}, {"amplitude", 1.0}, {"duration_s", 2.0},
                {"impulse_rate_hz", 20.0}, {"impulse_peak", 1.2}, {"frontend_hz", 6000.0},
                {"impulse_start_fraction", 0.75}, {"floor_rms", 0.01}, {"mu_factor", 0.2}, {"beta", 1.5},
                {"recall_window_s", 0.001}, {"seed", 13}},
               chirp_excess});
  e.push_back({"fig15-cinf",
               "complementary INF on an AM signal with wideband impulsive noise",
               {9},
               {{"rate_hz", 20000.0}, {"samples", 131072}, {"amplitude", 1.0}, {"carrier_hz", 2000.0},
                {"mod_hz", 40.0}, {"mod_depth", 0.5}, {"band_lo_hz", 1900.0}, {"band_hi_hz", 2100.0},
                {"fir_taps", 511}, {"frontend_hz", 8000.0}, {"floor_rms", 0.02}, {"impulsive_rms", 0.5},
                {"impulse_rate_hz", 100.0}, {"sweep_impulsive_rms", {0.1, 0.3, 1.0}}, {"beta", 1.5},
                {"mu_divisor", 3.0}, {"warmup_s", 0.1}, {"seed", 31}, {"impulse_seed", 32}},
               cinf_scenario});
  e.push_back({"fig17-separation",
               "wide/narrow separation through all-pass, CINF and the conjugate all-pass",
               {10},
               {{"rate_hz", 20000.0}, {"samples", 65536}, {"narrow_lo_hz", 1850.0}, {"narrow_hi_hz", 2150.0},
                {"wide_lo_hz", 1055.0}, {"wide_hi_hz", 2945.0}, {"taper_hz", 50.0}, {"band_lo_hz", 1800.0},
                {"band_hi_hz", 2200.0}, {"fir_taps", 511}, {"impulse_rate_hz", 50.0}, {"wide_to_narrow_db", 0.0},
                {"beta", 1.5}, {"mu_divisor", 3.0}, {"warmup_s", 0.05}, {"seed", 17}, {"allpass_seed", 99}},
               separation});
  return e;
}

}  // namespace

Check Check::at_least(std::string name, double value, double lo) {
  return {std::move(name), value, lo, kInf, value >= lo};
}

Check Check::at_most(std::string name, double value, double hi) {
  return {std::move(name), value, -kInf, hi, value <= hi};
}

Check Check::below(std::string name, double value, double hi) {
  return {std::move(name), value, -kInf, hi, value < hi, true};
}

Check Check::within(std::string name, double value, double target, double tol) {
  return {std::move(name), value, target - tol, target + tol, std::abs(value - target) <= tol};
}

std::string Check::describe() const {
  char buf[256];
  if (std::isinf(lo) && std::isinf(hi)) {
    std::snprintf(buf, sizeof buf, "%s = %.6g", name.c_str(), value);
  } else if (std::isinf(hi)) {
    std::snprintf(buf, sizeof buf, "%s = %.6g (>= %.6g)", name.c_str(), value, lo);
  } else if (std::isinf(lo)) {
    std::snprintf(buf, sizeof buf, "%s = %.6g (%s %.6g)", name.c_str(), value, strict ? "<" : "<=", hi);
  } else {
    std::snprintf(buf, sizeof buf, "%s = %.6g (in [%.6g, %.6g])", name.c_str(), value, lo, hi);
  }
  return buf;
}

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

Json Report::to_json() const {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["experiment"] = experiment;
  j["passed"] = passed();
  j["params"] = Json::parse(params.dump());
  Json checks_json = Json::array();
  for (const Check& c : checks) {
    Json cj{{"name", c.name}, {"value", c.value}, {"pass", c.pass}};
    cj["min"] = std::isinf(c.lo) ? Json(nullptr) : Json(c.lo);
    cj["max"] = std::isinf(c.hi) ? Json(nullptr) : Json(c.hi);
    cj["max_exclusive"] = c.strict;
    checks_json.push_back(std::move(cj));
  }
  j["checks"] = std::move(checks_json);
  j["metrics"] = metrics;
  Json files = Json::array();
  for (const Trace& t : traces) files.push_back(t.name + ".csv");
  j["traces"] = std::move(files);
  return j;
}

const std::vector<Experiment>& registry() {
  static const std::vector<Experiment> r = build_registry();
  return r;
}

const Experiment* find(const std::string& name) {
  for (const Experiment& e : registry()) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

Report run(const std::string& name, const Params& overrides) {
  const Experiment* e = find(name);
  if (e == nullptr) throw std::out_of_range("unknown experiment: " + name);
  Params p = e->defaults;
  if (!overrides.is_null()) {
    if (!overrides.is_object()) throw std::invalid_argument("experiment params must be a JSON object");
    for (const auto& [key, value] : overrides.items()) {
      if (!p.contains(key)) throw std::invalid_argument("experiment " + name + ": unknown parameter '" + key + "'");
    }
    p.merge_patch(overrides);
  }
  Report r;
  try {
    r = e->run(p);
  } catch (const nlohmann::json::exception& ex) {
    throw std::invalid_argument("experiment " + name + ": bad parameter type (" + ex.what() + ")");
  }
  r.experiment = name;
  r.params = p;
  return r;
}

std::pair<std::string, Params> load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  Params j;
  try {
    j = Params::parse(in);
  } catch (const nlohmann::json::parse_error& ex) {
    throw std::invalid_argument("config " + path + ": " + ex.what());
  }
  if (!j.is_object() || !j.contains("schema_version") || j["schema_version"] != kSchemaVersion) {
    throw std::invalid_argument("config " + path + ": schema_version must be " + std::to_string(kSchemaVersion));
  }
  if (!j.contains("name") || !j["name"].is_string()) throw std::invalid_argument("config " + path + ": missing name");
  return {j["name"].get<std::string>(), j.value("params", Params::object())};
}

void write_outputs(const Report& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const Trace& t : report.traces) {
    std::vector<std::pair<std::string, const SampleSeries*>> cols;
    for (const auto& [name, s] : t.columns) cols.emplace_back(name, &s);
    write_csv_columns(std::filesystem::path(dir) / (t.name + ".csv"), cols);
  }
  std::ofstream out(std::filesystem::path(dir) / "report.json");
  out << report.to_json().dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write report.json in " + dir);
}

}  // namespace qtfkit::experiments
