#include "qtfkit/cinf.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <thread>

#include "qtfkit/analysis.hpp"
#include "qtfkit/fft.hpp"
#include "qtfkit/siggen.hpp"

namespace qtfkit {
namespace {

bool same_band(const BandSpec& a, const BandSpec& b) { return a.f_lo == b.f_lo && a.f_hi == b.f_hi; }

// Single-producer single-consumer queue with a fixed capacity.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity) : capacity_(capacity) {}

  void push(T item) {
    std::unique_lock lock(mutex_);
    not_full_.wait(lock, [&] { return items_.size() < capacity_; });
    items_.push_back(std::move(item));
    not_empty_.notify_one();
  }

  void close() {
    std::lock_guard lock(mutex_);
    closed_ = true;
    not_empty_.notify_all();
  }

  /// Empty optional once the queue is closed and drained.
  std::optional<T> pop() {
    std::unique_lock lock(mutex_);
    not_empty_.wait(lock, [&] { return !items_.empty() || closed_; });
    if (items_.empty()) return std::nullopt;
    T item = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return item;
  }

 private:
  std::size_t capacity_;
  std::deque<T> items_;
  bool closed_ = false;
  std::mutex mutex_;
  std::condition_variable not_full_;
  std::condition_variable not_empty_;
};

struct SplitBlock {
  std::size_t start;
  std::vector<double> bandpassed;
  std::vector<double> excess;
};

struct CleanBlock {
  std::size_t start;
  std::vector<double> cleaned;
};

}  // namespace

void CinfConfig::validate(double rate_hz) const {
  signal_band.validate(rate_hz);
  final_band.validate(rate_hz);
  fence.validate();
  if (fir_taps % 2 == 0 || fir_taps < 31) throw std::invalid_argument("cinf: fir_taps must be odd and >= 31");
  if (!(warmup_s >= 0.0)) throw std::invalid_argument("cinf: warmup_s must be >= 0");
}

CinfFilters design_cinf_filters(const CinfConfig& cfg, double rate_hz) {
  cfg.validate(rate_hz);
  FirFilter bp = design_fir_bandpass(rate_hz, cfg.signal_band, cfg.fir_taps);
  FirFilter bs = complement_bandstop(bp);
  FirFilter fin = same_band(cfg.signal_band, cfg.final_band) ? bp
                                                             : design_fir_bandpass(rate_hz, cfg.final_band, cfg.fir_taps);
  return {std::move(bp), std::move(bs), std::move(fin)};
}

CinfOutput cinf_run(const SampleSeries& s, const CinfConfig& cfg) {
  if (s.empty()) throw std::invalid_argument("cinf_run: empty series");
  const CinfFilters f = design_cinf_filters(cfg, s.rate_hz());

  SampleSeries bandpassed = apply_filter(f.bandpass, s);
  SampleSeries excess = apply_filter(f.bandstop, s);
  InfResult inf = inf_filter(excess, cfg.fence);
  SampleSeries cleaned = add(bandpassed, inf.cleaned);
  SampleSeries passband_cinf = apply_filter(f.final_filter, cleaned);
  SampleSeries passband_linear = delay(apply_filter(f.final_filter, s), f.bandpass.group_delay());

  return {std::move(cleaned),
          std::move(bandpassed),
          std::move(passband_linear),
          std::move(passband_cinf),
          std::move(excess),
          std::move(inf.cleaned),
          std::move(inf.mask),
          f.bandpass.group_delay(),
          f.bandpass.group_delay() + f.final_filter.group_delay()};
}

CinfStream::CinfStream(const CinfConfig& cfg, double rate_hz)
    : CinfStream(design_cinf_filters(cfg, rate_hz), cfg.fence, rate_hz) {}

CinfStream::CinfStream(const CinfFilters& f, const FenceParams& fence, double rate_hz)
    : bandpass_(f.bandpass),
      bandstop_(f.bandstop),
      inf_(fence, rate_hz),
      final_cinf_(f.final_filter),
      final_linear_(f.final_filter),
      linear_delay_(f.bandpass.group_delay() + 1, 0.0),
      split_delay_(f.bandpass.group_delay()),
      passband_delay_(f.bandpass.group_delay() + f.final_filter.group_delay()) {}

CinfStream::Output CinfStream::push(double x) {
  const double bp = bandpass_.push(x);
  const double bs = bandstop_.push(x);
  const StreamingInf::Output inf = inf_.push(bs);
  const double cleaned = bp + inf.value;
  const double passband_cinf = final_cinf_.push(cleaned);

  // Delay line of split_delay_ samples on the linear path.
  linear_delay_[delay_head_] = final_linear_.push(x);
  delay_head_ = (delay_head_ + 1) % linear_delay_.size();
  const double passband_linear = linear_delay_[delay_head_];
  return {cleaned, passband_linear, passband_cinf, inf.flagged};
}

CinfOutput cinf_run_pipelined(const SampleSeries& s, const CinfConfig& cfg, std::size_t block,
                              std::size_t queue_blocks) {
  if (s.empty()) throw std::invalid_argument("cinf_run_pipelined: empty series");
  if (block == 0 || queue_blocks == 0) throw std::invalid_argument("cinf_run_pipelined: block sizes must be positive");
  const CinfFilters f = design_cinf_filters(cfg, s.rate_hz());
  const std::size_t n = s.size();

  std::vector<double> bandpassed(n), excess(n), excess_inf(n), cleaned(n), pb_cinf(n), pb_linear(n);
  std::vector<bool> flags(n);
  BoundedQueue<SplitBlock> split_queue(queue_blocks);
  BoundedQueue<CleanBlock> clean_queue(queue_blocks);

  {
    std::jthread split([&] {
      FirStream bp(f.bandpass);
      FirStream bs(f.bandstop);
      for (std::size_t start = 0; start < n; start += block) {
        const std::size_t len = std::min(block, n - start);
        SplitBlock b{start, std::vector<double>(len), std::vector<double>(len)};
        for (std::size_t i = 0; i < len; ++i) {
          b.bandpassed[i] = bp.push(s[start + i]);
          b.excess[i] = bs.push(s[start + i]);
        }
        split_queue.push(std::move(b));
      }
      split_queue.close();
    });

    std::jthread fence([&] {
      StreamingInf inf(cfg.fence, s.rate_hz());
      while (auto b = split_queue.pop()) {
        CleanBlock out{b->start, std::vector<double>(b->excess.size())};
        for (std::size_t i = 0; i < b->excess.size(); ++i) {
          const auto r = inf.push(b->excess[i]);
          const std::size_t at = b->start + i;
          bandpassed[at] = b->bandpassed[i];
          excess[at] = b->excess[i];
          excess_inf[at] = r.value;
          flags[at] = r.flagged;
          out.cleaned[i] = b->bandpassed[i] + r.value;
        }
        clean_queue.push(std::move(out));
      }
      clean_queue.close();
    });

    std::jthread finish([&] {
      FirStream fin(f.final_filter);
      while (auto b = clean_queue.pop()) {
        for (std::size_t i = 0; i < b->cleaned.size(); ++i) {
          cleaned[b->start + i] = b->cleaned[i];
          pb_cinf[b->start + i] = fin.push(b->cleaned[i]);
        }
      }
    });

    // The linear path needs only the input; it runs here meanwhile.
    FirStream lin(f.final_filter);
    const std::size_t d = f.bandpass.group_delay();
    for (std::size_t i = 0; i < n; ++i) {
      const double y = lin.push(s[i]);
      if (i + d < n) pb_linear[i + d] = y;
    }
  }

  return {s.with_samples(std::move(cleaned)),
          s.with_samples(std::move(bandpassed)),
          s.with_samples(std::move(pb_linear)),
          s.with_samples(std::move(pb_cinf)),
          s.with_samples(std::move(excess)),
          s.with_samples(std::move(excess_inf)),
          OutlierMask{std::move(flags)},
          f.bandpass.group_delay(),
          f.bandpass.group_delay() + f.final_filter.group_delay()};
}

SeparationResult separate_wide_narrow(const SampleSeries& mix, const CinfConfig& cfg,
                                      std::uint64_t allpass_seed, const SampleSeries& narrow_truth) {
  require_aligned(mix, narrow_truth, "separate_wide_narrow");
  const std::size_t n = mix.size();
  if (!is_power_of_two(n)) throw std::invalid_argument("separate_wide_narrow: length must be a power of two");
  cfg.validate(mix.rate_hz());

  const AllpassPhase phase = AllpassPhase::random(allpass_seed);
  const SampleSeries y = allpass_phase(mix, phase);

  // Periodic extension: a pre-roll long enough for the filters and trackers
  // to settle, and a tail covering the pipeline delay.
  const std::size_t warmup = static_cast<std::size_t>(std::ceil(cfg.warmup_s * mix.rate_hz()));
  const std::size_t pre = std::min(n, 4 * cfg.fir_taps + warmup);
  const std::size_t post = cfg.fir_taps;  // >= passband delay
  if (post > n) throw std::invalid_argument("separate_wide_narrow: record shorter than the filters");
  std::vector<double> ext;
  ext.reserve(pre + n + post);
  for (std::size_t i = n - pre; i < n; ++i) ext.push_back(y[i]);
  ext.insert(ext.end(), y.values().begin(), y.values().end());
  for (std::size_t i = 0; i < post; ++i) ext.push_back(y[i]);

  const CinfOutput out = cinf_run(SampleSeries(mix.rate_hz(), std::move(ext)), cfg);
  const std::size_t offset = pre + out.passband_delay;
  std::vector<double> narrow_y(n), linear_y(n);
  for (std::size_t i = 0; i < n; ++i) {
    narrow_y[i] = out.passband_cinf[offset + i];
    linear_y[i] = out.passband_linear[offset + i];
  }
  std::size_t flagged = 0;
  for (std::size_t i = pre; i < pre + n; ++i) flagged += out.mask.flags[i];

  const AllpassPhase restore = AllpassPhase::conjugate_of(phase);
  SampleSeries narrow = allpass_phase(mix.with_samples(std::move(narrow_y)), restore);
  SampleSeries narrow_linear = allpass_phase(mix.with_samples(std::move(linear_y)), restore);
  SampleSeries wide = add(mix, scale(narrow, -1.0));
  SampleSeries wide_linear = add(mix, scale(narrow_linear, -1.0));

  const double delta_linear = residual_rms(narrow_linear, narrow_truth);
  const double delta_cinf = residual_rms(narrow, narrow_truth);
  return {std::move(wide), std::move(narrow), std::move(wide_linear), std::move(narrow_linear),
          delta_linear, delta_cinf, flagged};
}

ChirpDemoResult chirp_excess_band_demo(const SampleSeries& mix, double f_c, double chirp_amplitude,
                                       double mu_factor, double beta) {
  if (!(chirp_amplitude > 0.0) || !(mu_factor > 0.0)) {
    throw std::invalid_argument("chirp_excess_band_demo: amplitude and mu_factor must be positive");
  }
  const double mu_max = 2.0 * std::numbers::pi * f_c * chirp_amplitude;
  const double mu_robust = mu_factor * mu_max;

  const InfResult tight = inf_filter(mix, {beta, 2.0 * mu_max, 0.0});
  const InfResult direct = inf_filter(mix, {beta, mu_robust, 0.0});
  SampleSeries excess = apply_filter(excess_band_filter(mix.rate_hz(), f_c), mix);
  const InfResult on_excess = inf_filter(excess, {beta, mu_robust, 0.0});
  return {tight.mask, direct.mask, on_excess.mask, std::move(excess), mu_max, mu_robust};
}

}  // namespace qtfkit
