#include "qtfkit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace qtfkit::oracle {
namespace {

struct Bounds {
  std::size_t begin;
  std::size_t end;  // exclusive
};

Bounds window_bounds(std::size_t n, std::size_t width, std::size_t size, Alignment alignment) {
  if (alignment == Alignment::kCausal) {
    const std::size_t begin = n + 1 >= width ? n + 1 - width : 0;
    return {begin, n + 1};
  }
  const std::size_t before = (width - 1) / 2;
  const std::size_t after = width - 1 - before;
  const std::size_t begin = n >= before ? n - before : 0;
  return {begin, std::min(size, n + after + 1)};
}

// Keeps the current window sorted while it slides; insert/erase are O(W).
class SortedWindow {
 public:
  void insert(double x) { values_.insert(std::upper_bound(values_.begin(), values_.end(), x), x); }
  void erase(double x) { values_.erase(std::lower_bound(values_.begin(), values_.end(), x)); }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

template <typename Visit>
void slide(const SampleSeries& s, const WindowSpec& w, Visit visit) {
  const std::size_t width = w.samples(s.rate_hz());
  if (width > s.size()) throw std::invalid_argument("oracle: window longer than series");
  SortedWindow window;
  Bounds current{0, 0};
  for (std::size_t n = 0; n < s.size(); ++n) {
    const Bounds next = window_bounds(n, width, s.size(), w.alignment);
    for (std::size_t i = current.end; i < next.end; ++i) window.insert(s[i]);
    for (std::size_t i = current.begin; i < next.begin; ++i) window.erase(s[i]);
    current = next;
    visit(n, window.values());
  }
}

}  // namespace

std::size_t WindowSpec::samples(double rate_hz) const {
  const auto width = static_cast<std::size_t>(std::llround(width_s * rate_hz));
  if (!(width_s > 0.0) || width < 2) throw std::invalid_argument("oracle: window must span >= 2 samples");
  return width;
}

SampleSeries windowed_quantile(const SampleSeries& s, const WindowSpec& w, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("windowed_quantile: q must lie in (0, 1)");
  std::vector<double> out(s.size());
  slide(s, w, [&](std::size_t n, const std::vector<double>& sorted) { out[n] = quantile_sorted(sorted, q); });
  return s.with_samples(std::move(out));
}

double stationary_quantile(const SampleSeries& s, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("stationary_quantile: q must lie in (0, 1)");
  if (s.empty()) throw std::invalid_argument("stationary_quantile: empty series");
  return quantile(s.samples(), q);
}

SampleSeries hampel(const SampleSeries& s, const WindowSpec& w, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("hampel: k must be positive");
  std::vector<double> out(s.samples().begin(), s.samples().end());
  std::vector<double> deviations;
  slide(s, w, [&](std::size_t n, const std::vector<double>& sorted) {
    const double median = quantile_sorted(sorted, 0.5);
    deviations.resize(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) deviations[i] = std::abs(sorted[i] - median);
    std::sort(deviations.begin(), deviations.end());
    const double mad = kMadScale * quantile_sorted(deviations, 0.5);
    if (std::abs(s[n] - median) > k * mad) out[n] = median;
  });
  return s.with_samples(std::move(out));
}

}  // namespace qtfkit::oracle
