// Runs every registered scenario at its default configuration and reports
// one PASS/FAIL line per acceptance criterion.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <new>
#include <string>
#include <vector>

#include "qtfkit/experiments.hpp"
#include "qtfkit/qtf.hpp"
#include "qtfkit/rng.hpp"

namespace {

std::atomic<std::size_t> g_allocations{0};

const char* const kTitles[] = {
    "",
    "same-spectrum triplet: impulse reduced >= 20 dB, chirp/burst untouched",
    "equal-PSD noise: Gaussian within 0.5 dB, impulsive reduced 10 +/- 3 dB",
    "AM tone quartiles within 2 %, fences within 5 %",
    "trend: effective quantile 5/8 +/- 0.03, detrended match within one step",
    "boxcar equivalence: RMS deviation <= 0.2 IQR",
    "slew invariants: full containment and protrusion onsets",
    "finite-eps lowpass equivalence within 1 % RMS",
    "excess-band recall >= 0.9 vs raw < 0.2, slew reduction >= 5",
    "CINF passband improvement >= 6 dB and no-harm",
    "wide/narrow separation and all-pass round trip",
    "clamp increments and constant per-sample cost",
};

// Steady-state tracker loop must not touch the heap.
std::size_t tracker_loop_allocations() {
  qtfkit::Rng rng(5);
  std::vector<double> x(1'000'000);
  double walk = 0.0;
  for (auto& v : x) v = walk += rng.normal();
  qtfkit::QuantileTracker t({0.75, 1e4, 0.0}, x[0]);
  const std::size_t before = g_allocations.load();
  double sink = 0.0;
  for (double v : x) sink += t.step(v, 1e-4);
  const std::size_t after = g_allocations.load();
  if (sink == 0.12345) std::puts("");
  return after - before;
}

}  // namespace

void* operator new(std::size_t n) {
  g_allocations.fetch_add(1, std::memory_order_relaxed);
  if (void* p = std::malloc(n ? n : 1)) return p;
  throw std::bad_alloc();
}
void operator delete(void* p) noexcept { std::free(p); }
void operator delete(void* p, std::size_t) noexcept { std::free(p); }

int main() {
  namespace ex = qtfkit::experiments;
  std::map<int, std::vector<const ex::Experiment*>> by_criterion;
  for (const auto& e : ex::registry()) {
    for (int c : e.criteria) by_criterion[c].push_back(&e);
  }

  std::map<std::string, bool> results;
  for (const auto& e : ex::registry()) {
    if (e.criteria.empty()) continue;
    bool ok = false;
    try {
      const ex::Report r = ex::run(e.name);
      for (const auto& c : r.checks) std::printf("  [%s] %s\n", e.name.c_str(), c.describe().c_str());
      ok = r.passed();
    } catch (const std::exception& err) {
      std::printf("  [%s] error: %s\n", e.name.c_str(), err.what());
    }
    results[e.name] = ok;
  }

  const std::size_t allocs = tracker_loop_allocations();
  std::printf("  [tracker-loop] heap allocations over 1e6 steps = %zu (want 0)\n", allocs);

  int failures = 0;
  for (int c = 1; c <= 11; ++c) {
    bool ok = !by_criterion[c].empty();
    for (const auto* e : by_criterion[c]) ok = ok && results[e->name];
    if (c == 11) ok = ok && allocs == 0;
    if (!ok) ++failures;
    std::printf("criterion %2d: %s  %s\n", c, ok ? "PASS" : "FAIL", kTitles[c]);
  }
  return failures == 0 ? 0 : 1;
}
