// qtfkit command-line front end.
//
// Exit codes: 0 success, 1 usage or parameter error, 2 data error (unreadable
// or malformed input), 3 experiment threshold failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qtfkit/analysis.hpp"
#include "qtfkit/cinf.hpp"
#include "qtfkit/experiments.hpp"
#include "qtfkit/fencing.hpp"
#include "qtfkit/qtf.hpp"
#include "qtfkit/series.hpp"
#include "qtfkit/series_io.hpp"
#include "qtfkit/siggen.hpp"

namespace fs = std::filesystem;
using namespace qtfkit;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kThreshold = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string default_out_dir() {
  const char* env = std::getenv("QTFKIT_OUT");
  return env != nullptr && *env != '\0' ? env : "out";
}

// "auto" or a positive number.
std::optional<double> parse_mu(const std::string& s) {
  if (s == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !(v > 0.0)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("--mu must be a positive number or 'auto', got '" + s + "'");
  }
}

SampleSeries load(const std::string& path) {
  if (!fs::exists(path)) throw DataError("input file not found: " + path);
  return read_series(path);
}

void print_stats(const std::string& name, const SampleSeries& s) {
  const bool has_power = rms(s.samples()) > 0.0;
  std::printf("%-10s n=%zu rate=%g rms=%.6g iqr=%.6g par_db=%s\n", name.c_str(), s.size(), s.rate_hz(),
              rms(s.samples()), s.size() >= 4 ? iqr(s) : 0.0,
              has_power ? format_number(par_db(s)).c_str() : "n/a");
}

// Writes `s` under `out`: a file path when it ends in .csv/.bin, otherwise a
// directory receiving <name>.csv (and <name>.bin with --binary).
void emit(const std::string& out, const std::string& name, const SampleSeries& s, bool binary) {
  const fs::path p(out);
  if (p.extension() == ".csv") {
    write_csv(p, s);
  } else if (p.extension() == ".bin") {
    write_binary(p, s);
  } else {
    write_csv(p / (name + ".csv"), s);
    if (binary) write_binary(p / (name + ".bin"), s);
  }
}

fs::path output_file(const std::string& out, const std::string& default_name) {
  const fs::path p(out);
  return p.extension() == ".csv" ? p : p / default_name;
}

double band_magnitude(double f, double lo, double hi, double taper) {
  if (f >= lo && f <= hi) return 1.0;
  if (taper > 0.0 && f > lo - taper && f < lo) return 0.5 - 0.5 * std::cos(std::numbers::pi * (f - (lo - taper)) / taper);
  if (taper > 0.0 && f > hi && f < hi + taper) return 0.5 + 0.5 * std::cos(std::numbers::pi * (f - hi) / taper);
  return 0.0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qtfkit: quantile tracking filters, fencing and impulsive noise filtering"};
  app.require_subcommand(1);
  std::string out = default_out_dir();

  // synth ------------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "generate test signals");
  std::string kind = "gaussian";
  double rate = 10000.0, duration = 1.0, slope = 1.0, value = 0.0, amp = 1.0, f0 = 0.0, f1 = 100.0, carrier = 10.0;
  double sigma = 1.0, impulse_rate = 0.0, frontend = 1000.0, band_lo = 500.0, band_hi = 3500.0, taper = 300.0;
  std::optional<double> target_rms;
  std::string noise_kind = "gaussian";
  std::size_t n = 0;
  std::uint64_t seed = 0;
  bool binary = false;
  synth->add_option("--kind", kind, "triplet|chirp|am|ramp|constant|gaussian|noise")
      ->check(CLI::IsMember({"triplet", "chirp", "am", "ramp", "constant", "gaussian", "noise"}));
  synth->add_option("--rate", rate, "sample rate (Hz)")->check(CLI::PositiveNumber);
  synth->add_option("--duration", duration, "seconds (ignored when --n is given)")->check(CLI::NonNegativeNumber);
  synth->add_option("--n", n, "number of samples");
  synth->add_option("--seed", seed);
  synth->add_option("--slope", slope, "ramp slope (units/s)");
  synth->add_option("--value", value, "constant value");
  synth->add_option("--amplitude", amp);
  synth->add_option("--f-start", f0, "chirp start frequency (Hz)");
  synth->add_option("--f-end", f1, "chirp end frequency (Hz)");
  synth->add_option("--carrier", carrier, "AM carrier frequency (Hz)");
  synth->add_option("--sigma", sigma, "Gaussian standard deviation");
  synth->add_option("--noise-kind", noise_kind, "gaussian|impulsive|mixture")
      ->check(CLI::IsMember({"gaussian", "impulsive", "mixture"}));
  synth->add_option("--impulse-rate", impulse_rate, "impulses per second");
  synth->add_option("--frontend", frontend, "front-end bandwidth (Hz)");
  synth->add_option("--target-rms", target_rms);
  synth->add_option("--band-lo", band_lo, "triplet band lower edge (Hz)");
  synth->add_option("--band-hi", band_hi, "triplet band upper edge (Hz)");
  synth->add_option("--taper", taper, "triplet band edge taper (Hz)");
  synth->add_flag("--binary", binary, "also write .bin files");
  synth->add_option("--out", out, "output directory or file");

  // qtf ----------------------------------------------------------------------
  auto* qtf = app.add_subcommand("qtf", "run quantile trackers");
  std::string input;
  std::vector<double> qs{0.5};
  double mu = 1.0, eps = 0.0;
  qtf->add_option("input", input, "input CSV or .bin")->required();
  qtf->add_option("--q", qs, "quantile levels")->delimiter(',');
  qtf->add_option("--mu", mu, "slew rate (units/s)")->check(CLI::PositiveNumber);
  qtf->add_option("--eps", eps, "comparator half-width (0 = sign)")->check(CLI::NonNegativeNumber);
  qtf->add_option("--out", out, "output directory or .csv file");

  // inf ----------------------------------------------------------------------
  auto* inf = app.add_subcommand("inf", "fence outliers and replace them");
  std::string mu_text = "auto";
  double beta = kDefaultBeta;
  std::string replace = "midhinge";
  inf->add_option("input", input, "input CSV or .bin")->required();
  inf->add_option("--beta", beta)->check(CLI::PositiveNumber);
  inf->add_option("--mu", mu_text, "rate or 'auto' (inclusive bound from the measured max slew)");
  inf->add_option("--eps", eps)->check(CLI::NonNegativeNumber);
  inf->add_option("--replace", replace, "midhinge|clamp")->check(CLI::IsMember({"midhinge", "clamp"}));
  inf->add_option("--out", out, "output directory or .csv file");

  // cinf ---------------------------------------------------------------------
  auto* cinf = app.add_subcommand("cinf", "complementary INF around a signal band");
  double sig_lo = 0.0, sig_hi = 0.0;
  std::optional<double> fin_lo, fin_hi;
  std::size_t taps = kDefaultFirTaps;
  double warmup = 0.0;
  cinf->add_option("input", input, "input CSV or .bin")->required();
  cinf->add_option("--band-lo", sig_lo, "signal band lower edge (Hz)")->required();
  cinf->add_option("--band-hi", sig_hi, "signal band upper edge (Hz)")->required();
  cinf->add_option("--final-lo", fin_lo, "final passband lower edge (default: signal band)");
  cinf->add_option("--final-hi", fin_hi, "final passband upper edge (default: signal band)");
  cinf->add_option("--taps", taps, "FIR length (odd)");
  cinf->add_option("--beta", beta)->check(CLI::PositiveNumber);
  cinf->add_option("--mu", mu_text, "excess-band rate or 'auto' (a third of the inclusive bound of the bandpassed input)");
  cinf->add_option("--warmup", warmup, "seconds")->check(CLI::NonNegativeNumber);
  cinf->add_option("--out", out, "output directory or .csv file");

  // psd ----------------------------------------------------------------------
  auto* psd = app.add_subcommand("psd", "Welch power spectral density");
  std::size_t segment = kWelchSegment;
  double overlap = kWelchOverlap;
  psd->add_option("input", input, "input CSV or .bin")->required();
  psd->add_option("--segment", segment, "segment length");
  psd->add_option("--overlap", overlap, "overlap fraction in [0, 1)");
  psd->add_option("--out", out, "output directory or .csv file");

  // experiment ---------------------------------------------------------------
  auto* exp = app.add_subcommand("experiment", "run a named scenario and write its report");
  std::string exp_name, config;
  std::vector<std::string> sets;
  bool list = false;
  exp->add_option("name", exp_name, "experiment name");
  exp->add_option("--config", config, "JSON config file (schema_version 1)");
  exp->add_option("--set", sets, "override a parameter: key=<json value>");
  exp->add_flag("--list", list, "list experiments");
  exp->add_option("--out", out, "output directory (default: $QTFKIT_OUT/<name> or out/<name>)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*synth) {
      const std::size_t count = n > 0 ? n : static_cast<std::size_t>(std::llround(duration * rate));
      const double dur = static_cast<double>(count) / rate;
      std::vector<std::pair<std::string, SampleSeries>> made;
      if (kind == "triplet") {
        const Triplet t = triplet_from_magnitude(
            rate, count, [&](double f) { return band_magnitude(f, band_lo, band_hi, taper); }, seed);
        made = {{"impulse", t.impulse}, {"chirp", t.chirp}, {"burst", t.burst}};
      } else if (kind == "chirp") {
        made = {{"chirp", linear_chirp(rate, f0, f1, dur, amp)}};
      } else if (kind == "am") {
        made = {{"am", am_tone(constant(rate, count, amp), carrier)}};
      } else if (kind == "ramp") {
        made = {{"ramp", ramp(rate, dur, slope)}};
      } else if (kind == "constant") {
        made = {{"constant", constant(rate, count, value)}};
      } else if (kind == "gaussian") {
        made = {{"gaussian", white_gaussian(rate, count, sigma, seed)}};
      } else {
        NoiseSpec spec;
        spec.kind = noise_kind == "gaussian"    ? NoiseSpec::Kind::kGaussian
                    : noise_kind == "impulsive" ? NoiseSpec::Kind::kImpulsive
                                                : NoiseSpec::Kind::kMixture;
        spec.sigma = sigma;
        spec.impulse_rate_hz = impulse_rate;
        spec.impulse_amplitude = amp;
        spec.frontend_bandwidth_hz = frontend;
        spec.seed = seed;
        spec.target_rms = target_rms;
        made = {{"noise", noise(rate, dur, spec)}};
      }
      if (made.size() > 1 && (fs::path(out).extension() == ".csv" || fs::path(out).extension() == ".bin")) {
        throw UsageError("--kind " + kind + " writes several series; --out must be a directory");
      }
      for (const auto& [name, s] : made) {
        emit(out, name, s, binary);
        print_stats(name, s);
      }
      return kOk;
    }

    if (*qtf) {
      const SampleSeries s = load(input);
      std::vector<std::pair<std::string, SampleSeries>> tracks;
      for (double q : qs) tracks.emplace_back("q" + format_number(q), qtf_run(s, {q, mu, eps}));
      std::vector<std::pair<std::string, const SampleSeries*>> cols{{"x", &s}};
      for (const auto& [name, t] : tracks) cols.emplace_back(name, &t);
      write_csv_columns(output_file(out, "qtf.csv"), cols);
      return kOk;
    }

    if (*inf) {
      const SampleSeries s = load(input);
      const auto given = parse_mu(mu_text);
      const double m = given ? *given : inclusive_mu(max_slew(s), beta);
      const InfResult r =
          inf_filter(s, {beta, m, eps}, replace == "clamp" ? Replacement::kClampToFence : Replacement::kMidhinge);
      std::vector<double> flag(r.mask.size());
      for (std::size_t i = 0; i < flag.size(); ++i) flag[i] = r.mask.flags[i] ? 1.0 : 0.0;
      const SampleSeries flags = s.with_samples(std::move(flag));
      write_csv_columns(output_file(out, "inf.csv"), {{"x", &s},
                                                      {"lower", &r.fences.lower},
                                                      {"upper", &r.fences.upper},
                                                      {"midhinge", &r.fences.midhinge},
                                                      {"flag", &flags},
                                                      {"cleaned", &r.cleaned}});
      std::printf("mu=%s flagged=%zu warmup_samples=%zu\n", format_number(m).c_str(), r.mask.count(),
                  r.fences.warmup_samples);
      return kOk;
    }

    if (*cinf) {
      const SampleSeries s = load(input);
      CinfConfig cfg;
      cfg.signal_band = {sig_lo, sig_hi};
      cfg.final_band = {fin_lo.value_or(sig_lo), fin_hi.value_or(sig_hi)};
      cfg.fir_taps = taps;
      cfg.warmup_s = warmup;
      const auto given = parse_mu(mu_text);
      double m = 1.0;
      if (given) {
        m = *given;
      } else {
        const FirFilter bp = design_fir_bandpass(s.rate_hz(), cfg.signal_band, taps);
        m = inclusive_mu(max_slew(apply_filter(bp, s)), beta) / 3.0;
      }
      cfg.fence = {beta, m, 0.0};
      const CinfOutput r = cinf_run(s, cfg);
      std::vector<double> flag(r.mask.size());
      for (std::size_t i = 0; i < flag.size(); ++i) flag[i] = r.mask.flags[i] ? 1.0 : 0.0;
      const SampleSeries flags = s.with_samples(std::move(flag));
      write_csv_columns(output_file(out, "cinf.csv"), {{"x", &s},
                                                       {"excess_band", &r.excess_band},
                                                       {"excess_band_inf", &r.excess_band_inf},
                                                       {"flag", &flags},
                                                       {"cleaned", &r.cleaned},
                                                       {"passband_linear", &r.passband_linear},
                                                       {"passband_cinf", &r.passband_cinf}});
      std::printf("mu=%s flagged=%zu split_delay=%zu passband_delay=%zu\n", format_number(m).c_str(),
                  r.mask.count(), r.split_delay, r.passband_delay);
      return kOk;
    }

    if (*psd) {
      const SampleSeries s = load(input);
      const PsdEstimate p = psd_welch(s, segment, overlap);
      const fs::path path = output_file(out, "psd.csv");
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      std::ofstream f(path);
      f << "freq_hz,psd\n";
      for (std::size_t k = 0; k < p.freqs_hz.size(); ++k) {
        f << format_number(p.freqs_hz[k]) << ',' << format_number(p.power_density[k]) << '\n';
      }
      if (!f) throw DataError("cannot write " + path.string());
      return kOk;
    }

    if (*exp) {
      if (list || (exp_name.empty() && config.empty())) {
        for (const auto& e : experiments::registry()) std::printf("%-26s %s\n", e.name.c_str(), e.summary.c_str());
        return list ? kOk : kUsage;
      }
      experiments::Params overrides = experiments::Params::object();
      if (!config.empty()) {
        auto [name, params] = experiments::load_config(config);
        if (!exp_name.empty() && exp_name != name) {
          throw UsageError("config names experiment '" + name + "' but '" + exp_name + "' was requested");
        }
        exp_name = name;
        overrides = params;
      }
      for (const std::string& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + kv + "'");
        const std::string text = kv.substr(eq + 1);
        experiments::Params v = experiments::Params::parse(text, nullptr, false);
        overrides[kv.substr(0, eq)] = v.is_discarded() ? experiments::Params(text) : v;
      }
      if (experiments::find(exp_name) == nullptr) {
        std::fprintf(stderr, "unknown experiment '%s'; available:\n", exp_name.c_str());
        for (const auto& e : experiments::registry()) std::fprintf(stderr, "  %s\n", e.name.c_str());
        return kUsage;
      }
      const experiments::Report r = experiments::run(exp_name, overrides);
      const bool out_given = exp->count("--out") > 0;
      const std::string dir = out_given ? out : (fs::path(default_out_dir()) / exp_name).string();
      experiments::write_outputs(r, dir);
      for (const auto& c : r.checks) std::printf("%s %s\n", c.pass ? "PASS" : "FAIL", c.describe().c_str());
      std::printf("%s -> %s\n", r.passed() ? "passed" : "FAILED", dir.c_str());
      return r.passed() ? kOk : kThreshold;
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kData;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kData;
  }
  return kOk;
}
