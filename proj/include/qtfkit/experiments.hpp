#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qtfkit/series.hpp"

// Named, fully seeded scenarios with pass/fail metrics. The CLI
// `experiment` subcommand and the acceptance suite both run these.

namespace qtfkit::experiments {

using Params = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// One thresholded metric.
struct Check {
  std::string name;
  double value = 0.0;
  double lo = 0.0;   // inclusive bounds; +/-inf when one-sided
  double hi = 0.0;
  bool pass = false;
  bool strict = false;  // hi is exclusive

  static Check at_least(std::string name, double value, double lo);
  static Check at_most(std::string name, double value, double hi);
  static Check below(std::string name, double value, double hi);  // strict
  static Check within(std::string name, double value, double target, double tol);
  std::string describe() const;
};

struct Trace {
  std::string name;
  std::vector<std::pair<std::string, SampleSeries>> columns;
};

struct Report {
  std::string experiment;
  Params params;
  std::vector<Check> checks;
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  std::vector<Trace> traces;

  bool passed() const;
  nlohmann::ordered_json to_json() const;
};

struct Experiment {
  std::string name;
  std::string summary;
  std::vector<int> criteria;  // acceptance criteria this scenario covers
  Params defaults;
  std::function<Report(const Params&)> run;
};

const std::vector<Experiment>& registry();
const Experiment* find(const std::string& name);

/// Runs `name` with `overrides` merged (JSON merge patch) over its defaults.
/// Throws std::out_of_range for unknown names.
Report run(const std::string& name, const Params& overrides = Params::object());

/// Reads an experiment config file: {"schema_version": 1, "name": ...,
/// "params": {...}}. Returns (name, params).
std::pair<std::string, Params> load_config(const std::string& path);

/// Writes report.json and one CSV per trace into `dir`.
void write_outputs(const Report& report, const std::string& dir);

}  // namespace qtfkit::experiments
