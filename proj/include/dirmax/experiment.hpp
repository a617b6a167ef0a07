#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "dirmax/fit.hpp"
#include "dirmax/io.hpp"

namespace dirmax {

// kind, dim, deltas, seeds and grid are first-class keys; everything else is a
// named numeric parameter or a tolerance override. Text form is flat
// "key = value" lines: "param.<name>" and "tol.<name>" for the maps, comma
// separated lists, '#' comments.
struct ExperimentConfig {
  std::string kind;
  int dim = 3;
  std::vector<double> deltas;
  std::vector<std::uint64_t> seeds{1};
  int grid = 32;
  std::map<std::string, double> params;
  std::map<std::string, double> tolerances;
  std::string out_dir = ".";
  std::string format = "csv";

  // Throws ConfigError.
  void validate() const;
  static ExperimentConfig parse(const std::string& text);
  std::string emit() const;
  bool operator==(const ExperimentConfig&) const = default;

  double param(const std::string& name) const;
  double tolerance(const std::string& name) const;
};

const std::vector<std::string>& experiment_kinds();
// Reference parameters for a kind (the ones the acceptance suite uses).
ExperimentConfig default_experiment(const std::string& kind, int dim = 3);
// Built-in parameter and tolerance values; overrides in the config win.
std::map<std::string, double> default_params(const std::string& kind, int dim);
std::map<std::string, double> default_tolerances(const std::string& kind, int dim);

struct ExperimentResult {
  std::string kind;
  std::vector<FitReport> fits;
  std::vector<std::string> failures;  // failed checks, human readable
  CsvTable table;
  Json summary;  // config, effective tolerances, fits, checks
  bool pass = true;
  std::vector<std::string> artifacts;
};

// Runs the experiment and writes <out_dir>/<kind>.{csv|json} and
// <kind>.summary.json. On error the partial table and <kind>.failed are
// written and the error is rethrown with the experiment name prepended.
ExperimentResult run_experiment(const ExperimentConfig& cfg);
// Same, without touching the file system.
ExperimentResult compute_experiment(const ExperimentConfig& cfg);

// Fast internal consistency checks; prints one line per check.
bool run_selftest(std::ostream& out);

}  // namespace dirmax
