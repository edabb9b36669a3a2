#pragma once

// Verification suites. A suite turns an ExperimentConfig into report rows,
// named checks and measured values; measured values are compared against
// the config's goldens.

#include <map>
#include <string>
#include <vector>

#include "mwlab/config.hpp"
#include "mwlab/report.hpp"

namespace mwlab {

struct Check {
  std::string name;
  double value = 0.0;
  bool pass = true;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<ReportRecord> rows;
  std::vector<Check> checks;
  /// Values eligible for freezing as goldens.
  std::map<std::string, double> measured;
  /// Recorded diagnostics with no pass/fail meaning.
  std::map<std::string, double> info;
  /// Extra outputs written beside the CSV (file name -> contents).
  std::map<std::string, std::string> attachments;
  /// Refinement factor computed by the suite; 1 for single-level suites.
  double stability_factor = 1.0;
  Summary summary;
  bool pass = true;
  double seconds = 0.0;
};

std::vector<std::string> suite_names();
bool has_suite(const std::string& name);

/// Runs the suite named in cfg. Throws ConfigError for an unknown suite or
/// invalid suite parameters; compute failures mark the affected case failed.
SuiteResult run_suite(const ExperimentConfig& cfg);

/// Location of configs/<suite>.json inside a config directory.
std::string suite_config_path(const std::string& config_dir, const std::string& suite);

}  // namespace mwlab
