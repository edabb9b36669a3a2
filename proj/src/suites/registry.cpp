#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>

#include "common.hpp"
#include "mwlab/numeric.hpp"

namespace mwlab {

namespace {

using SuiteFn = SuiteResult (*)(const ExperimentConfig&);

const std::map<std::string, SuiteFn>& registry() {
  static const std::map<std::string, SuiteFn> table{
      {"identity", suites::identity},   {"exponents", suites::exponents},     {"lemma33", suites::lemma33},
      {"restricted_r1", suites::restricted_r1},   {"mrestricted", suites::mrestricted}, {"composite", suites::composite},
      {"sawyer", suites::sawyer},       {"offdiag", suites::offdiag},         {"factorization", suites::factorization},
      {"endpoint", suites::endpoint},   {"applications", suites::applications},
  };
  return table;
}

}  // namespace

namespace suites {

double level_growth(const std::vector<double>& level_max, bool two_sided) {
  double worst = 1.0;
  for (std::size_t i = 1; i < level_max.size(); ++i) {
    const double a = level_max[i - 1];
    const double b = level_max[i];
    if (!(a > 0.0) || !(b > 0.0)) continue;
    worst = std::max(worst, b / a);
    if (two_sided) worst = std::max(worst, a / b);
  }
  return worst;
}

}  // namespace suites

std::vector<std::string> suite_names() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : registry()) out.push_back(name);
  return out;
}

bool has_suite(const std::string& name) { return registry().count(name) != 0; }

SuiteResult run_suite(const ExperimentConfig& cfg) {
  const auto it = registry().find(cfg.suite);
  if (it == registry().end()) throw ConfigError("unknown suite '" + cfg.suite + "'");
  const auto start = std::chrono::steady_clock::now();
  SuiteResult result = it->second(cfg);
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.suite = cfg.suite;
  for (auto& row : result.rows) row.suite = cfg.suite;
  sort_records(result.rows);

  for (const auto& [key, golden] : cfg.goldens) {
    const auto m = result.measured.find(key);
    if (m == result.measured.end()) {
      suites::add_check(result, "golden:" + key, golden, false, "value not produced by this run");
      continue;
    }
    const double diff = relative_difference(m->second, golden);
    suites::add_check(result, "golden:" + key, m->second, diff <= cfg.golden_tolerance,
                      "golden " + std::to_string(golden) + ", relative difference " + std::to_string(diff));
  }

  result.summary = summarize(cfg.suite, result.rows);
  result.summary.stability_factor = result.stability_factor;
  result.pass = result.summary.pass;
  for (const auto& c : result.checks) result.pass = result.pass && c.pass;
  result.summary.pass = result.pass;
  return result;
}

std::string suite_config_path(const std::string& config_dir, const std::string& suite) {
  return (std::filesystem::path(config_dir) / (suite + ".json")).string();
}

}  // namespace mwlab
