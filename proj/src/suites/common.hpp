#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "mwlab/errors.hpp"
#include "mwlab/parallel.hpp"
#include "mwlab/suites.hpp"

namespace mwlab::suites {

SuiteResult identity(const ExperimentConfig& cfg);
SuiteResult exponents(const ExperimentConfig& cfg);
SuiteResult lemma33(const ExperimentConfig& cfg);
SuiteResult restricted_r1(const ExperimentConfig& cfg);
SuiteResult mrestricted(const ExperimentConfig& cfg);
SuiteResult composite(const ExperimentConfig& cfg);
SuiteResult sawyer(const ExperimentConfig& cfg);
SuiteResult offdiag(const ExperimentConfig& cfg);
SuiteResult factorization(const ExperimentConfig& cfg);
SuiteResult endpoint(const ExperimentConfig& cfg);
SuiteResult applications(const ExperimentConfig& cfg);

inline std::string case_name(const std::string& prefix, int index, int width = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*d", width, index);
  return prefix + buf;
}

/// Runs fn(i) for i in [0, n) in parallel and concatenates the rows in index
/// order. A ComputeError fails only its own case.
template <class Fn>
std::vector<ReportRecord> run_cases(const std::string& suite, int n, const std::string& prefix, Fn&& fn) {
  std::vector<std::vector<ReportRecord>> per(static_cast<std::size_t>(n));
  parallel_for(per.size(), [&](std::size_t i) {
    try {
      per[i] = fn(static_cast<int>(i));
    } catch (const ComputeError& e) {
      per[i] = {make_record(suite, case_name(prefix, static_cast<int>(i)), 0, 0.0, 0.0,
                            std::string("error: ") + e.what(), false)};
    }
  });
  std::vector<ReportRecord> rows;
  for (auto& v : per) rows.insert(rows.end(), v.begin(), v.end());
  return rows;
}

inline void add_check(SuiteResult& r, std::string name, double value, bool pass, std::string detail = {}) {
  r.checks.push_back({std::move(name), value, pass, std::move(detail)});
}

/// Largest ratio between the maxima of consecutive levels; two_sided also
/// counts decreases.
double level_growth(const std::vector<double>& level_max, bool two_sided);

}  // namespace mwlab::suites

#include "mwlab/grid.hpp"
#include "mwlab/numeric.hpp"

namespace mwlab::suites {

/// Parameters of a test weight drawn once and rebuilt on any grid, so that
/// refinement sweeps compare the same continuum weight.
struct WeightRecipe {
  enum class Kind { power, smoothed, blocks } kind = Kind::power;
  double a = 0.0;
  double lo = 0.0, hi = 1.0, width = 0.05, base = 0.1;
  int block_level = 4;
  std::vector<double> blocks;

  Weight build(const Grid& grid) const;
  std::string describe() const;
};

WeightRecipe draw_recipe(Rng& rng, int dimension);

}  // namespace mwlab::suites
