#pragma once

// Deterministic test weights and test sets.
//
// Weight kinds:
//   constant   {c}
//   power      {a}            cell averages of x^a (d = 2: x^a y^a), a > -1/d
//   product    {a0, a1, ...}  a vector of power weights, one per exponent
//   rdf        {density, k}   Rubio de Francia iteration of a random sparse
//                             cell indicator (seeded)
//   smoothed   {lo, hi, width, base}
//                             base + box-mollified indicator of [lo, hi) in x

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwlab/grid.hpp"
#include "mwlab/numeric.hpp"
#include "mwlab/weights.hpp"

namespace mwlab {

struct WeightSpec {
  std::string kind = "constant";
  std::map<std::string, double> params;
  std::uint64_t seed = 0;

  double param(const std::string& name, double fallback) const;
  static WeightSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Throws ConfigError for unknown kinds, missing parameters or a
/// non-integrable power.
Weight generate_weight(const WeightSpec& spec, const Grid& grid);
/// "product" yields one weight per exponent; other kinds yield one weight.
WeightVector generate_vector(const WeightSpec& spec, const Grid& grid);
WeightVector generate_vector(const std::vector<WeightSpec>& specs, const Grid& grid);

/// Average of x^a over [x0, x1), 0 <= x0 < x1, a > -1.
double power_cell_average(double x0, double x1, double a);

/// Union of dyadic cubes of side 2^{-coarse_level} (clamped to the grid
/// level), each kept with probability `density`; never empty.
GridFunction random_indicator(const Grid& grid, Rng& rng, int coarse_level = 6, double density = 0.3);
/// chi_{[lo, hi)} in the first coordinate; lo, hi are rounded to cells.
GridFunction interval_indicator(const Grid& grid, double lo, double hi);
/// sum_j c_j chi_{E_j} with `terms` random coarse sets and c_j in [0.5, 4).
GridFunction random_indicator_sum(const Grid& grid, Rng& rng, int terms, int coarse_level = 6);

}  // namespace mwlab
