#pragma once

// Straight-loop reference implementations and hand-rolled generators for the
// unit tests. Nothing here shares code with the library beyond the data types.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <string>
#include <set>
#include <vector>

#include <json.hpp>

#include "mwlab/grid.hpp"
#include "mwlab/numeric.hpp"

namespace oracle {

using mwlab::Box;
using mwlab::Grid;
using mwlab::GridFunction;
using mwlab::Rng;
using mwlab::Weight;

/// Intervals [a, b) of cells that are clipped lattice cubes of the 1-d family,
/// found by testing every pair (a, b) for membership.
inline std::vector<Box> family_intervals(int L, bool shifted) {
  const int n = 1 << L;
  std::vector<Box> out;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b <= n; ++b) {
      bool member = false;
      for (int level = 0; level <= L && !member; ++level) {
        const int side = 1 << (L - level);
        std::vector<int> shifts{0};
        if (shifted) shifts.insert(shifts.end(), {side / 3, 2 * side / 3});
        for (int s : shifts) {
          for (int k = -2; k * side + s < n && !member; ++k) {
            const int lo = std::max(k * side + s, 0), hi = std::min((k + 1) * side + s, n);
            member = lo == a && hi == b;
          }
        }
      }
      if (member) out.push_back(Box{{a, 0}, {b, 1}});
    }
  }
  return out;
}

/// sup over family intervals containing the cell of the mu-average of g.
inline std::vector<double> maximal_1d(const std::vector<double>& g, const std::vector<double>& mu, int L,
                                      bool shifted) {
  const auto cubes = family_intervals(L, shifted);
  std::vector<double> out(g.size(), 0.0);
  for (const auto& Q : cubes) {
    double num = 0.0, den = 0.0;
    for (int c = Q.lo[0]; c < Q.hi[0]; ++c) {
      num += g[static_cast<std::size_t>(c)] * mu[static_cast<std::size_t>(c)];
      den += mu[static_cast<std::size_t>(c)];
    }
    for (int c = Q.lo[0]; c < Q.hi[0]; ++c) out[static_cast<std::size_t>(c)] = std::max(out[static_cast<std::size_t>(c)], num / den);
  }
  return out;
}

/// sup_t t m({v > t})^{1/p} by testing t = v_j^- for every sample.
inline double weak_norm(const std::vector<double>& v, const std::vector<double>& m, double p) {
  double best = 0.0;
  for (double t : v) {
    if (t <= 0.0) continue;
    double mass = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] >= t) mass += m[i];
    }
    best = std::max(best, t * std::pow(mass, 1.0 / p));
  }
  return best;
}

/// (q int_0^inf t^{q-1} m({v > t})^{q/p} dt)^{1/q} by midpoint quadrature.
inline double lorentz_quadrature(const std::vector<double>& v, const std::vector<double>& m, double p, double q,
                                 int nodes) {
  const double top = *std::max_element(v.begin(), v.end());
  const double h = top / nodes;
  double sum = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const double t = (k + 0.5) * h;
    double mass = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] > t) mass += m[i];
    }
    sum += q * std::pow(t, q - 1.0) * std::pow(mass, q / p) * h;
  }
  return std::pow(sum, 1.0 / q);
}

// Generators.

inline GridFunction staircase(const Grid& grid, Rng& rng, int steps) {
  std::vector<double> heights(static_cast<std::size_t>(steps));
  for (auto& h : heights) h = rng.bernoulli(0.2) ? 0.0 : rng.uniform(0.1, 5.0);
  std::vector<double> v(grid.cell_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = heights[i * static_cast<std::size_t>(steps) / v.size()];
  return GridFunction(grid, v);
}

inline GridFunction random_function(const Grid& grid, Rng& rng, double zero_prob = 0.3) {
  std::vector<double> v(grid.cell_count());
  for (auto& x : v) x = rng.bernoulli(zero_prob) ? 0.0 : rng.uniform(0.0, 4.0);
  return GridFunction(grid, v);
}

inline Weight random_weight(const Grid& grid, Rng& rng, double lo = 0.1, double hi = 10.0) {
  std::vector<double> v(grid.cell_count());
  for (auto& x : v) x = std::exp(rng.uniform(std::log(lo), std::log(hi)));
  return Weight(grid, v);
}

inline std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

/// Frozen regression value from configs/unit_goldens.json.
inline double golden(const std::string& key) {
  const char* env = std::getenv("MWLAB_CONFIG_DIR");
  std::ifstream in(std::string(env ? env : MWLAB_CONFIG_DIR) + "/unit_goldens.json");
  return nlohmann::json::parse(in).at(key).get<double>();
}

}  // namespace oracle
