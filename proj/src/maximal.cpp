#include "mwlab/maximal.hpp"

#include <algorithm>
#include <cmath>

#include "mwlab/errors.hpp"
#include "mwlab/numeric.hpp"

namespace mwlab {

GridFunction maximal(const GridFunction& g, const CubeFamily& family, const Weight* mu) {
  check_same_grid(g.grid(), family.grid(), "maximal");
  if (mu) check_same_grid(g.grid(), mu->grid(), "maximal");
  const Grid& grid = g.grid();
  std::vector<double> out(grid.cell_count(), 0.0);
  family.for_each([&](const DyadicCube& Q) {
    const double avg = average(g, Q.box, mu);
    for_each_cell(grid, Q.box, [&](std::size_t i) { out[i] = std::max(out[i], avg); });
  });
  return GridFunction(grid, std::move(out));
}

GridFunction maximal(const GridFunction& g, const MaximalConfig& cfg) {
  return maximal(g, cfg.family, cfg.mu ? &*cfg.mu : nullptr);
}

GridFunction multilinear_maximal(std::span<const GridFunction> fs, const CubeFamily& family) {
  if (fs.empty()) throw ComputeError("multilinear maximal needs at least one function");
  const Grid& grid = family.grid();
  for (const auto& f : fs) check_same_grid(f.grid(), grid, "multilinear_maximal");
  std::vector<double> out(grid.cell_count(), 0.0);
  family.for_each([&](const DyadicCube& Q) {
    double prod = 1.0;
    for (const auto& f : fs) prod *= average(f, Q.box);
    for_each_cell(grid, Q.box, [&](std::size_t i) { out[i] = std::max(out[i], prod); });
  });
  return GridFunction(grid, std::move(out));
}

SplitReport local_global_split_check(const GridFunction& g, const Weight& mu, const DyadicCube& Q,
                                     const CubeFamily& family) {
  const Grid& grid = g.grid();
  const GridFunction full = maximal(g, family, &mu);
  const Box near = tripled(grid, Q);
  std::vector<double> local(g.values().begin(), g.values().end());
  for (int y = 0; y < grid.extent()[1]; ++y) {
    for (int x = 0; x < grid.extent()[0]; ++x) {
      if (!near.contains(x, y)) local[grid.index(x, y)] = 0.0;
    }
  }
  const GridFunction near_max = maximal(GridFunction(grid, std::move(local)), family, &mu);
  SplitReport out;
  out.ess_inf = ess_bounds(full, Q).first;
  out.upper = 0.0;
  out.lower = kInf;
  for_each_cell(grid, Q.box, [&](std::size_t i) {
    const double denom = out.ess_inf + near_max[i];
    const double ratio = denom > 0.0 ? full[i] / denom : 1.0;
    out.upper = std::max(out.upper, ratio);
    out.lower = std::min(out.lower, ratio);
  });
  return out;
}

namespace {

double l2_norm(const GridFunction& f, const Weight* mu) {
  KahanSum s;
  for (std::size_t i = 0; i < f.size(); ++i) s.add(f[i] * f[i] * (mu ? (*mu)[i] : 1.0));
  return std::sqrt(s.value());
}

}  // namespace

double probe_operator_norm(const GridFunction& g, const CubeFamily& family, const Weight* mu) {
  const Grid& grid = g.grid();
  const auto ext = grid.extent();
  std::vector<GridFunction> probes;
  if (!g.is_zero()) probes.push_back(g);
  auto mask_probe = [&](auto&& pred) {
    std::vector<bool> mask(grid.cell_count());
    for (int y = 0; y < ext[1]; ++y) {
      for (int x = 0; x < ext[0]; ++x) mask[grid.index(x, y)] = pred(x, y);
    }
    probes.push_back(indicator(grid, mask));
  };
  mask_probe([](int x, int y) { return x == 0 && y == 0; });
  mask_probe([&](int x, int y) { return x == ext[0] / 2 && y == ext[1] / 2; });
  mask_probe([&](int x, int) { return x < ext[0] / 2; });
  double best = 1.0;
  for (const auto& h : probes) {
    best = std::max(best, l2_norm(maximal(h, family, mu), mu) / l2_norm(h, mu));
  }
  return best;
}

RdfResult rdf_iterate(const GridFunction& g, int k, const CubeFamily& family, const Weight* mu) {
  if (k < 0 || k > 12) throw ConfigError("rdf iteration count must lie in 0..12");
  if (g.is_zero()) throw ComputeError("rdf iteration needs a nonzero input");
  const double K = 2.0 * probe_operator_norm(g, family, mu);
  std::vector<double> sum(g.values().begin(), g.values().end());
  GridFunction term = g;
  double factor = 1.0;
  for (int j = 1; j <= k; ++j) {
    term = maximal(term, family, mu);
    factor /= 2.0 * K;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += factor * term[i];
  }
  const double top = *std::max_element(sum.begin(), sum.end());
  const double floor_value = std::ldexp(top, -40);
  for (auto& v : sum) v = std::max(v, floor_value);
  return RdfResult{Weight(g.grid(), std::move(sum)), K};
}

}  // namespace mwlab
