#include "mwlab/generators.hpp"

#include <algorithm>
#include <cmath>

#include "mwlab/errors.hpp"
#include "mwlab/maximal.hpp"

namespace mwlab {

double WeightSpec::param(const std::string& name, double fallback) const {
  const auto it = params.find(name);
  return it == params.end() ? fallback : it->second;
}

WeightSpec WeightSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw ConfigError("weight spec needs a string field \"kind\"");
  }
  WeightSpec s;
  s.kind = j.at("kind").get<std::string>();
  if (j.contains("params")) {
    if (!j.at("params").is_object()) throw ConfigError("weight spec params must be an object");
    for (const auto& [k, v] : j.at("params").items()) {
      if (!v.is_number()) throw ConfigError("weight spec param " + k + " must be a number");
      s.params[k] = v.get<double>();
    }
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("weight spec seed must be a nonnegative integer");
    s.seed = j.at("seed").get<std::uint64_t>();
  }
  return s;
}

nlohmann::json WeightSpec::to_json() const {
  nlohmann::json p = nlohmann::json::object();
  for (const auto& [k, v] : params) p[k] = v;
  return {{"kind", kind}, {"params", p}, {"seed", seed}};
}

double power_cell_average(double x0, double x1, double a) {
  if (a == 0.0) return 1.0;
  const double b = a + 1.0;
  const double h = x1 - x0;
  if (x0 == 0.0) return std::pow(x1, a) / b;
  // x1^b - x0^b = x0^b expm1(b log1p(h / x0)), free of cancellation.
  return std::pow(x0, b) * std::expm1(b * std::log1p(h / x0)) / (b * h);
}

namespace {

double required(const WeightSpec& s, const std::string& name) {
  const auto it = s.params.find(name);
  if (it == s.params.end()) throw ConfigError("weight kind " + s.kind + " needs parameter " + name);
  return it->second;
}

Weight power_weight(const Grid& grid, double a) {
  const int d = grid.dimension();
  if (!(a > -1.0 / d)) {
    throw ConfigError("power weight exponent must satisfy a > -1/d for integrability, got " + std::to_string(a));
  }
  const int n = grid.cells_per_axis();
  const double h = grid.cell_size();
  std::vector<double> axis(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) axis[static_cast<std::size_t>(k)] = power_cell_average(k * h, (k + 1) * h, a);
  std::vector<double> out(grid.cell_count());
  const auto ext = grid.extent();
  for (int y = 0; y < ext[1]; ++y) {
    for (int x = 0; x < ext[0]; ++x) {
      out[grid.index(x, y)] = axis[static_cast<std::size_t>(x)] * (d == 2 ? axis[static_cast<std::size_t>(y)] : 1.0);
    }
  }
  return Weight(grid, std::move(out));
}

Weight rdf_weight(const Grid& grid, const WeightSpec& s) {
  const double density = s.param("density", 0.02);
  const int k = static_cast<int>(s.param("k", 8));
  if (!(density > 0.0 && density <= 1.0)) throw ConfigError("rdf density must lie in (0, 1]");
  Rng rng(s.seed);
  std::vector<bool> mask(grid.cell_count());
  bool any = false;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    mask[i] = rng.bernoulli(density);
    any = any || mask[i];
  }
  if (!any) mask[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(mask.size()) - 1))] = true;
  return rdf_iterate(indicator(grid, mask), k, CubeFamily(grid, false)).weight;
}

Weight smoothed_weight(const Grid& grid, const WeightSpec& s) {
  const double lo = required(s, "lo");
  const double hi = required(s, "hi");
  const double width = s.param("width", 0.05);
  const double base = s.param("base", 0.1);
  if (!(hi > lo) || !(width > 0.0) || !(base > 0.0)) {
    throw ConfigError("smoothed weight needs lo < hi, width > 0 and base > 0");
  }
  // (1/2h) |[x - h, x + h] n [lo, hi)|
  auto mollified = [&](double x) {
    const double overlap = std::min(x + width, hi) - std::max(x - width, lo);
    return std::max(overlap, 0.0) / (2.0 * width);
  };
  const int n = grid.cells_per_axis();
  const double h = grid.cell_size();
  constexpr int kSub = 64;
  std::vector<double> axis(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) {
    KahanSum sum;
    for (int j = 0; j < kSub; ++j) sum.add(mollified((c + (j + 0.5) / kSub) * h));
    axis[static_cast<std::size_t>(c)] = base + sum.value() / kSub;
  }
  std::vector<double> out(grid.cell_count());
  const auto ext = grid.extent();
  for (int y = 0; y < ext[1]; ++y) {
    for (int x = 0; x < ext[0]; ++x) out[grid.index(x, y)] = axis[static_cast<std::size_t>(x)];
  }
  return Weight(grid, std::move(out));
}

}  // namespace

Weight generate_weight(const WeightSpec& spec, const Grid& grid) {
  if (spec.kind == "constant") {
    const double c = spec.param("c", 1.0);
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("constant weight needs c > 0");
    return Weight(GridFunction::constant(grid, c));
  }
  if (spec.kind == "power") return power_weight(grid, required(spec, "a"));
  if (spec.kind == "rdf") return rdf_weight(grid, spec);
  if (spec.kind == "smoothed") return smoothed_weight(grid, spec);
  if (spec.kind == "product") throw ConfigError("weight kind product yields a vector; use generate_vector");
  throw ConfigError("unknown weight kind: " + spec.kind);
}

WeightVector generate_vector(const WeightSpec& spec, const Grid& grid) {
  if (spec.kind != "product") return WeightVector({generate_weight(spec, grid)});
  std::vector<Weight> ws;
  for (int i = 0;; ++i) {
    const auto it = spec.params.find("a" + std::to_string(i));
    if (it == spec.params.end()) break;
    ws.push_back(power_weight(grid, it->second));
  }
  if (ws.empty()) throw ConfigError("weight kind product needs parameters a0, a1, ...");
  return WeightVector(std::move(ws));
}

WeightVector generate_vector(const std::vector<WeightSpec>& specs, const Grid& grid) {
  std::vector<Weight> ws;
  for (const auto& s : specs) {
    const WeightVector part = generate_vector(s, grid);
    ws.insert(ws.end(), part.weights().begin(), part.weights().end());
  }
  return WeightVector(std::move(ws));
}

GridFunction random_indicator(const Grid& grid, Rng& rng, int coarse_level, double density) {
  const int level = std::clamp(coarse_level, 0, grid.level());
  const int side = 1 << (grid.level() - level);
  const int blocks = 1 << level;
  const int by = grid.dimension() == 2 ? blocks : 1;
  std::vector<char> keep(static_cast<std::size_t>(blocks * by));
  bool any = false;
  for (auto& k : keep) {
    k = rng.bernoulli(density) ? 1 : 0;
    any = any || k;
  }
  if (!any) keep[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(keep.size()) - 1))] = 1;
  std::vector<bool> mask(grid.cell_count());
  const auto ext = grid.extent();
  for (int y = 0; y < ext[1]; ++y) {
    for (int x = 0; x < ext[0]; ++x) {
      const int bx = x / side;
      const int byy = grid.dimension() == 2 ? y / side : 0;
      mask[grid.index(x, y)] = keep[static_cast<std::size_t>(bx + byy * blocks)] != 0;
    }
  }
  return indicator(grid, mask);
}

GridFunction interval_indicator(const Grid& grid, double lo, double hi) {
  const int n = grid.cells_per_axis();
  const int a = std::clamp(static_cast<int>(std::lround(lo * n)), 0, n);
  const int b = std::clamp(static_cast<int>(std::lround(hi * n)), 0, n);
  std::vector<bool> mask(grid.cell_count());
  const auto ext = grid.extent();
  for (int y = 0; y < ext[1]; ++y) {
    for (int x = a; x < b; ++x) mask[grid.index(x, y)] = true;
  }
  return indicator(grid, mask);
}

GridFunction random_indicator_sum(const Grid& grid, Rng& rng, int terms, int coarse_level) {
  std::vector<double> out(grid.cell_count(), 0.0);
  for (int t = 0; t < terms; ++t) {
    const double c = rng.uniform(0.5, 4.0);
    const GridFunction e = random_indicator(grid, rng, coarse_level, 0.25);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * e[i];
  }
  return GridFunction(grid, std::move(out));
}

}  // namespace mwlab
