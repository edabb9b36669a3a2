#include "mwlab/applications.hpp"

#include <cmath>

#include "mwlab/errors.hpp"
#include "mwlab/lorentz.hpp"
#include "mwlab/maximal.hpp"
#include "mwlab/numeric.hpp"
#include "mwlab/parallel.hpp"

namespace mwlab {

namespace {

void require_line(const Grid& grid, const char* what) {
  if (grid.dimension() != 1) throw ConfigError(std::string(what) + " is defined on the unit interval (d = 1)");
}

// Kernel |y|^{-power} on the offset cell k; the cells next to the origin use
// the kernel average over [dy/2, 3dy/2].
double kernel(long k, double dy, int power) {
  const long a = k < 0 ? -k : k;
  if (a == 1) return power == 2 ? 4.0 / (3.0 * dy * dy) : std::log(3.0) / dy;
  const double y = static_cast<double>(a) * dy;
  return power == 2 ? 1.0 / (y * y) : 1.0 / y;
}

// sup_t t |{y : h(y) > t}|^{power} where h(y) = product(x + y) * kernel(y).
double offset_sup(std::span<const double> product, std::size_t cell, int power, std::vector<double>& vals,
                  std::vector<double>& masses) {
  const double dy = 1.0 / static_cast<double>(product.size());
  vals.clear();
  for (std::size_t j = 0; j < product.size(); ++j) {
    if (j == cell || product[j] == 0.0) continue;
    const long k = static_cast<long>(j) - static_cast<long>(cell);
    vals.push_back(product[j] * kernel(k, dy, power));
  }
  masses.assign(vals.size(), dy);
  if (vals.empty()) return 0.0;
  return weak_norm(vals, masses, 1.0 / power);
}

std::vector<double> pointwise_product(const GridFunction& f, const GridFunction& g) {
  check_same_grid(f.grid(), g.grid(), "operator_N");
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f[i] * g[i];
  return out;
}

GridFunction offset_operator(const Grid& grid, const std::vector<double>& product, int power) {
  std::vector<double> out(product.size(), 0.0);
  const bool any = std::any_of(product.begin(), product.end(), [](double v) { return v > 0.0; });
  if (any) {
    parallel_for(out.size(), [&](std::size_t i) {
      std::vector<double> vals, masses;
      out[i] = offset_sup(product, i, power, vals, masses);
    });
  }
  return GridFunction(grid, std::move(out));
}

}  // namespace

GridFunction operator_N(const GridFunction& f, const GridFunction& g) {
  require_line(f.grid(), "operator N");
  return offset_operator(f.grid(), pointwise_product(f, g), 2);
}

double operator_N_at(const GridFunction& f, const GridFunction& g, std::size_t cell) {
  require_line(f.grid(), "operator N");
  if (cell >= f.size()) throw ConfigError("operator_N_at: cell index outside the grid");
  std::vector<double> vals, masses;
  return offset_sup(pointwise_product(f, g), cell, 2, vals, masses);
}

GridFunction operator_T(const GridFunction& f, const GridFunction& g) {
  const GridFunction n = operator_N(f, g);
  return GridFunction(n.grid(), map_values(n.values(), [](double v) { return std::sqrt(v); }));
}

GridFunction operator_Nstar(const GridFunction& f) {
  require_line(f.grid(), "operator N*");
  return offset_operator(f.grid(), std::vector<double>(f.values().begin(), f.values().end()), 1);
}

HypothesisReport hypothesis_check(const std::vector<bool>& E, const std::vector<bool>& F, double lambda1,
                                  double lambda2, double alpha, const Grid& grid, const CubeFamily& family) {
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) throw ConfigError("hypothesis_check needs positive scalings");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("hypothesis_check needs 0 < alpha <= 1");
  const GridFunction e = indicator(grid, E);
  const GridFunction f = indicator(grid, F);
  const GridFunction t = operator_T(scale(e, lambda1), scale(f, lambda2));
  const std::vector<GridFunction> pair{e, f};
  const GridFunction m = multilinear_maximal(pair, family);
  const double scale_rhs = std::pow(lambda1 * lambda2, alpha);
  HypothesisReport out;
  bool first = true;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] == 0.0) continue;
    const double rhs = scale_rhs * std::pow(m[i], alpha);
    const double r = rhs > 0.0 ? t[i] / rhs : kInf;
    if (first || r > out.ratio) {
      out = {r, i, t[i], rhs};
      first = false;
    }
  }
  return out;
}

LayerDecomposition layer_decompose(const GridFunction& f) {
  std::vector<int> layer_of(f.size(), 0);
  std::vector<int> occupied;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] <= 0.0) continue;
    int e = 0;
    std::frexp(f[i], &e);  // f = m 2^e with m in [1/2, 1)
    layer_of[i] = e - 1;
    occupied.push_back(e - 1);
  }
  std::sort(occupied.begin(), occupied.end());
  occupied.erase(std::unique(occupied.begin(), occupied.end()), occupied.end());
  LayerDecomposition out;
  out.layers = occupied;
  out.masks.assign(occupied.size(), std::vector<bool>(f.size(), false));
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] <= 0.0) continue;
    const auto k = std::lower_bound(occupied.begin(), occupied.end(), layer_of[i]) - occupied.begin();
    out.masks[static_cast<std::size_t>(k)][i] = true;
  }
  return out;
}

GridFunction layer_floor(const LayerDecomposition& dec, const Grid& grid) {
  std::vector<double> out(grid.cell_count(), 0.0);
  for (std::size_t k = 0; k < dec.layers.size(); ++k) {
    const double h = std::ldexp(1.0, dec.layers[k]);
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (dec.masks[k][i]) out[i] += h;
    }
  }
  return GridFunction(grid, std::move(out));
}

namespace {

// sum_j 2^{alpha j} w(E_j)^{alpha/p}
double layer_series(const GridFunction& f, const Weight& w, double alpha, double p) {
  const LayerDecomposition dec = layer_decompose(f);
  KahanSum sum;
  for (std::size_t k = 0; k < dec.layers.size(); ++k) {
    KahanSum m;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (dec.masks[k][i]) m.add(w[i]);
    }
    sum.add(std::pow(2.0, alpha * dec.layers[k]) *
            std::pow(m.value() * w.grid().cell_volume(), alpha / p));
  }
  return sum.value();
}

Weight geometric_mean(const Weight& a, const Weight& b) {
  check_same_grid(a.grid(), b.grid(), "geometric mean");
  std::vector<double> out(a.values().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::sqrt(a[i] * b[i]);
  return Weight(a.grid(), std::move(out));
}

void require_pair(const WeightVector& ws) {
  if (ws.size() != 2) throw ConfigError("bilinear checks need exactly two weights");
}

}  // namespace

LayerBoundReport theorem41_bound_check(const GridFunction& f1, const GridFunction& f2, const WeightVector& ws,
                                      double q, const CubeFamily& family) {
  require_pair(ws);
  if (!(q > 1.0)) throw ConfigError("theorem41_bound_check needs q > 2 alpha = 1");
  constexpr double alpha = 0.5;
  const std::vector<double> pq{q, q};
  LayerBoundReport out;
  out.audit = apr_r1_constant(ws, pq, family);
  if (!std::isfinite(out.audit.value)) throw ComputeError("weights fail the restricted (q, q) audit");
  const GridFunction s = operator_N(f1, f2);
  out.lhs = std::pow(weak_norm(s, geometric_mean(ws[0], ws[1]), q / 2.0), alpha);
  out.layer_sum = layer_series(f1, ws[0], alpha, q) * layer_series(f2, ws[1], alpha, q);
  out.norm_product = std::pow(lorentz_norm(f1, ws[0], LorentzIndex::strong(q, alpha)), alpha) *
                     std::pow(lorentz_norm(f2, ws[1], LorentzIndex::strong(q, alpha)), alpha);
  out.lhs_ratio = out.layer_sum > 0.0 ? out.lhs / out.layer_sum : 0.0;
  out.layer_ratio = out.norm_product > 0.0 ? out.layer_sum / out.norm_product : 0.0;
  return out;
}

CorollaryReport corollary_endpoint_check(const GridFunction& f1, const GridFunction& f2, const WeightVector& vs,
                                         double q, const CubeFamily& family) {
  require_pair(vs);
  if (!(q > 1.0)) throw ConfigError("corollary_endpoint_check needs q > 1");
  const std::vector<double> ones{1.0, 1.0};
  CorollaryReport out;
  out.audit = apvec_constant(vs, ones, family);
  if (!std::isfinite(out.audit.value)) throw ComputeError("weights fail the (1, 1) audit");
  out.lhs = weak_norm(operator_N(f1, f2), geometric_mean(vs[0], vs[1]), 0.5);
  const LorentzIndex idx = LorentzIndex::strong(1.0, 1.0 / (2.0 * q));
  out.rhs = lorentz_norm(f1, vs[0], idx) * lorentz_norm(f2, vs[1], idx);
  out.constant = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
  return out;
}

SeriesReport series_sum_check(std::span<const GridFunction> fs, const WeightVector& ws, std::span<const double> p,
                              std::span<const double> c, bool shifted) {
  if (fs.empty() || fs.size() != ws.size() || p.size() != ws.size()) {
    throw ConfigError("series_sum_check: functions, weights and exponents differ in count");
  }
  double inv_p = 0.0;
  for (double pi : p) inv_p += 1.0 / pi;
  const double p_total = 1.0 / inv_p;
  if (!(p_total > 1.0)) throw ConfigError("series_sum_check needs p > 1");
  const Grid& grid = ws.grid();
  if (c.size() > static_cast<std::size_t>(grid.level()) + 1) {
    throw ConfigError("series_sum_check: more components than cube levels");
  }
  SeriesReport out;
  if (c.empty()) return out;
  const Weight w = composite_weight(ws, p);
  double den = 1.0;
  for (std::size_t i = 0; i < fs.size(); ++i) den *= lorentz_norm(fs[i], ws[i], LorentzIndex::strong(p[i], 1.0));
  if (!(den > 0.0)) return out;
  std::vector<double> total(grid.cell_count(), 0.0);
  KahanSum bound;
  for (std::size_t j = 0; j < c.size(); ++j) {
    const GridFunction mj = multilinear_maximal(fs, CubeFamily(grid, shifted, static_cast<int>(j)));
    const GridFunction tj = scale(mj, c[j]);
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += tj[i];
    out.components.push_back(weak_norm(tj, w, p_total) / den);
    bound.add(out.components.back());
  }
  out.aggregate = weak_norm(GridFunction(grid, std::move(total)), w, p_total) / den;
  out.bound = conjugate(p_total) * bound.value();
  out.pass = out.aggregate <= out.bound * (1.0 + 1e-9);
  return out;
}

GridFunction spike_family(const Grid& grid, int spikes) {
  require_line(grid, "spike family");
  const int n = grid.cells_per_axis();
  if (spikes < 1 || spikes > n) throw ConfigError("spike count must lie in 1..cells");
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  const double height = static_cast<double>(n) / spikes;
  for (int k = 1; k <= spikes; ++k) {
    const auto cell = static_cast<std::size_t>(std::floor((k - 0.5) / spikes * n));
    out[cell] = height;
  }
  return GridFunction(grid, std::move(out));
}

std::vector<GrowthRow> nstar_growth(const Grid& grid, std::span<const int> spike_counts) {
  std::vector<GrowthRow> rows;
  const Weight lebesgue = Weight::ones(grid);
  for (int spikes : spike_counts) {
    const GridFunction f = spike_family(grid, spikes);
    const double mass = integrate(f, domain_box(grid));
    rows.push_back({spikes, weak_norm(operator_Nstar(f), lebesgue, 1.0) / mass});
  }
  return rows;
}

}  // namespace mwlab
