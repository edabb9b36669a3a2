#include <cmath>
#include <sstream>

#include "common.hpp"
#include "mwlab/applications.hpp"
#include "mwlab/generators.hpp"
#include "mwlab/grid_io.hpp"
#include "mwlab/maximal.hpp"

namespace mwlab::suites {

namespace {

Weight power_weight(const Grid& grid, double a) {
  WeightSpec s;
  s.kind = "power";
  s.params["a"] = a;
  return generate_weight(s, grid);
}

double max_relative_gap(const GridFunction& a, const GridFunction& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, relative_difference(a[i], b[i]));
  return worst;
}

std::vector<bool> interval_mask(const Grid& grid, double lo, double hi) {
  const GridFunction f = interval_indicator(grid, lo, hi);
  std::vector<bool> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] > 0.0;
  return out;
}

void operator_rows(const ExperimentConfig& cfg, const Grid& grid, SuiteResult& out) {
  const int L = grid.level();
  // Homogeneity: exact for powers of two, rounding-level otherwise.
  auto homog = run_cases("applications", cfg.integer("homogeneity_cases", 10), "n-homog-", [&](int i) {
    Rng rng(case_seed(cfg.seed, 100 + static_cast<std::uint64_t>(i)));
    const GridFunction f = random_indicator_sum(grid, rng, 2, 6);
    const GridFunction g = random_indicator_sum(grid, rng, 2, 6);
    const GridFunction base = operator_N(f, g);
    const double l1 = std::ldexp(1.0, static_cast<int>(rng.uniform_int(-4, 4)));
    const double l2 = std::ldexp(1.0, static_cast<int>(rng.uniform_int(-4, 4)));
    const GridFunction exact = operator_N(scale(f, l1), scale(g, l2));
    bool exact_ok = true;
    for (std::size_t c = 0; c < base.size(); ++c) exact_ok = exact_ok && exact[c] == l1 * l2 * base[c];
    const double m1 = rng.uniform(0.1, 10.0), m2 = rng.uniform(0.1, 10.0);
    const GridFunction general = operator_N(scale(f, m1), scale(g, m2));
    const double gap = max_relative_gap(general, scale(base, m1 * m2));
    return std::vector<ReportRecord>{make_record("", case_name("n-homog-", i), L, gap, 1e-12,
                                                 "powers of two exact=" + std::string(exact_ok ? "1" : "0"),
                                                 exact_ok && gap <= 1e-12)};
  });
  out.rows.insert(out.rows.end(), homog.begin(), homog.end());

  // Translation by whole cells with supports kept inside the domain.
  auto translate = run_cases("applications", cfg.integer("translation_cases", 5), "n-translate-", [&](int i) {
    Rng rng(case_seed(cfg.seed, 200 + static_cast<std::uint64_t>(i)));
    const std::size_t n = grid.cell_count();
    const std::size_t shift = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(n / 4)));
    std::vector<double> f(n, 0.0), g(n, 0.0), fs(n, 0.0), gs(n, 0.0);
    for (std::size_t c = n / 4; c < n / 2; ++c) {
      f[c] = rng.bernoulli(0.5) ? rng.uniform(0.5, 2.0) : 0.0;
      g[c] = rng.bernoulli(0.5) ? rng.uniform(0.5, 2.0) : 0.0;
      fs[c + shift] = f[c];
      gs[c + shift] = g[c];
    }
    const GridFunction a = operator_N(GridFunction(grid, f), GridFunction(grid, g));
    const GridFunction b = operator_N(GridFunction(grid, fs), GridFunction(grid, gs));
    double gap = 0.0;
    for (std::size_t c = 0; c + shift < n; ++c) gap = std::max(gap, std::abs(a[c] - b[c + shift]));
    return std::vector<ReportRecord>{make_record("", case_name("n-translate-", i), L, gap, 0.0,
                                                 "shift=" + std::to_string(shift), gap == 0.0)};
  });
  out.rows.insert(out.rows.end(), translate.begin(), translate.end());

  // N = T^2 and bi-sublinearity of T on disjointly supported inputs.
  auto sublinear = run_cases("applications", cfg.integer("sublinear_cases", 100), "t-sublinear-", [&](int i) {
    Rng rng(case_seed(cfg.seed, 300 + static_cast<std::uint64_t>(i)));
    const Grid small = Grid::make(1, std::min(L, cfg.integer("sublinear_level", 8)));
    const GridFunction f = random_indicator_sum(small, rng, 3, 6);
    const GridFunction g = random_indicator_sum(small, rng, 2, 6);
    std::vector<double> f1(f.size(), 0.0), f2(f.size(), 0.0);
    for (std::size_t c = 0; c < f.size(); ++c) (rng.bernoulli(0.5) ? f1 : f2)[c] = f[c];
    const GridFunction a = GridFunction(small, f1), b = GridFunction(small, f2);
    const GridFunction t = operator_T(f, g), ta = operator_T(a, g), tb = operator_T(b, g);
    double worst = 0.0;
    for (std::size_t c = 0; c < t.size(); ++c) {
      const double rhs = ta[c] + tb[c];
      if (t[c] > 0.0) worst = std::max(worst, rhs > 0.0 ? t[c] / rhs : kInf);
    }
    const GridFunction n = operator_N(f, g);
    double square_gap = 0.0;
    for (std::size_t c = 0; c < t.size(); ++c) square_gap = std::max(square_gap, relative_difference(n[c], t[c] * t[c]));
    std::ostringstream wit;
    wit << "N=T^2 gap=" << format_double(square_gap);
    return std::vector<ReportRecord>{make_record("", case_name("t-sublinear-", i), small.level(), worst, 1.0,
                                                 wit.str(), worst <= 1.0 + 1e-12 && square_gap <= 1e-15)};
  });
  out.rows.insert(out.rows.end(), sublinear.begin(), sublinear.end());

  // f = g = chi_[0,1/4) at x = 1/2: continuum value 1/4.
  const Grid fine = Grid::make(1, cfg.integer("point_level", 12));
  const GridFunction quarter = interval_indicator(fine, 0.0, 0.25);
  const double at_half = operator_N_at(quarter, quarter, fine.cell_count() / 2);
  out.rows.push_back(make_record("", "n-point", fine.level(), at_half, 0.25, "f = g = chi_[0,1/4), x = 1/2",
                                 std::abs(at_half - 0.25) <= 0.02 * 0.25));
  out.info["n_point_value"] = at_half;

  const GridFunction zero = GridFunction::zeros(grid);
  Rng rng(cfg.seed);
  const GridFunction nz = operator_N(zero, random_indicator_sum(grid, rng, 2, 6));
  out.rows.push_back(make_record("", "n-zero", L, nz.max(), 0.0, "f = 0", nz.max() == 0.0));
}

void hypothesis_rows(const ExperimentConfig& cfg, const Grid& grid, const CubeFamily& family, SuiteResult& out) {
  const double bound = cfg.number("hypothesis_bound", 4.0);
  auto rows = run_cases("applications", cfg.integer("hypothesis_cases", 30), "hyp-", [&](int i) {
    Rng rng(case_seed(cfg.seed, 400 + static_cast<std::uint64_t>(i)));
    auto draw = [&] {
      const double lo = static_cast<double>(rng.uniform_int(0, 56)) / 64.0;
      return std::pair{lo, lo + static_cast<double>(rng.uniform_int(1, 8)) / 64.0};
    };
    const auto [a, b] = draw();
    const auto [c, d] = draw();
    const auto E = interval_mask(grid, a, b), F = interval_mask(grid, c, d);
    const HypothesisReport unit = hypothesis_check(E, F, 1.0, 1.0, 0.5, grid, family);
    const HypothesisReport scaled = hypothesis_check(E, F, 2.0, 3.0, 0.5, grid, family);
    const double gap = relative_difference(unit.ratio, scaled.ratio);
    std::ostringstream wit;
    wit << "E=[" << format_double(a) << "," << format_double(b) << ") F=[" << format_double(c) << ","
        << format_double(d) << ") cell=" << unit.witness_cell << " scaling_gap=" << format_double(gap);
    return std::vector<ReportRecord>{
        make_record("", case_name("hyp-", i), grid.level(), unit.ratio, 1.0, wit.str(), gap <= 1e-12 && unit.ratio <= bound)};
  });
  double hi = 0.0;
  for (const auto& r : rows) hi = std::max(hi, r.lhs);
  out.measured["hypothesis_max"] = hi;
  out.rows.insert(out.rows.end(), rows.begin(), rows.end());

  const std::vector<bool> empty(grid.cell_count(), false);
  const HypothesisReport none = hypothesis_check(empty, empty, 1.0, 1.0, 0.5, grid, family);
  out.rows.push_back(make_record("", "hyp-empty", grid.level(), none.lhs, none.rhs, "E = F = empty",
                                 none.lhs == 0.0 && none.rhs == 0.0));
}

void layer_bound_rows(const ExperimentConfig& cfg, const Grid& grid, const CubeFamily& family, SuiteResult& out) {
  const double q = cfg.number("layer_bound_q", 4.0);
  const int cases = cfg.integer("layer_bound_cases", 20);
  std::vector<double> lhs_ratio(static_cast<std::size_t>(cases)), layer_ratio(static_cast<std::size_t>(cases));
  auto rows = run_cases("applications", cases, "lb-", [&](int i) {
    Rng rng(case_seed(cfg.seed, 500 + static_cast<std::uint64_t>(i)));
    const WeightVector ws({power_weight(grid, rng.uniform(-0.5, 1.0)), power_weight(grid, rng.uniform(-0.5, 1.0))});
    const GridFunction f1 = random_indicator_sum(grid, rng, static_cast<int>(rng.uniform_int(1, 3)), 6);
    const GridFunction f2 = random_indicator_sum(grid, rng, static_cast<int>(rng.uniform_int(1, 3)), 6);
    const LayerBoundReport rep = theorem41_bound_check(f1, f2, ws, q, family);
    lhs_ratio[static_cast<std::size_t>(i)] = rep.lhs_ratio;
    layer_ratio[static_cast<std::size_t>(i)] = rep.layer_ratio;
    const std::string audit = "audit=" + format_double(rep.audit.value);
    const std::string id = case_name("lb-", i);
    return std::vector<ReportRecord>{
        make_record("", id + "-layer", grid.level(), rep.lhs, rep.layer_sum, audit, std::isfinite(rep.lhs_ratio)),
        make_record("", id + "-norm", grid.level(), rep.layer_sum, rep.norm_product, audit,
                    std::isfinite(rep.layer_ratio)),
    };
  });
  out.measured["layer_bound_lhs_max"] = *std::max_element(lhs_ratio.begin(), lhs_ratio.end());
  out.measured["layer_bound_sum_max"] = *std::max_element(layer_ratio.begin(), layer_ratio.end());
  out.rows.insert(out.rows.end(), rows.begin(), rows.end());

  // One layer on each side: the layer sum equals the norm product.
  const WeightVector ones({Weight::ones(grid), Weight::ones(grid)});
  const GridFunction e = interval_indicator(grid, 0.25, 0.625);
  const LayerBoundReport single = theorem41_bound_check(e, e, ones, q, family);
  out.rows.push_back(make_record("", "lb-indicator", grid.level(), single.layer_sum, single.norm_product,
                                 "f1 = f2 = chi_E, w = 1", std::abs(single.layer_ratio - 1.0) <= 1e-12));
}

void corollary_rows(const ExperimentConfig& cfg, SuiteResult& out) {
  const double q = cfg.number("corollary_q", 2.0);
  const int cases = cfg.integer("corollary_cases", 50);
  struct Draw {
    double a1, a2;
    std::uint64_t seed;
  };
  std::vector<Draw> draws;
  for (int i = 0; i < cases; ++i) {
    Rng rng(case_seed(cfg.seed, 600 + static_cast<std::uint64_t>(i)));
    draws.push_back({-rng.uniform(0.0, 0.6), -rng.uniform(0.0, 0.6), rng.next()});
  }
  std::vector<double> level_max;
  for (int L : cfg.grid.levels) {
    const Grid grid = Grid::make(1, L);
    const CubeFamily family(grid, cfg.shifted);
    std::vector<double> audit(static_cast<std::size_t>(cases));
    auto rows = run_cases("applications", cases, "cor-", [&](int i) {
      const Draw& d = draws[static_cast<std::size_t>(i)];
      Rng rng(d.seed);
      const WeightVector vs({power_weight(grid, d.a1), power_weight(grid, d.a2)});
      const GridFunction f1 = random_indicator_sum(grid, rng, static_cast<int>(rng.uniform_int(1, 3)), 6);
      const GridFunction f2 = random_indicator_sum(grid, rng, static_cast<int>(rng.uniform_int(1, 3)), 6);
      const CorollaryReport rep = corollary_endpoint_check(f1, f2, vs, q, family);
      audit[static_cast<std::size_t>(i)] = rep.audit.value;
      return std::vector<ReportRecord>{make_record("", case_name("cor-", i), L, rep.lhs, rep.rhs,
                                                   "audit=" + format_double(rep.audit.value),
                                                   std::isfinite(rep.constant))};
    });
    double batch = 0.0;
    for (const auto& r : rows) batch = std::max(batch, r.constant);
    level_max.push_back(batch);
    out.measured["corollary_max_L" + std::to_string(L)] = batch;
    out.info["corollary_audit_max_L" + std::to_string(L)] = *std::max_element(audit.begin(), audit.end());
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());

    const WeightVector unit({Weight::ones(grid), Weight::ones(grid)});
    const GridFunction one = GridFunction::constant(grid, 1.0);
    const CorollaryReport u = corollary_endpoint_check(one, one, unit, q, family);
    out.measured["corollary_unit_L" + std::to_string(L)] = u.constant;
    out.rows.push_back(make_record("", "cor-unit", L, u.lhs, u.rhs, "f = chi_[0,1), v = 1", std::isfinite(u.constant)));
    const GridFunction zero = GridFunction::zeros(grid);
    const CorollaryReport z = corollary_endpoint_check(zero, one, unit, q, family);
    out.rows.push_back(make_record("", "cor-zero", L, z.lhs, z.rhs, "f1 = 0", z.lhs == 0.0 && z.rhs == 0.0));
  }
  out.stability_factor = level_growth(level_max, false);
  add_check(out, "corollary_growth", out.stability_factor, out.stability_factor <= cfg.number("growth", 1.5),
            "batch maximum growth per refinement level");
}

void series_rows(const ExperimentConfig& cfg, const Grid& grid, SuiteResult& out) {
  const std::vector<double> p{3.0, 3.0};
  const int components = cfg.integer("series_components", 4);
  auto rows = run_cases("applications", cfg.integer("series_cases", 10), "series-", [&](int i) {
    Rng rng(case_seed(cfg.seed, 700 + static_cast<std::uint64_t>(i)));
    const WeightVector ws({power_weight(grid, rng.uniform(-0.3, 0.6)), power_weight(grid, rng.uniform(-0.3, 0.6))});
    const std::vector<GridFunction> fs{random_indicator_sum(grid, rng, 2, 6), random_indicator_sum(grid, rng, 2, 6)};
    std::vector<double> c;
    for (int j = 0; j < components; ++j) c.push_back(std::ldexp(1.0, -j));
    const SeriesReport rep = series_sum_check(fs, ws, p, c, cfg.shifted);
    const SeriesReport single = series_sum_check(fs, ws, p, std::vector<double>{1.0}, cfg.shifted);
    const bool single_ok = single.aggregate == single.components.front();
    return std::vector<ReportRecord>{make_record("", case_name("series-", i), grid.level(), rep.aggregate, rep.bound,
                                                 "components=" + std::to_string(components),
                                                 rep.pass && single_ok)};
  });
  out.rows.insert(out.rows.end(), rows.begin(), rows.end());
}

void layer_rows(const ExperimentConfig& cfg, const Grid& grid, SuiteResult& out) {
  auto rows = run_cases("applications", cfg.integer("layer_cases", 20), "layer-", [&](int i) {
    Rng rng(case_seed(cfg.seed, 800 + static_cast<std::uint64_t>(i)));
    std::vector<double> vals(grid.cell_count(), 0.0);
    for (auto& v : vals) v = rng.bernoulli(0.7) ? std::exp2(rng.uniform(-6.0, 6.0)) : 0.0;
    const GridFunction f(grid, vals);
    const LayerDecomposition dec = layer_decompose(f);
    const GridFunction floor_f = layer_floor(dec, grid);
    bool ok = true;
    double worst = 1.0;
    for (std::size_t c = 0; c < vals.size(); ++c) {
      int owners = 0;
      for (std::size_t k = 0; k < dec.layers.size(); ++k) {
        if (!dec.masks[k][c]) continue;
        ++owners;
        const double lo = std::ldexp(1.0, dec.layers[k]);
        ok = ok && lo <= vals[c] && vals[c] < 2.0 * lo;
      }
      ok = ok && owners == (vals[c] > 0.0 ? 1 : 0);
      if (vals[c] > 0.0) {
        ok = ok && floor_f[c] <= vals[c] && vals[c] < 2.0 * floor_f[c];
        worst = std::max(worst, vals[c] / floor_f[c]);
      }
    }
    return std::vector<ReportRecord>{make_record("", case_name("layer-", i), grid.level(), worst, 2.0,
                                                 "layers=" + std::to_string(dec.layers.size()), ok)};
  });
  out.rows.insert(out.rows.end(), rows.begin(), rows.end());
}

void nstar_rows(const ExperimentConfig& cfg, const Grid& grid, SuiteResult& out) {
  const std::vector<int> counts = cfg.integers("nstar_counts", {4, 8, 16, 32, 64, 128, 256});
  const std::vector<GrowthRow> table = nstar_growth(grid, counts);
  std::ostringstream csv;
  csv << "N,ratio\n";
  for (const auto& row : table) {
    csv << row.spikes << "," << format_double(row.ratio) << "\n";
    out.rows.push_back(make_record("", case_name("nstar-", row.spikes), grid.level(), row.ratio, 1.0,
                                   "exploratory, no threshold", true));
  }
  out.attachments["nstar_growth.csv"] = csv.str();
}

}  // namespace

SuiteResult applications(const ExperimentConfig& cfg) {
  if (cfg.grid.d != 1) throw ConfigError("config.grid.d: the applications suite runs on the unit interval (d = 1)");
  SuiteResult out;
  const Grid grid = Grid::make(1, cfg.grid.L);
  const CubeFamily family(grid, cfg.shifted);
  operator_rows(cfg, grid, out);
  hypothesis_rows(cfg, grid, family, out);
  layer_bound_rows(cfg, grid, family, out);
  corollary_rows(cfg, out);
  series_rows(cfg, grid, out);
  layer_rows(cfg, grid, out);
  nstar_rows(cfg, grid, out);
  return out;
}

}  // namespace mwlab::suites
