#include <cmath>
#include <sstream>

#include "common.hpp"
#include "mwlab/generators.hpp"
#include "mwlab/grid_io.hpp"
#include "mwlab/lorentz.hpp"
#include "mwlab/maximal.hpp"
#include "mwlab/weights.hpp"

namespace mwlab::suites {

namespace {

std::string vector_text(std::span<const double> v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out + ")";
}

}  // namespace

SuiteResult restricted_r1(const ExperimentConfig& cfg) {
  SuiteResult out;
  const Grid grid = Grid::make(cfg.grid.d, cfg.grid.L);
  const CubeFamily family(grid, cfg.shifted);
  const double band = cfg.number("band", 16.0);

  auto rows = run_cases("restricted_r1", cfg.cases, "vec-", [&](int i) {
    Rng rng(case_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    const WeightVector ws({draw_recipe(rng, grid.dimension()).build(grid), draw_recipe(rng, grid.dimension()).build(grid)});
    const std::vector<double> p{rng.uniform(1.25, 4.0), rng.uniform(1.25, 4.0)};
    const ExponentSystem e = ExponentSystem::make(p, {1.0, 1.0, 1.0});
    const ConstantEstimate general = apr_constant(ws, e, family);
    const ConstantEstimate r1 = apr_r1_constant(ws, p, family);
    const double ratio = general.value / r1.value;

    const std::vector<double> ones{1.0, 1.0};
    const ConstantEstimate r1_endpoint = apr_r1_constant(ws, ones, family);
    const ConstantEstimate strong_endpoint = apvec_constant(ws, ones, family);
    return std::vector<ReportRecord>{
        make_record("", case_name("vec-", i), grid.level(), general.value, r1.value,
                    "p=" + vector_text(p) + " " + general.witness.describe(), ratio >= 1.0 / band && ratio <= band),
        make_record("", case_name("vec-", i) + "-p11", grid.level(), r1_endpoint.value, strong_endpoint.value,
                    r1_endpoint.witness.describe(),
                    relative_difference(r1_endpoint.value, strong_endpoint.value) <= 1e-12),
    };
  });
  double lo = kInf, hi = 0.0;
  for (const auto& r : rows) {
    if (r.case_id.ends_with("-p11")) continue;
    lo = std::min(lo, r.constant);
    hi = std::max(hi, r.constant);
  }
  out.measured["min_ratio"] = lo;
  out.measured["max_ratio"] = hi;
  out.rows = std::move(rows);
  return out;
}

SuiteResult mrestricted(const ExperimentConfig& cfg) {
  SuiteResult out;
  const std::vector<double> p{2.0, 2.0};
  const double growth_limit = cfg.number("growth", 1.5);
  const int coarse = cfg.integer("coarse_level", 6);
  std::vector<double> level_max;
  for (int L : cfg.grid.levels) {
    const Grid grid = Grid::make(cfg.grid.d, L);
    const CubeFamily family(grid, cfg.shifted);
    const WeightVector ws = generate_vector(cfg.weights, grid);
    if (ws.size() != 2) throw ConfigError("config.weights: mrestricted needs a pair of weights");
    const Weight w = composite_weight(ws, p);
    const ConstantEstimate audit = apr_r1_constant(ws, p, family);
    add_check(out, "audit_L" + std::to_string(L), audit.value, std::isfinite(audit.value),
              "restricted (2,2) characteristic at " + audit.witness.describe());
    out.info["audit_L" + std::to_string(L)] = audit.value;

    std::vector<double> strong(static_cast<std::size_t>(cfg.cases), 0.0);
    auto rows = run_cases("mrestricted", cfg.cases, "pair-", [&](int i) {
      Rng rng(case_seed(cfg.seed, static_cast<std::uint64_t>(i)));
      const double d1 = rng.uniform(0.05, 0.6);
      const double d2 = rng.uniform(0.05, 0.6);
      const GridFunction e = random_indicator(grid, rng, coarse, d1);
      const GridFunction f = random_indicator(grid, rng, coarse, d2);
      const std::vector<GridFunction> pair{e, f};
      const GridFunction m = multilinear_maximal(pair, family);
      const double lhs = weak_norm(m, w, 1.0);
      const double rhs = std::sqrt(level_measure(e, 0.5, ws[0]) * level_measure(f, 0.5, ws[1]));
      strong[static_cast<std::size_t>(i)] = integrate(m, domain_box(grid), &w) / rhs;
      return std::vector<ReportRecord>{
          make_record("", case_name("pair-", i), L, lhs, rhs, "density=" + format_double(d1) + "/" + format_double(d2),
                      std::isfinite(lhs / rhs))};
    });
    double batch = 0.0;
    for (const auto& r : rows) batch = std::max(batch, r.constant);
    level_max.push_back(batch);
    out.measured["max_constant_L" + std::to_string(L)] = batch;
    out.info["strong_target_max_L" + std::to_string(L)] = *std::max_element(strong.begin(), strong.end());
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
  }
  out.stability_factor = level_growth(level_max, false);
  add_check(out, "batch_growth", out.stability_factor, out.stability_factor <= growth_limit,
            "batch maximum growth per refinement level");
  return out;
}

SuiteResult composite(const ExperimentConfig& cfg) {
  SuiteResult out;
  const Grid grid = Grid::make(cfg.grid.d, cfg.grid.L);
  const CubeFamily family(grid, cfg.shifted);
  auto rows = run_cases("composite", cfg.cases, "vec-", [&](int i) {
    Rng rng(case_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    std::optional<ExponentSystem> e;
    for (int attempt = 0; !e; ++attempt) {
      if (attempt > 10000) throw ComputeError("no admissible exponent system drawn");
      const int m = static_cast<int>(rng.uniform_int(1, 3));
      std::vector<double> pv, rv;
      for (int k = 0; k < m; ++k) {
        const double r = rng.bernoulli(0.4) ? 1.0 : rng.uniform(1.0, 3.0);
        rv.push_back(r);
        pv.push_back(rng.bernoulli(0.2) ? r : r * rng.uniform(1.1, 4.0));
      }
      rv.push_back(rng.bernoulli(0.5) ? 1.0 : rng.uniform(1.0, 4.0));
      try {
        ExponentSystem cand = ExponentSystem::make(pv, rv);
        if (cand.inv_r() > 1.0 + 1e-6) e = cand;
      } catch (const ConfigError&) {
      }
    }
    std::vector<Weight> ws;
    for (int k = 0; k < e->m(); ++k) ws.push_back(draw_recipe(rng, grid.dimension()).build(grid));
    const CompositeAudit rep = composite_audit(WeightVector(std::move(ws)), *e, family);
    std::ostringstream w;
    w << "p=" << vector_text(e->p_vector()) << " r=" << vector_text(e->r_vector()) << " " << rep.worst_cube.describe();
    const bool ok = std::isfinite(rep.apr.value) && rep.worst_cube_ratio <= rep.holder_constant * (1.0 + 1e-9);
    return std::vector<ReportRecord>{make_record("", case_name("vec-", i), grid.level(), rep.worst_cube_ratio,
                                                 rep.holder_constant, w.str(), ok)};
  });
  double hi = 0.0;
  for (const auto& r : rows) hi = std::max(hi, r.constant);
  out.measured["max_ratio"] = hi;
  out.rows = std::move(rows);
  return out;
}

}  // namespace mwlab::suites
