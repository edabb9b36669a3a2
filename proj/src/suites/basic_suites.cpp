#include <cmath>
#include <functional>
#include <sstream>

#include "common.hpp"
#include "mwlab/generators.hpp"
#include "mwlab/grid_io.hpp"
#include "mwlab/lorentz.hpp"
#include "mwlab/maximal.hpp"
#include "mwlab/weights.hpp"

namespace mwlab::suites {

Weight WeightRecipe::build(const Grid& grid) const {
  switch (kind) {
    case Kind::power: {
      WeightSpec s;
      s.kind = "power";
      s.params["a"] = a;
      return generate_weight(s, grid);
    }
    case Kind::smoothed: {
      WeightSpec s;
      s.kind = "smoothed";
      s.params = {{"lo", lo}, {"hi", hi}, {"width", width}, {"base", base}};
      return generate_weight(s, grid);
    }
    case Kind::blocks: {
      const int level = std::min(block_level, grid.level());
      const int side = 1 << (grid.level() - level);
      const int per_axis = 1 << level;
      const auto ext = grid.extent();
      std::vector<double> out(grid.cell_count());
      for (int y = 0; y < ext[1]; ++y) {
        for (int x = 0; x < ext[0]; ++x) {
          const int bx = x / side;
          const int by = grid.dimension() == 2 ? y / side : 0;
          out[grid.index(x, y)] = blocks[static_cast<std::size_t>(bx + by * per_axis)];
        }
      }
      return Weight(grid, std::move(out));
    }
  }
  throw ConfigError("unknown weight recipe");
}

std::string WeightRecipe::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::power:
      os << "power(a=" << format_double(a) << ")";
      break;
    case Kind::smoothed:
      os << "smoothed(" << format_double(lo) << "-" << format_double(hi) << ")";
      break;
    case Kind::blocks:
      os << "blocks(level=" << block_level << ")";
      break;
  }
  return os.str();
}

WeightRecipe draw_recipe(Rng& rng, int dimension) {
  WeightRecipe r;
  const auto pick = rng.uniform_int(0, 2);
  if (pick == 0) {
    r.kind = WeightRecipe::Kind::power;
    r.a = rng.uniform(-0.9 / dimension, 2.0);
  } else if (pick == 1) {
    r.kind = WeightRecipe::Kind::smoothed;
    r.lo = rng.uniform(0.0, 0.7);
    r.hi = r.lo + rng.uniform(0.05, 0.3);
    r.width = rng.uniform(0.01, 0.1);
    r.base = std::exp(rng.uniform(-4.0, 0.0));
  } else {
    r.kind = WeightRecipe::Kind::blocks;
    r.block_level = static_cast<int>(rng.uniform_int(2, 5));
    const int n = 1 << r.block_level;
    r.blocks.resize(static_cast<std::size_t>(dimension == 2 ? n * n : n));
    for (auto& b : r.blocks) b = std::exp(rng.uniform(-3.0, 3.0));
  }
  return r;
}

namespace {

constexpr double kCharacteristicTol = 1e-9;
constexpr double kIndicatorTol = 1e-12;

ReportRecord unit_row(const std::string& id, const ConstantEstimate& c) {
  return make_record("", id, c.resolution, c.value, 1.0, c.witness.describe(),
                     std::abs(c.value - 1.0) <= kCharacteristicTol);
}

}  // namespace

SuiteResult identity(const ExperimentConfig& cfg) {
  SuiteResult out;
  const Grid grid = Grid::make(cfg.grid.d, cfg.grid.L);
  const CubeFamily family(grid, cfg.shifted);
  const Weight one = Weight::ones(grid);
  const WeightVector ones2({one, one});
  const WeightVector ones3({one, one, one});

  struct Job {
    std::string id;
    std::function<ConstantEstimate()> eval;
  };
  std::vector<Job> jobs;
  jobs.push_back({"char-a1", [&] { return a1_constant(one, one, family); }});
  if (cfg.flag("ainf", true)) jobs.push_back({"char-ainf", [&] { return ainf_constant(one, family); }});
  for (const auto& p : std::vector<std::vector<double>>{{1, 1}, {2, 2}, {1.5, 3}}) {
    const std::string tag = format_double(p[0]) + "-" + format_double(p[1]);
    jobs.push_back({"char-apvec-" + tag, [&, p] { return apvec_constant(ones2, p, family); }});
    jobs.push_back({"char-aprr1-" + tag, [&, p] { return apr_r1_constant(ones2, p, family); }});
  }
  const std::vector<ExponentSystem> systems{
      ExponentSystem::make({2, 2}, {1, 1, 1}),
      ExponentSystem::make({2, 2}, {2, 2, 1}),
      ExponentSystem::make({1.5, 3}, {1, 2, 1.2}),
      ExponentSystem::make({3, 3, 3}, {1, 1, 1, 1}),
  };
  for (std::size_t k = 0; k < systems.size(); ++k) {
    const auto& ws = systems[k].m() == 3 ? ones3 : ones2;
    jobs.push_back({case_name("char-apr-", static_cast<int>(k), 1),
                    [&, k, &ws = ws] { return apr_constant(ws, systems[k], family); }});
  }
  std::vector<ReportRecord> char_rows(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) { char_rows[i] = unit_row(jobs[i].id, jobs[i].eval()); });
  out.rows = char_rows;

  // Indicator norms: lorentz_norm(chi_E, w, (p, q)) = w(E)^{1/p}.
  const int indicator_cases = cfg.integer("indicator_cases", 40);
  auto indicator_rows = run_cases("identity", indicator_cases, "lorentz-", [&](int i) {
    Rng rng(case_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    const Weight w = draw_recipe(rng, grid.dimension()).build(grid);
    const GridFunction e = random_indicator(grid, rng, static_cast<int>(rng.uniform_int(1, 8)), rng.uniform(0.05, 0.9));
    const double p = rng.uniform(0.3, 6.0);
    const bool weak = rng.bernoulli(0.25);
    const LorentzIndex idx = weak ? LorentzIndex::weak(p) : LorentzIndex::strong(p, rng.uniform(0.2, 8.0));
    const double lhs = lorentz_norm(e, w, idx);
    const double rhs = std::pow(level_measure(e, 0.5, w), 1.0 / p);
    return std::vector<ReportRecord>{make_record("", case_name("lorentz-", i), grid.level(), lhs, rhs,
                                                 weak ? "weak" : "strong",
                                                 relative_difference(lhs, rhs) <= kIndicatorTol)};
  });
  out.rows.insert(out.rows.end(), indicator_rows.begin(), indicator_rows.end());

  // Maximal operators of constants reproduce the constants exactly.
  const std::vector<double> constants = cfg.numbers("constants", {1.0, 0.3, 7.25, 1e-3});
  Rng rng(cfg.seed);
  const Weight mu = draw_recipe(rng, grid.dimension()).build(grid);
  for (std::size_t k = 0; k < constants.size(); ++k) {
    const double c = constants[k];
    const GridFunction g = GridFunction::constant(grid, c);
    for (int with_mu = 0; with_mu < 2; ++with_mu) {
      const GridFunction m = maximal(g, family, with_mu ? &mu : nullptr);
      const bool exact = std::all_of(m.values().begin(), m.values().end(), [&](double v) { return v == c; });
      out.rows.push_back(make_record("", case_name(with_mu ? "max-mu-" : "max-", static_cast<int>(k), 2), grid.level(),
                                     m.max(), c, "all cells", exact));
    }
    const double c2 = constants[(k + 1) % constants.size()];
    const std::vector<GridFunction> pair{g, GridFunction::constant(grid, c2)};
    const GridFunction mm = multilinear_maximal(pair, family);
    const bool exact = std::all_of(mm.values().begin(), mm.values().end(), [&](double v) { return v == c * c2; });
    out.rows.push_back(
        make_record("", case_name("max-multi-", static_cast<int>(k), 2), grid.level(), mm.max(), c * c2, "all cells", exact));
  }
  return out;
}

SuiteResult exponents(const ExperimentConfig& cfg) {
  SuiteResult out;
  const double tol = cfg.number("tolerance", 1e-12);
  const int draws = cfg.cases;
  double worst_sys = 0.0, worst_off = 0.0;
  auto rows = run_cases("exponents", draws, "draw-", [&](int i) {
    Rng rng(case_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    std::optional<ExponentSystem> sys;
    int attempts = 0;
    while (!sys) {
      if (++attempts > 10000) throw ComputeError("no valid exponent system drawn");
      const int m = static_cast<int>(rng.uniform_int(1, 4));
      std::vector<double> p, r, alpha;
      for (int k = 0; k < m; ++k) {
        const double ri = rng.bernoulli(0.3) ? 1.0 : rng.uniform(1.0, 4.0);
        const double pi = rng.bernoulli(0.25) ? ri : ri * rng.uniform(1.0, 4.0);
        r.push_back(ri);
        p.push_back(pi);
        alpha.push_back(rng.uniform(0.05, 1.0) * pi);
      }
      r.push_back(rng.bernoulli(0.3) ? 1.0 : rng.uniform(1.0, 6.0));
      try {
        sys = ExponentSystem::make(p, r, alpha);
      } catch (const ConfigError&) {
      }
    }
    const double r0 = rng.bernoulli(0.3) ? 1.0 : rng.uniform(1.0, 4.0);
    const double p0 = rng.bernoulli(0.2) ? r0 : r0 * rng.uniform(1.0, 5.0);
    const double q0 = rng.uniform(0.2, 6.0);
    const double s0 = rng.bernoulli(0.3) ? kInf : q0 * rng.uniform(1.05, 6.0);
    const double alpha = rng.uniform(0.05, 1.0) * p0;
    const OffDiagExponents off = OffDiagExponents::make(r0, p0, q0, s0, alpha);
    const double rs = sys->identity_residual();
    const double ro = off.identity_residual();
    std::ostringstream ws;
    ws << "m=" << sys->m();
    return std::vector<ReportRecord>{
        make_record("", case_name("draw-", i, 4) + "-offdiag", 0, ro, tol, "s0=" + format_double(s0), ro <= tol),
        make_record("", case_name("draw-", i, 4) + "-system", 0, rs, tol, ws.str(), rs <= tol),
    };
  });
  for (const auto& r : rows) {
    if (r.case_id.ends_with("system")) worst_sys = std::max(worst_sys, r.lhs);
    if (r.case_id.ends_with("offdiag")) worst_off = std::max(worst_off, r.lhs);
  }
  out.info["max_system_residual"] = worst_sys;
  out.info["max_offdiag_residual"] = worst_off;
  out.rows = std::move(rows);
  return out;
}

SuiteResult lemma33(const ExperimentConfig& cfg) {
  SuiteResult out;
  const double band = cfg.number("band", 16.0);
  const double drift_limit = cfg.number("drift", 2.0);
  const double step_tol = 1e-9;
  std::vector<Grid> grids;
  for (int L : cfg.grid.levels) grids.push_back(Grid::make(cfg.grid.d, L));
  const int max_cube_level = cfg.integer("max_cube_level", 6);

  auto rows = run_cases("lemma33", cfg.cases, "case-", [&](int i) {
    Rng rng(case_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    const WeightRecipe recipe = draw_recipe(rng, cfg.grid.d);
    const double q = rng.uniform(1.25, 4.0);
    const double a = rng.uniform(0.1, 0.95);
    const double b = rng.uniform(0.0, 0.9);
    const int level = static_cast<int>(rng.uniform_int(0, std::min(max_cube_level, grids.front().level())));
    std::array<int, 2> offset{static_cast<int>(rng.uniform_int(0, (1 << level) - 1)),
                              cfg.grid.d == 2 ? static_cast<int>(rng.uniform_int(0, (1 << level) - 1)) : 0};
    std::vector<ReportRecord> rows;
    double previous = 0.0;
    for (std::size_t g = 0; g < grids.size(); ++g) {
      const Grid& grid = grids[g];
      const Weight v = recipe.build(grid);
      const DyadicCube Q = dyadic_cube(grid, level, offset);
      const NormEquivalence eq = norm_equivalence_check(v, Q, q, a, b);
      const double S = dyadic_level_sup(v, Q, q);
      const bool in_band = eq.ratio >= 1.0 / band && eq.ratio <= band;
      const bool step = S <= eq.lhs * (1.0 + step_tol) && eq.lhs <= 2.0 * S * (1.0 + step_tol);
      bool drift = true;
      if (g > 0) drift = eq.ratio <= drift_limit * previous && previous <= drift_limit * eq.ratio;
      previous = eq.ratio;
      std::ostringstream w;
      w << Q.describe() << " q=" << format_double(q) << " a=" << format_double(a) << " b=" << format_double(b) << " "
        << recipe.describe();
      rows.push_back(make_record("", case_name("case-", i), grid.level(), eq.lhs, eq.rhs_power_k, w.str(),
                                 in_band && step && drift));
    }
    return rows;
  });
  double lo = kInf, hi = 0.0;
  for (const auto& r : rows) {
    if (r.resolution == cfg.grid.levels.front()) {
      lo = std::min(lo, r.constant);
      hi = std::max(hi, r.constant);
    }
  }
  out.measured["min_ratio"] = lo;
  out.measured["max_ratio"] = hi;
  out.rows = std::move(rows);
  return out;
}

}  // namespace mwlab::suites
