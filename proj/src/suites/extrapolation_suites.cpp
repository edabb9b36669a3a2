#include <cmath>
#include <sstream>

#include "common.hpp"
#include "mwlab/extrapolation.hpp"
#include "mwlab/generators.hpp"
#include "mwlab/grid_io.hpp"
#include "mwlab/lorentz.hpp"
#include "mwlab/maximal.hpp"
#include "mwlab/weights.hpp"

namespace mwlab::suites {

namespace {

ExponentSystem exponents_param(const ExperimentConfig& cfg, const std::string& key) {
  if (!cfg.params.contains(key)) throw ConfigError("config.params." + key + ": missing required field");
  try {
    return ExponentSystem::from_json(cfg.params.at(key));
  } catch (const ConfigError& e) {
    throw ConfigError("config.params." + key + ": " + e.what());
  }
}

GridFunction sparse_seed(const Grid& grid, std::uint64_t seed, double density) {
  Rng rng(seed);
  std::vector<bool> mask(grid.cell_count());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = rng.bernoulli(density);
  mask[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(mask.size()) - 1))] = true;
  return indicator(grid, mask);
}

}  // namespace

SuiteResult sawyer(const ExperimentConfig& cfg) {
  SuiteResult out;
  const Grid grid = Grid::make(cfg.grid.d, cfg.grid.L);
  const CubeFamily family(grid, cfg.shifted);
  const Weight mu = generate_weight(cfg.weight(0), grid);
  const Weight v = generate_weight(cfg.weight(1), grid);
  const Weight u =
      rdf_iterate(sparse_seed(grid, cfg.seed, cfg.number("u_density", 0.02)), cfg.integer("u_iterations", 8), family, &mu)
          .weight;
  const ConstantEstimate u_a1 = a1_constant(u, mu, family);
  add_check(out, "u_in_A1(mu)", u_a1.value, std::isfinite(u_a1.value), u_a1.witness.describe());
  out.info["a1_u_mu"] = u_a1.value;
  out.info["ainf_uv_mu"] = ainf_constant(u * v * mu, family).value;
  out.info["ainf_mu"] = ainf_constant(mu, family).value;

  auto rows = run_cases("sawyer", cfg.cases, "f-", [&](int i) {
    Rng rng(case_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    const GridFunction f = random_indicator_sum(grid, rng, static_cast<int>(rng.uniform_int(1, 4)),
                                                static_cast<int>(rng.uniform_int(2, grid.level())));
    const SawyerResult s = sawyer_ratio(f, u, v, mu, family);
    return std::vector<ReportRecord>{
        make_record("", case_name("f-", i), grid.level(), s.lhs, s.rhs, family.descriptor(), std::isfinite(s.ratio))};
  });
  double hi = 0.0;
  for (const auto& r : rows) hi = std::max(hi, r.constant);
  out.measured["max_ratio"] = hi;

  // Lebesgue weights, dyadic family, indicators: weak (1,1) with constant 1.
  const CubeFamily dyadic(grid, false);
  const Weight one = Weight::ones(grid);
  auto indicator_rows = run_cases("sawyer", cfg.integer("indicator_cases", 20), "indicator-", [&](int i) {
    Rng rng(case_seed(cfg.seed ^ 0x5a5a5a5aull, static_cast<std::uint64_t>(i)));
    const GridFunction e = random_indicator(grid, rng, static_cast<int>(rng.uniform_int(1, grid.level())),
                                            rng.uniform(0.02, 0.7));
    const SawyerResult s = sawyer_ratio(e, one, one, one, dyadic);
    return std::vector<ReportRecord>{make_record("", case_name("indicator-", i), grid.level(), s.lhs, s.rhs,
                                                 dyadic.descriptor(), s.ratio <= 1.0 + 1e-12)};
  });
  out.rows = std::move(rows);
  out.rows.insert(out.rows.end(), indicator_rows.begin(), indicator_rows.end());
  return out;
}

namespace {

// g with sigma({g > y}) as close as the grid allows to ||f||^q y^{-q}:
// g(x) = (||f||^q / sigma([0, right edge of the cell of x]))^{1/q}.
GridFunction weak_extremal(const Grid& grid, const std::vector<double>& sigma, double norm, double q) {
  std::vector<double> g(sigma.size());
  KahanSum cum;
  const double target = std::pow(norm, q);
  for (std::size_t i = 0; i < g.size(); ++i) {
    cum.add(sigma[i] * grid.cell_volume());
    g[i] = std::pow(target / cum.value(), 1.0 / q);
  }
  return GridFunction(grid, std::move(g));
}

}  // namespace

SuiteResult offdiag(const ExperimentConfig& cfg) {
  SuiteResult out;
  const Grid grid = Grid::make(cfg.grid.d, cfg.grid.L);
  const CubeFamily family(grid, cfg.shifted);
  std::vector<OffDiagExponents> variants;
  if (cfg.params.contains("variants")) {
    const auto& arr = cfg.params.at("variants");
    if (!arr.is_array() || arr.empty()) throw ConfigError("config.params.variants: expected a nonempty array");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      try {
        variants.push_back(OffDiagExponents::from_json(arr[k]));
      } catch (const ConfigError& e) {
        throw ConfigError("config.params.variants[" + std::to_string(k) + "]: " + e.what());
      }
    }
  } else {
    variants.push_back(cfg.require_offdiag());
  }
  const Weight base = generate_weight(cfg.weight(0), grid);
  const Weight mu = generate_weight(cfg.weight(1), grid);
  const ConstantEstimate audit = a1_constant(base, mu, family);
  add_check(out, "w_power_in_A1(mu)", audit.value, std::isfinite(audit.value), audit.witness.describe());
  out.info["a1_audit"] = audit.value;
  const double spread_limit = cfg.number("spread", 4.0);

  for (std::size_t vk = 0; vk < variants.size(); ++vk) {
    const OffDiagExponents& x = variants[vk];
    const std::string prefix = "v" + std::to_string(vk) + "-";
    // base = w^{delta1/r0}
    const Weight w = pow(base, x.r0() / x.delta1());
    const double rho = x.alpha() * x.r0() / x.p0();
    std::vector<double> sigma(grid.cell_count());
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      sigma[i] = std::pow(w[i], x.q() / x.r0()) * std::pow(mu[i], x.q() * x.inv_delta1());
    }
    std::vector<double> residuals(static_cast<std::size_t>(cfg.cases), 0.0);
    auto rows = run_cases("offdiag", cfg.cases, prefix + "f", [&](int i) {
      Rng rng(case_seed(cfg.seed + vk, static_cast<std::uint64_t>(i)));
      const GridFunction f = random_indicator_sum(grid, rng, static_cast<int>(rng.uniform_int(1, 4)),
                                                  static_cast<int>(rng.uniform_int(2, 6)));
      const double norm = lorentz_norm(f, w, LorentzIndex::strong(x.r0(), rho));
      const GridFunction g = weak_extremal(grid, sigma, norm, x.q());
      const OffDiagContext ctx(f, g, w, mu, x, family);
      std::vector<double> ys = default_y_grid(g);
      ys.push_back(2.0 * g.max());
      const OffDiagReport rep = offdiag_verify(ctx, ys);
      residuals[static_cast<std::size_t>(i)] = rep.v_identity_residual;
      const std::string id = case_name(prefix + "f", i);
      std::vector<ReportRecord> rows;
      for (std::size_t k = 0; k < rep.rows.size(); ++k) {
        const auto& r = rep.rows[k];
        std::ostringstream wit;
        wit << "y=" << format_double(r.y) << " gamma=" << format_double(r.gamma)
            << " bound_constant=" << format_double(r.bound_constant);
        const bool ok = r.masks_ok && r.chains_ok && r.gamma_ok && r.bound_ok && rep.spread <= spread_limit &&
                        rep.v_identity_residual <= 1e-12;
        rows.push_back(make_record("", id + "-y" + std::to_string(k), grid.level(), r.lhs, r.norm_term, wit.str(), ok));
      }
      return rows;
    });
    double hi = 0.0, spread = 1.0;
    std::map<std::string, std::pair<double, double>> per_case;
    for (const auto& r : rows) {
      if (r.lhs <= 0.0) continue;
      hi = std::max(hi, r.constant);
      auto& [lo_c, hi_c] = per_case.try_emplace(r.case_id.substr(0, r.case_id.rfind("-y")), kInf, 0.0).first->second;
      lo_c = std::min(lo_c, r.constant);
      hi_c = std::max(hi_c, r.constant);
    }
    for (const auto& [id, range] : per_case) spread = std::max(spread, range.second / range.first);
    out.measured["max_constant_" + prefix.substr(0, prefix.size() - 1)] = hi;
    out.info["max_spread_" + prefix.substr(0, prefix.size() - 1)] = spread;
    out.info["max_v_residual_" + prefix.substr(0, prefix.size() - 1)] =
        *std::max_element(residuals.begin(), residuals.end());
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());

    // g = 0: every level set is empty.
    Rng rng(case_seed(cfg.seed, 1u << 20));
    const GridFunction f = random_indicator_sum(grid, rng, 2, 4);
    const OffDiagContext vacuous(f, GridFunction::zeros(grid), w, mu, x, family);
    const std::vector<double> ys{0.125, 1.0, 8.0};
    const OffDiagReport rep = offdiag_verify(vacuous, ys);
    bool all_zero = true;
    for (const auto& r : rep.rows) all_zero = all_zero && r.lhs == 0.0;
    out.rows.push_back(make_record("", prefix + "zero-g", grid.level(), 0.0, 1.0, "g = 0", all_zero && rep.pass));
  }
  return out;
}

SuiteResult factorization(const ExperimentConfig& cfg) {
  SuiteResult out;
  // (a): p_m = r_m.
  {
    const ExponentSystem e = exponents_param(cfg, "a_exponents");
    const int m = e.m();
    if (e.p(m - 1) != e.r(m - 1)) throw ConfigError("config.params.a_exponents: requires p_m = r_m");
    const Grid grid = Grid::make(cfg.grid.d, cfg.grid.L);
    const CubeFamily family(grid, cfg.shifted);
    std::vector<double> reverse_reduced(static_cast<std::size_t>(cfg.integer("a_cases", 20)), 0.0);
    std::vector<double> reverse_a1(reverse_reduced.size(), 0.0);
    auto rows = run_cases("factorization", static_cast<int>(reverse_reduced.size()), "a-", [&](int i) {
      Rng rng(case_seed(cfg.seed, static_cast<std::uint64_t>(i)));
      std::vector<Weight> ws;
      for (int k = 0; k + 1 < m; ++k) {
        WeightSpec s;
        s.kind = "power";
        s.params["a"] = rng.uniform(-0.5, 0.8) / grid.dimension();
        ws.push_back(generate_weight(s, grid));
      }
      ws.push_back(Weight::ones(grid));
      const Weight mu = reduced_measure(WeightVector(ws), e);
      const int kind = i % 4;
      std::string label;
      Weight wm = Weight::ones(grid);
      if (kind == 3) {
        std::vector<double> vals(grid.cell_count(), 1.0);
        vals[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(vals.size()) - 1))] = std::ldexp(1.0, -20);
        wm = Weight(grid, std::move(vals));
        label = "spike";
      } else {
        Weight u = Weight::ones(grid);
        if (kind == 2) {
          u = rdf_iterate(sparse_seed(grid, rng.next(), 0.02), 6, family, &mu).weight;
          label = "rdf";
        } else {
          WeightSpec s;
          s.kind = "power";
          s.params["a"] = -rng.uniform(0.0, 0.6) / grid.dimension();
          u = generate_weight(s, grid);
          label = "power";
        }
        wm = pow(u, e.r(m - 1) / e.rho());
      }
      ws.back() = wm;
      const ImpliAReport rep = impli_a_check(WeightVector(std::move(ws)), e, family);
      reverse_reduced[static_cast<std::size_t>(i)] = rep.reduced.value / rep.full.value;
      reverse_a1[static_cast<std::size_t>(i)] =
          std::pow(rep.a1.value, 1.0 / e.rho()) * rep.reduced_min / rep.full.value;
      const bool ok = rep.forward_ok && rep.factorization_residual <= 1e-9;
      return std::vector<ReportRecord>{make_record("", case_name("a-", i), grid.level(), rep.full.value,
                                                   rep.forward_bound, label + " " + rep.full.witness.describe(), ok)};
    });
    out.info["a_reverse_reduced_max"] = *std::max_element(reverse_reduced.begin(), reverse_reduced.end());
    out.info["a_reverse_a1_max"] = *std::max_element(reverse_a1.begin(), reverse_a1.end());
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
  }
  // (b): p_m > r_m, sweep over the configured levels.
  {
    const ExponentSystem e = exponents_param(cfg, "b_exponents");
    const int m = e.m();
    const int cases = cfg.integer("b_cases", 8);
    struct Draw {
      std::vector<double> leading;
      double c = 0.0;
      double lo = 0.0, hi = 0.0;
    };
    std::vector<Draw> draws;
    for (int i = 0; i < cases; ++i) {
      Rng rng(case_seed(cfg.seed ^ 0xb0b0ull, static_cast<std::uint64_t>(i)));
      Draw d;
      for (int k = 0; k + 1 < m; ++k) d.leading.push_back(rng.uniform(-0.4, 0.6) / cfg.grid.d);
      d.c = rng.uniform(0.0, 0.5) / cfg.grid.d;
      d.lo = static_cast<double>(rng.uniform_int(0, 48)) / 64.0;
      d.hi = d.lo + static_cast<double>(rng.uniform_int(1, 16)) / 64.0;
      draws.push_back(d);
    }
    std::vector<double> wm_max, apr_max;
    for (int L : cfg.grid.levels) {
      const Grid grid = Grid::make(cfg.grid.d, L);
      const CubeFamily family(grid, cfg.shifted);
      std::vector<double> wm_ratio(static_cast<std::size_t>(cases)), apr(static_cast<std::size_t>(cases));
      auto rows = run_cases("factorization", cases, "b-", [&](int i) {
        const Draw& d = draws[static_cast<std::size_t>(i)];
        std::vector<Weight> leading;
        for (double a : d.leading) {
          WeightSpec s;
          s.kind = "power";
          s.params["a"] = a;
          leading.push_back(generate_weight(s, grid));
        }
        WeightSpec us;
        us.kind = "power";
        us.params["a"] = -d.c;
        const Weight u = generate_weight(us, grid);
        const GridFunction g = interval_indicator(grid, d.lo, d.hi);
        const ImpliBReport rep = impli_b_construct(leading, u, g, e, family);
        wm_ratio[static_cast<std::size_t>(i)] = rep.wm_ratio.value;
        apr[static_cast<std::size_t>(i)] = rep.assembled_apr.value;
        const bool ok = std::isfinite(rep.assembled_apr.value) && std::isfinite(rep.wm_ratio.value) &&
                        rep.identity_residual <= 1e-12;
        const std::string id = case_name("b-", i);
        return std::vector<ReportRecord>{
            make_record("", id + "-wm", L, rep.wm_ratio.value, 1.0, rep.wm_ratio.witness.describe(), ok),
            make_record("", id + "-apr", L, rep.assembled_apr.value, rep.reduced_apr.value,
                        rep.assembled_apr.witness.describe(), ok),
        };
      });
      wm_max.push_back(*std::max_element(wm_ratio.begin(), wm_ratio.end()));
      apr_max.push_back(*std::max_element(apr.begin(), apr.end()));
      out.measured["wm_max_L" + std::to_string(L)] = wm_max.back();
      out.measured["apr_max_L" + std::to_string(L)] = apr_max.back();
      out.rows.insert(out.rows.end(), rows.begin(), rows.end());
    }
    const double limit = cfg.number("stability", 2.0);
    const double s1 = level_growth(wm_max, true);
    const double s2 = level_growth(apr_max, true);
    add_check(out, "wm_refinement", s1, s1 <= limit, "two-sided ratio of consecutive level maxima");
    add_check(out, "apr_refinement", s2, s2 <= limit, "two-sided ratio of consecutive level maxima");
    out.stability_factor = std::max(s1, s2);
  }
  return out;
}

SuiteResult endpoint(const ExperimentConfig& cfg) {
  SuiteResult out;
  const ExponentSystem& e = cfg.require_exponents();
  const int m = e.m();
  const ExponentSystem e_full = ExponentSystem::make(e.p_vector(), e.r_vector());
  const double growth_limit = cfg.number("growth", 1.5);
  std::vector<double> level_max;
  double index_residual = 0.0;
  for (int L : cfg.grid.levels) {
    const Grid grid = Grid::make(cfg.grid.d, L);
    const CubeFamily family(grid, cfg.shifted);
    const WeightVector vs = generate_vector(cfg.weights, grid);
    if (static_cast<int>(vs.size()) != m) throw ConfigError("config.weights: need one weight per function");
    std::vector<double> rvec(e.r_vector().begin(), e.r_vector().begin() + m);
    const ConstantEstimate audit = apvec_constant(vs, rvec, family);
    add_check(out, "audit_L" + std::to_string(L), audit.value, std::isfinite(audit.value), audit.witness.describe());
    out.info["audit_L" + std::to_string(L)] = audit.value;

    std::vector<double> residual(static_cast<std::size_t>(cfg.cases), 0.0);
    auto rows = run_cases("endpoint", cfg.cases, "case-", [&](int i) {
      Rng rng(case_seed(cfg.seed, static_cast<std::uint64_t>(i)));
      std::vector<GridFunction> fs;
      for (int k = 0; k < m; ++k) {
        fs.push_back(random_indicator_sum(grid, rng, static_cast<int>(rng.uniform_int(1, 3)), 6));
      }
      const GridFunction g = multilinear_maximal(fs, family);
      const EndpointResult res = endpoint_verify(fs, g, vs, e);
      // alpha_i = p_i: L^{r_i, r_i} is L^{r_i}.
      double worst = 0.0;
      for (int k = 0; k < m; ++k) {
        const double ri = e_full.r(k);
        const double lorentz = lorentz_norm(fs[static_cast<std::size_t>(k)], vs[static_cast<std::size_t>(k)],
                                            LorentzIndex::strong(ri, e_full.alpha(k) * ri / e_full.p(k)));
        KahanSum s;
        for (std::size_t c = 0; c < g.size(); ++c) s.add(std::pow(fs[static_cast<std::size_t>(k)][c], ri) * vs[static_cast<std::size_t>(k)][c]);
        worst = std::max(worst, relative_difference(lorentz, std::pow(s.value() * grid.cell_volume(), 1.0 / ri)));
      }
      residual[static_cast<std::size_t>(i)] = worst;
      return std::vector<ReportRecord>{make_record("", case_name("case-", i), L, res.lhs, res.rhs, family.descriptor(),
                                                   std::isfinite(res.constant) && worst <= 1e-12)};
    });
    double batch = 0.0;
    for (const auto& r : rows) batch = std::max(batch, r.constant);
    level_max.push_back(batch);
    index_residual = std::max(index_residual, *std::max_element(residual.begin(), residual.end()));
    out.measured["max_constant_L" + std::to_string(L)] = batch;
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());

    // f_i = 1, v_i = 1: both sides equal 1.
    std::vector<GridFunction> ones(static_cast<std::size_t>(m), GridFunction::constant(grid, 1.0));
    const WeightVector unit(std::vector<Weight>(static_cast<std::size_t>(m), Weight::ones(grid)));
    const EndpointResult r1 = endpoint_verify(ones, multilinear_maximal(ones, family), unit, e);
    out.rows.push_back(make_record("", "unit", L, r1.lhs, r1.rhs, "f = v = 1", std::abs(r1.constant - 1.0) <= 1e-12));
  }
  out.info["index_identity_residual"] = index_residual;
  add_check(out, "index_identity", index_residual, index_residual <= 1e-12, "alpha_i = p_i gives L^{r_i}");
  out.stability_factor = level_growth(level_max, false);
  add_check(out, "batch_growth", out.stability_factor, out.stability_factor <= growth_limit,
            "batch maximum growth per refinement level");
  return out;
}

}  // namespace mwlab::suites
