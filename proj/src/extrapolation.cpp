#include "mwlab/extrapolation.hpp"

#include <algorithm>
#include <cmath>

#include "mwlab/errors.hpp"
#include "mwlab/lorentz.hpp"
#include "mwlab/maximal.hpp"
#include "mwlab/numeric.hpp"

namespace mwlab {

namespace {

constexpr double kChainSlack = 1e-9;

bool within(double lhs, double rhs) { return lhs <= rhs * (1.0 + kChainSlack) + 1e-300; }

std::vector<double> times_volume(const Grid& grid, std::vector<double> density) {
  const double vol = grid.cell_volume();
  for (auto& d : density) d *= vol;
  return density;
}

double masked_sum(const std::vector<double>& density, const std::vector<bool>& mask, double vol) {
  KahanSum s;
  for (std::size_t i = 0; i < density.size(); ++i) {
    if (mask[i]) s.add(density[i]);
  }
  return s.value() * vol;
}

}  // namespace

SawyerResult sawyer_ratio(const GridFunction& f, const Weight& u, const Weight& v, const Weight& mu,
                          const CubeFamily& family) {
  check_same_grid(f.grid(), u.grid(), "sawyer_ratio");
  check_same_grid(f.grid(), v.grid(), "sawyer_ratio");
  check_same_grid(f.grid(), mu.grid(), "sawyer_ratio");
  if (f.is_zero()) throw ComputeError("sawyer ratio needs a nonzero f");
  const GridFunction mf = maximal(f, family, &mu);
  std::vector<double> quotient(f.size()), masses(f.size()), dens(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    quotient[i] = mf[i] / v[i];
    masses[i] = u[i] * v[i] * mu[i];
    dens[i] = f[i] * u[i] * mu[i];
  }
  SawyerResult out;
  out.lhs = weak_norm(quotient, times_volume(f.grid(), masses), 1.0);
  KahanSum s;
  for (double d : dens) s.add(d);
  out.rhs = s.value() * f.grid().cell_volume();
  out.ratio = out.lhs / out.rhs;
  return out;
}

GridFunction build_H(const GridFunction& f, const Weight& w, const Weight& mu, const OffDiagExponents& x) {
  check_same_grid(f.grid(), w.grid(), "build_H");
  check_same_grid(f.grid(), mu.grid(), "build_H");
  const double ew = 1.0 - x.delta1() / x.r0();
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::pow(f[i], x.r0()) * std::pow(w[i], ew) / mu[i];
  return GridFunction(f.grid(), std::move(out));
}

OffDiagContext::OffDiagContext(GridFunction f, GridFunction g, Weight w, Weight mu, OffDiagExponents x,
                               CubeFamily family)
    : f_(std::move(f)),
      g_(std::move(g)),
      w_(std::move(w)),
      mu_(std::move(mu)),
      x_(x),
      family_(std::move(family)),
      H_(build_H(f_, w_, mu_, x_)),
      MH_(maximal(H_, family_, &mu_)) {
  check_same_grid(f_.grid(), g_.grid(), "offdiag context");
  check_same_grid(f_.grid(), family_.grid(), "offdiag context");
  const double q_s0 = x_.q() * x_.inv_s0();
  const double ew_phi = (x_.delta1() / x_.r0()) * q_s0;
  const double ew_sigma = x_.q() / x_.r0();
  const double emu_sigma = x_.q() * x_.inv_delta1();
  phi_.resize(f_.size());
  sigma_.resize(f_.size());
  for (std::size_t i = 0; i < f_.size(); ++i) {
    phi_[i] = std::pow(w_[i], ew_phi) * std::pow(mu_[i], q_s0) * MH_[i];
    sigma_[i] = std::pow(w_[i], ew_sigma) * std::pow(mu_[i], emu_sigma);
  }
}

EFMasks split_EF(const OffDiagContext& ctx, double y, double gamma) {
  if (!(y > 0.0) || !(gamma > 0.0)) throw ConfigError("split_EF needs y > 0 and gamma > 0");
  const double threshold = std::pow(gamma * y, ctx.exponents().r0());
  const auto& phi = ctx.phi();
  EFMasks m;
  m.E.resize(phi.size());
  m.F.resize(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    m.E[i] = phi[i] > threshold;
    m.F[i] = !m.E[i] && ctx.g()[i] > y;
  }
  return m;
}

bool masks_cover_and_disjoint(const EFMasks& m, const GridFunction& g, double y) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (m.E[i] && m.F[i]) return false;
    if (g[i] > y && !(m.E[i] || m.F[i])) return false;
  }
  return true;
}

AuxWeight construct_v(const Weight& w, const GridFunction& H, const Weight& mu, const OffDiagExponents& x,
                      const CubeFamily& family) {
  if (H.is_zero()) throw ComputeError("construct_v needs H to be nonzero somewhere");
  const GridFunction mh = maximal(H, family, &mu);
  const double ew = x.inv_delta0() / x.inv_delta1();
  const double em = -x.inv_dual_ratio();
  const double d0_r0 = x.delta0() / x.r0();
  std::vector<double> v(H.size());
  double residual = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (em != 0.0 && !(mh[i] > 0.0)) throw ComputeError("M_mu H vanishes on a cell; the family misses it");
    v[i] = std::pow(w[i], ew) * (em == 0.0 ? 1.0 : std::pow(mh[i], em));
    const double lhs = std::pow(v[i], d0_r0);
    const double rhs = std::pow(w[i], x.delta1() / x.r0()) * (em == 0.0 ? 1.0 : std::pow(mh[i], em * d0_r0));
    residual = std::max(residual, relative_difference(lhs, rhs));
  }
  return AuxWeight{Weight(H.grid(), std::move(v)), residual};
}

AuxWeight construct_v(const OffDiagContext& ctx) {
  return construct_v(ctx.w(), ctx.H(), ctx.mu(), ctx.exponents(), ctx.family());
}

EstimateE estimate_E(const OffDiagContext& ctx, const EFMasks& masks, double y, double gamma) {
  const auto& x = ctx.exponents();
  const Grid& grid = ctx.f().grid();
  const double vol = grid.cell_volume();
  const double rho = x.alpha() * x.r0() / x.p0();
  EstimateE out;
  out.lhs = masked_sum(ctx.sigma(), masks.E, vol);
  out.weak_term = weak_norm(ctx.phi(), times_volume(grid, ctx.sigma()), 1.0);
  KahanSum h, f;
  const double eu = x.delta1() / x.r0();
  for (std::size_t i = 0; i < ctx.f().size(); ++i) {
    h.add(ctx.H()[i] * std::pow(ctx.w()[i], eu) * ctx.mu()[i]);
    f.add(std::pow(ctx.f()[i], x.r0()) * ctx.w()[i]);
  }
  out.h_integral = h.value() * vol;
  out.f_integral = f.value() * vol;
  out.identity_residual = relative_difference(out.h_integral, out.f_integral);
  const double norm_rho = std::pow(lorentz_norm(ctx.f(), ctx.w(), LorentzIndex::strong(x.r0(), rho)), x.r0());
  out.sawyer_constant = out.h_integral > 0.0 ? out.weak_term / out.h_integral : 0.0;
  out.embedding_constant = norm_rho > 0.0 ? out.f_integral / norm_rho : 0.0;
  const double scale = std::pow(gamma * y, -x.r0());
  out.rhs = scale * norm_rho;
  out.chebyshev_ok = within(out.lhs, scale * out.weak_term);
  return out;
}

EstimateF estimate_F(const OffDiagContext& ctx, const EFMasks& masks, const AuxWeight& aux, double y, double gamma) {
  const auto& x = ctx.exponents();
  const Grid& grid = ctx.f().grid();
  const double vol = grid.cell_volume();
  const std::size_t n = ctx.f().size();
  const double beta = x.beta();
  const double rho = x.alpha() * x.r0() / x.p0();
  const double mass_power = x.alpha() / x.p0();
  const auto& f = ctx.f();
  const auto& w = ctx.w();
  const auto& mu = ctx.mu();
  const auto& v = aux.v;

  EstimateF out;
  out.lhs = masked_sum(ctx.sigma(), masks.F, vol);

  // nu = v^{q0/r0} mu^{q0/delta0}; sigma phi^{-beta} = nu pointwise.
  std::vector<double> nu(n);
  std::vector<bool> level(n);
  for (std::size_t i = 0; i < n; ++i) {
    nu[i] = std::pow(v[i], x.q0() / x.r0()) * std::pow(mu[i], x.q0() * x.inv_delta0());
    level[i] = ctx.g()[i] > y;
    if (ctx.phi()[i] > 0.0) {
      out.pointwise_residual =
          std::max(out.pointwise_residual, relative_difference(ctx.sigma()[i] * std::pow(ctx.phi()[i], -beta), nu[i]));
    }
  }
  out.level_integral = masked_sum(nu, level, vol);
  const double lift = std::pow(gamma * y, x.r0() * beta);
  out.pointwise_ok = within(out.lhs, lift * out.level_integral);

  // Hypothesis at the constructed weight.
  const double g_norm = weak_norm(ctx.g().values(), times_volume(grid, nu), x.q0());
  std::vector<double> dens_v(n), dens_h(n, 0.0), dens_w(n, 0.0);
  const double ew_h = (x.delta1() / x.delta0()) * (x.p0() / x.r0());
  const double e_lower = 1.0 - x.p0() / x.r0();
  for (std::size_t i = 0; i < n; ++i) {
    dens_v[i] = std::pow(v[i], x.p0() / x.r0()) * std::pow(mu[i], e_lower);
    if (f[i] > 0.0) {
      dens_h[i] = std::pow(w[i], ew_h) * std::pow(ctx.H()[i], e_lower) * std::pow(mu[i], e_lower);
      dens_w[i] = w[i] * std::pow(f[i], x.r0() - x.p0());
    }
  }
  const auto masses_v = times_volume(grid, dens_v);
  const double f_norm = lorentz_norm(f.values(), masses_v, LorentzIndex::strong(x.p0(), x.alpha()));
  out.hypothesis_constant = f_norm > 0.0 ? g_norm / f_norm : 0.0;
  out.chebyshev_ok = within(out.level_integral, std::pow(y, -x.q0()) * std::pow(g_norm, x.q0()));

  out.layer_v = layer_cake_integral(f.values(), masses_v, x.alpha() - 1.0, mass_power);
  out.layer_H = layer_cake_integral(f.values(), times_volume(grid, dens_h), x.alpha() - 1.0, mass_power);
  out.layer_w = layer_cake_integral(f.values(), times_volume(grid, dens_w), x.alpha() - 1.0, mass_power);
  out.layer_final = layer_cake_integral(f.values(), cell_masses(w), rho - 1.0, mass_power);
  out.maximal_step_ok = within(out.layer_v, out.layer_H);
  out.substitution_residual = relative_difference(out.layer_H, out.layer_w);
  out.final_step_ok = within(out.layer_w, out.layer_final);
  const double norm_rho = lorentz_norm(f, w, LorentzIndex::strong(x.r0(), rho));
  out.norm_residual = std::max(relative_difference(x.alpha() * out.layer_v, std::pow(f_norm, x.alpha())),
                               relative_difference(rho * out.layer_final, std::pow(norm_rho, rho)));
  out.rhs = std::pow(gamma, x.r0() * beta) * std::pow(y, x.r0() * beta - x.q0()) *
            std::pow(norm_rho, x.q0() * x.r0() / x.p0());
  return out;
}

GammaChoice gamma_optimize(double A, double B, double r0, double beta) {
  if (!(A > 0.0) || !(B > 0.0)) throw ConfigError("gamma_optimize needs A > 0 and B > 0");
  if (!(r0 > 0.0) || !(beta > 0.0)) throw ConfigError("gamma_optimize needs r0 > 0 and beta > 0");
  GammaChoice out;
  out.gamma = std::pow(A / (beta * B), 1.0 / (r0 * (1.0 + beta)));
  out.value = A * std::pow(out.gamma, -r0) + B * std::pow(out.gamma, r0 * beta);
  return out;
}

double gamma_grid_minimum(double A, double B, double r0, double beta, double center, double span, int points) {
  double best = kInf;
  const double lo = std::log(center / span);
  const double hi = std::log(center * span);
  for (int k = 0; k < points; ++k) {
    const double g = std::exp(lo + (hi - lo) * k / (points - 1));
    best = std::min(best, A * std::pow(g, -r0) + B * std::pow(g, r0 * beta));
  }
  return best;
}

std::vector<double> default_y_grid(const GridFunction& g) {
  std::vector<double> support;
  for (double v : g.values()) {
    if (v > 0.0) support.push_back(v);
  }
  if (support.empty()) return {};
  std::sort(support.begin(), support.end());
  const double median = support[(support.size() - 1) / 2];
  std::vector<double> ys;
  for (int k = -3; k <= 3; ++k) ys.push_back(std::ldexp(median, k));
  return ys;
}

OffDiagReport offdiag_verify(const OffDiagContext& ctx, std::span<const double> ys) {
  const auto& x = ctx.exponents();
  const Grid& grid = ctx.f().grid();
  const double vol = grid.cell_volume();
  const double rho = x.alpha() * x.r0() / x.p0();
  OffDiagReport report;
  if (ctx.f().is_zero()) {
    if (!ctx.g().is_zero()) throw ComputeError("offdiag_verify: f vanishes but g does not");
    for (double y : ys) {
      OffDiagRow row;
      row.y = y;
      report.rows.push_back(row);
    }
    return report;
  }
  const double norm = lorentz_norm(ctx.f(), ctx.w(), LorentzIndex::strong(x.r0(), rho));
  const bool vacuous_g = ctx.g().is_zero();
  std::optional<AuxWeight> aux;
  if (!x.degenerate()) {
    aux = construct_v(ctx);
    report.v_identity_residual = aux->identity_residual;
  }
  // Degenerate case: the conclusion is the hypothesis at v = w.
  const double degenerate_constant =
      x.degenerate() ? std::pow(weak_norm(ctx.g().values(), times_volume(grid, ctx.sigma()), x.q()) / norm, x.q()) : 0.0;

  std::vector<bool> level(ctx.f().size());
  std::vector<double> constants;
  for (double y : ys) {
    OffDiagRow row;
    row.y = y;
    for (std::size_t i = 0; i < level.size(); ++i) level[i] = ctx.g()[i] > y;
    row.lhs = masked_sum(ctx.sigma(), level, vol);
    row.norm_term = std::pow(y, -x.q()) * std::pow(norm, x.q());
    row.constant = row.lhs / row.norm_term;
    if (x.degenerate()) {
      row.bound_constant = degenerate_constant;
      row.bound = degenerate_constant * row.norm_term;
      row.bound_ok = within(row.lhs, row.bound);
    } else if (!vacuous_g) {
      const EFMasks probe = split_EF(ctx, y, 1.0);
      const EstimateE e1 = estimate_E(ctx, probe, y, 1.0);
      const EstimateF f1 = estimate_F(ctx, probe, *aux, y, 1.0);
      row.A = e1.sawyer_constant * e1.embedding_constant * std::pow(y, -x.r0()) * std::pow(norm, x.r0());
      row.B = std::pow(f1.hypothesis_constant, x.q0()) * std::pow(x.p0() / x.r0(), x.q0() / x.alpha()) *
              std::pow(y, x.r0() * x.beta() - x.q0()) * std::pow(norm, x.q0() * x.r0() / x.p0());
      const GammaChoice choice = gamma_optimize(row.A, row.B, x.r0(), x.beta());
      row.gamma = choice.gamma;
      row.bound = choice.value;
      row.bound_constant = row.bound / row.norm_term;
      const double grid_min = gamma_grid_minimum(row.A, row.B, x.r0(), x.beta(), choice.gamma, 1e3, 10000);
      row.gamma_ok = choice.value <= grid_min * (1.0 + 1e-6);
      for (double scale : {1.0 / 16.0, 1.0, 16.0}) {
        const double gamma = choice.gamma * scale;
        const EFMasks masks = split_EF(ctx, y, gamma);
        row.masks_ok = row.masks_ok && masks_cover_and_disjoint(masks, ctx.g(), y);
        const EstimateE e = estimate_E(ctx, masks, y, gamma);
        const EstimateF f = estimate_F(ctx, masks, *aux, y, gamma);
        const bool chain = e.chebyshev_ok && e.identity_residual <= 1e-9 && f.pointwise_ok && f.chebyshev_ok &&
                           f.maximal_step_ok && f.final_step_ok && f.pointwise_residual <= 1e-9 &&
                           f.substitution_residual <= 1e-9 && f.norm_residual <= 1e-9 &&
                           within(row.lhs, e.lhs + f.lhs);
        row.chains_ok = row.chains_ok && chain;
        if (scale == 1.0) {
          row.e = e;
          row.f = f;
        }
      }
      row.bound_ok = within(row.lhs, row.bound);
    }
    if (row.lhs > 0.0) constants.push_back(row.constant);
    report.pass = report.pass && row.masks_ok && row.chains_ok && row.gamma_ok && row.bound_ok;
    report.rows.push_back(row);
  }
  if (!constants.empty()) {
    const auto [lo, hi] = std::minmax_element(constants.begin(), constants.end());
    report.min_constant = *lo;
    report.max_constant = *hi;
    report.spread = *hi / *lo;
  }
  report.pass = report.pass && report.spread <= 4.0 && report.v_identity_residual <= 1e-12;
  return report;
}

ImpliAReport impli_a_check(const WeightVector& ws, const ExponentSystem& e, const CubeFamily& family) {
  const int m = e.m();
  if (static_cast<int>(ws.size()) != m) throw ConfigError("impli_a_check: weight vector and exponents differ in m");
  if (e.p(m - 1) != e.r(m - 1)) throw ConfigError("impli_a_check requires p_m = r_m");
  const std::size_t last = static_cast<std::size_t>(m - 1);
  const Weight mu = reduced_measure(ws, e);
  const WeightVector reduced = ws.with(last, Weight::ones(ws.grid()));
  const Weight wm = pow(ws[last], e.rho() / e.r(m - 1));
  const auto cubes = family.cubes();
  const auto full_vals = apr_values(ws, e, cubes);
  const auto red_vals = apr_values(reduced, e, cubes);

  ImpliAReport out;
  auto fill = [&](ConstantEstimate& c) {
    c.family = family.descriptor();
    c.resolution = family.grid().level();
  };
  fill(out.full);
  fill(out.reduced);
  fill(out.a1);
  out.reduced_min = kInf;
  for (std::size_t k = 0; k < cubes.size(); ++k) {
    const double a1 = a1_cube(wm, mu, cubes[k]);
    if (k == 0 || full_vals[k] > out.full.value) out.full = {full_vals[k], cubes[k], out.full.family, out.full.resolution};
    if (k == 0 || red_vals[k] > out.reduced.value) out.reduced = {red_vals[k], cubes[k], out.reduced.family, out.reduced.resolution};
    if (k == 0 || a1 > out.a1.value) out.a1 = {a1, cubes[k], out.a1.family, out.a1.resolution};
    out.reduced_min = std::min(out.reduced_min, red_vals[k]);
    out.factorization_residual = std::max(
        out.factorization_residual, relative_difference(full_vals[k], red_vals[k] * std::pow(a1, 1.0 / e.rho())));
  }
  out.forward_bound = out.reduced.value * std::pow(out.a1.value, 1.0 / e.rho());
  out.forward_ok = within(out.full.value, out.forward_bound);
  out.reverse_reduced_ok = within(out.reduced.value, out.full.value);
  out.reverse_a1_ok = within(std::pow(out.a1.value, 1.0 / e.rho()), out.full.value / out.reduced_min);
  return out;
}

double wm_cube_ratio(const Weight& w_m, const GridFunction& maximal_g, const Weight& u_m, const Weight& mu,
                     const ExponentSystem& e, const DyadicCube& Q) {
  const int m = e.m();
  const double inv_dm = e.inv_delta(m - 1);
  const double inv_dm1 = e.inv_delta(m);
  const GridFunction neg(w_m.grid(), map_values(w_m.values(), [&](double v) { return std::pow(v, -1.0 / e.p(m - 1)); }));
  const double lhs = normalized_weak_norm(neg, Q.box, inv_dm);
  const double rhs = std::pow(ess_bounds(maximal_g, Q).first, inv_dm) /
                     std::pow(ess_bounds(u_m.function(), Q).first, inv_dm1) *
                     std::pow(measure(mu, Q) / Q.volume(mu.grid()), inv_dm);
  return lhs / rhs;
}

ImpliBReport impli_b_construct(const std::vector<Weight>& leading, const Weight& u_m, const GridFunction& g,
                               const ExponentSystem& e, const CubeFamily& family) {
  const int m = e.m();
  if (static_cast<int>(leading.size()) != m - 1) throw ConfigError("impli_b_construct needs m - 1 leading weights");
  if (!(e.p(m - 1) > e.r(m - 1))) throw ConfigError("impli_b_construct requires p_m > r_m");
  if (g.is_zero()) throw ComputeError("impli_b_construct needs a nonzero g");
  const Grid& grid = u_m.grid();
  std::vector<double> mu_vals(grid.cell_count(), 1.0);
  for (int i = 0; i + 1 < m; ++i) {
    check_same_grid(leading[static_cast<std::size_t>(i)].grid(), grid, "impli_b_construct");
    const double ex = e.rho() / e.p(i);
    for (std::size_t c = 0; c < mu_vals.size(); ++c) mu_vals[c] *= std::pow(leading[static_cast<std::size_t>(i)][c], ex);
  }
  const Weight mu(grid, std::move(mu_vals));
  const GridFunction mg = maximal(g, family, &mu);
  const double inv_dm = e.inv_delta(m - 1);
  const double inv_dm1 = e.inv_delta(m);
  const double pm = e.p(m - 1);
  std::vector<double> wm(grid.cell_count());
  double residual = 0.0;
  for (std::size_t c = 0; c < wm.size(); ++c) {
    if (!(mg[c] > 0.0)) throw ComputeError("M_mu g vanishes on a cell; the family misses it");
    const double W_power = u_m[c] * std::pow(mg[c], -inv_dm / inv_dm1);  // W^{delta_{m+1}/r_m}
    wm[c] = std::pow(W_power, pm * inv_dm1) * std::pow(mu[c], -pm * inv_dm);
    const double direct = std::pow(u_m[c], -inv_dm1) * std::pow(mg[c], inv_dm) * std::pow(mu[c], inv_dm);
    residual = std::max(residual, relative_difference(std::pow(wm[c], -1.0 / pm), direct));
  }
  std::vector<Weight> all = leading;
  all.emplace_back(grid, std::move(wm));
  std::vector<Weight> reduced = leading;
  reduced.push_back(Weight::ones(grid));

  ImpliBReport out{WeightVector(std::move(all)), mu, a1_constant(u_m, mu, family), {}, {}, {}, residual};
  const Weight& w_last = out.assembled[static_cast<std::size_t>(m - 1)];
  out.wm_ratio =
      sup_over_family(family, [&](const DyadicCube& Q) { return wm_cube_ratio(w_last, mg, u_m, mu, e, Q); });
  out.assembled_apr = apr_constant(out.assembled, e, family);
  out.reduced_apr = apr_constant(WeightVector(std::move(reduced)), e.with_p(m - 1, e.r(m - 1)), family);
  return out;
}

EndpointResult endpoint_verify(std::span<const GridFunction> fs, const GridFunction& g, const WeightVector& vs,
                               const ExponentSystem& e) {
  const int m = e.m();
  if (static_cast<int>(fs.size()) != m || static_cast<int>(vs.size()) != m) {
    throw ConfigError("endpoint_verify: m functions and m weights are required");
  }
  const double rt = 1.0 / e.inv_r_tilde();
  std::vector<double> dens(g.size(), 1.0);
  for (int i = 0; i < m; ++i) {
    const double ex = rt / e.r(i);
    const auto v = vs[static_cast<std::size_t>(i)].values();
    for (std::size_t c = 0; c < dens.size(); ++c) dens[c] *= std::pow(v[c], ex);
  }
  EndpointResult out;
  out.lhs = weak_norm(g.values(), times_volume(g.grid(), std::move(dens)), rt);
  out.rhs = 1.0;
  for (int i = 0; i < m; ++i) {
    const LorentzIndex idx = LorentzIndex::strong(e.r(i), e.alpha(i) * e.r(i) / e.p(i));
    out.rhs *= lorentz_norm(fs[static_cast<std::size_t>(i)], vs[static_cast<std::size_t>(i)], idx);
  }
  out.constant = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
  return out;
}

}  // namespace mwlab
