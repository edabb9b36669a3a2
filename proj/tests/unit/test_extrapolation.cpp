#include <doctest.h>

#include "mwlab/errors.hpp"
#include "mwlab/extrapolation.hpp"
#include "mwlab/generators.hpp"
#include "mwlab/maximal.hpp"
#include "oracles.hpp"

using namespace mwlab;

namespace {

double objective(double A, double B, double r0, double beta, double g) {
  return A * std::pow(g, -r0) + B * std::pow(g, r0 * beta);
}

// Golden-section search in log gamma.
double golden_min(double A, double B, double r0, double beta) {
  double lo = -40.0, hi = 40.0;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 300; ++it) {
    const double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    if (objective(A, B, r0, beta, std::exp(a)) < objective(A, B, r0, beta, std::exp(b))) {
      hi = b;
    } else {
      lo = a;
    }
  }
  return objective(A, B, r0, beta, std::exp(0.5 * (lo + hi)));
}

Weight power(const Grid& g, double a) {
  WeightSpec s;
  s.kind = "power";
  s.params["a"] = a;
  return generate_weight(s, g);
}

}  // namespace

TEST_CASE("gamma optimization") {
  GammaChoice c = gamma_optimize(1.0, 1.0, 1.0, 1.0);
  CHECK(c.gamma == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c.value == doctest::Approx(2.0).epsilon(1e-14));
  c = gamma_optimize(16.0, 1.0, 1.0, 1.0);
  CHECK(c.gamma == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(c.value == doctest::Approx(8.0).epsilon(1e-14));
  CHECK_THROWS_AS(gamma_optimize(0.0, 1.0, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(gamma_optimize(1.0, 1.0, 1.0, 0.0), ConfigError);

  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const double A = std::exp(rng.uniform(-5.0, 5.0)), B = std::exp(rng.uniform(-5.0, 5.0));
    const double r0 = rng.uniform(1.0, 3.0), beta = rng.uniform(0.05, 3.0);
    const GammaChoice g = gamma_optimize(A, B, r0, beta);
    CHECK(relative_difference(g.value, golden_min(A, B, r0, beta)) <= 1e-6);
    CHECK(g.value <= gamma_grid_minimum(A, B, r0, beta, g.gamma, 4.0, 41) * (1 + 1e-12));
  }
}

TEST_CASE("H and the auxiliary weight") {
  Rng rng(32);
  const Grid g = Grid::make(1, 6);
  const CubeFamily fam(g, true);
  const OffDiagExponents x = OffDiagExponents::make(1.5, 3.0, 1.0, 4.0, 2.0);
  const GridFunction f = oracle::random_function(g, rng);
  const Weight w = oracle::random_weight(g, rng), mu = oracle::random_weight(g, rng);
  const GridFunction H = build_H(f, w, mu, x);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const double ref = std::pow(f[i], 1.5) * std::pow(w[i], 1.0 - x.delta1() / 1.5) / mu[i];
    CHECK(std::abs(H[i] - ref) <= 1e-13 * std::max(1.0, ref));
  }
  const AuxWeight v = construct_v(w, H, mu, x, fam);
  CHECK(v.identity_residual <= 1e-12);
  const GridFunction mh = maximal(H, fam, &mu);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const double ref = std::pow(w[i], x.delta1() / x.delta0()) * std::pow(mh[i], -x.inv_dual_ratio());
    CHECK(relative_difference(v.v[i], ref) <= 1e-12);
  }
  CHECK_THROWS_AS(construct_v(w, GridFunction::zeros(g), mu, x, fam), ComputeError);

  // p0 = r0: v = w^{delta1/delta0}.
  const OffDiagExponents deg = OffDiagExponents::make(2.0, 2.0, 1.0, kInf, 2.0);
  CHECK(deg.degenerate());
  const AuxWeight vd = construct_v(w, build_H(f, w, mu, deg), mu, deg, fam);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    CHECK(relative_difference(vd.v[i], std::pow(w[i], deg.delta1() / deg.delta0())) <= 1e-13);
  }
}

TEST_CASE("E/F split") {
  Rng rng(33);
  const Grid g = Grid::make(1, 7);
  const OffDiagExponents x = OffDiagExponents::make(1.0, 2.0, 1.0, kInf, 1.0);
  const GridFunction f = oracle::random_function(g, rng), gg = oracle::random_function(g, rng);
  const OffDiagContext ctx(f, gg, oracle::random_weight(g, rng), oracle::random_weight(g, rng), x, CubeFamily(g, true));
  for (double y : default_y_grid(gg)) {
    for (double gamma : {0.25, 1.0, 4.0}) {
      const EFMasks m = split_EF(ctx, y, gamma);
      CHECK(masks_cover_and_disjoint(m, gg, y));
      const double t = std::pow(gamma * y, x.r0());
      for (std::size_t i = 0; i < g.cell_count(); ++i) {
        CHECK(m.E[i] == (ctx.phi()[i] > t));
        CHECK(m.F[i] == (ctx.phi()[i] <= t && gg[i] > y));
      }
    }
  }
  // Extreme thresholds empty one side.
  const EFMasks none = split_EF(ctx, 1e300, 1.0);
  for (bool b : none.E) CHECK(!b);
  for (bool b : none.F) CHECK(!b);
  const EFMasks all = split_EF(ctx, 1e-300, 1e-10);
  for (bool b : all.F) CHECK(!b);
}

TEST_CASE("off-diagonal pipeline") {
  Rng rng(34);
  const Grid g = Grid::make(1, 7);
  const CubeFamily fam(g, true);
  const OffDiagExponents x = OffDiagExponents::make(1.0, 2.0, 1.0, kInf, 1.0);
  const Weight w = pow(power(g, -0.3), x.r0() / x.delta1());
  const Weight mu = power(g, 0.2);

  const OffDiagContext vacuous(oracle::random_function(g, rng), GridFunction::zeros(g), w, mu, x, fam);
  CHECK(default_y_grid(vacuous.g()).empty());
  const OffDiagReport empty = offdiag_verify(vacuous, {});
  CHECK(empty.pass);
  CHECK(empty.rows.empty());

  const GridFunction f = oracle::random_function(g, rng, 0.2);
  const GridFunction mh = maximal(build_H(f, w, mu, x), fam, &mu);
  // Weak extremal for the hypothesis measure: g = level-set indicator of (M H)^{-1}.
  const OffDiagContext ctx(f, mh, w, mu, x, fam);
  const auto ys = default_y_grid(ctx.g());
  CHECK(ys.size() == 7);
  const OffDiagReport rep = offdiag_verify(ctx, ys);
  CHECK(rep.rows.size() == ys.size());
  CHECK(rep.v_identity_residual <= 1e-12);
  for (const auto& row : rep.rows) {
    CHECK(row.masks_ok);
    CHECK(row.chains_ok);
    CHECK(row.gamma_ok);
    CHECK(row.bound_ok);
    CHECK(row.lhs <= row.bound * (1 + 1e-9));
  }
}

TEST_CASE("Sawyer ratio") {
  const Grid g = Grid::make(1, 8);
  const CubeFamily dyadic(g, false);
  const Weight one = Weight::ones(g);
  for (int k = 1; k <= 8; ++k) {
    const SawyerResult s = sawyer_ratio(interval_indicator(g, 0.0, 1.0 / (1 << k)), one, one, one, dyadic);
    CHECK(s.ratio <= 1.0 + 1e-12);
    CHECK(s.rhs == doctest::Approx(1.0 / (1 << k)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(sawyer_ratio(GridFunction::zeros(g), one, one, one, dyadic), ComputeError);
  Rng rng(35);
  const GridFunction f = oracle::random_function(g, rng);
  const double c = 3.5;
  const SawyerResult a = sawyer_ratio(f, one, one, one, dyadic);
  const SawyerResult b = sawyer_ratio(scale(f, c), one, one, one, dyadic);
  CHECK(relative_difference(a.ratio, b.ratio) <= 1e-13);
}

TEST_CASE("factorization of restricted vector weights") {
  const Grid g = Grid::make(1, 8);
  const CubeFamily fam(g, true);
  const ExponentSystem e = ExponentSystem::make({2.0, 1.5}, {1.0, 1.5, 1.0});
  const WeightVector ones({Weight::ones(g), Weight::ones(g)});
  const ImpliAReport r = impli_a_check(ones, e, fam);
  CHECK(r.full.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.reduced.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.a1.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.forward_ok);
  CHECK(r.factorization_residual <= 1e-12);
  CHECK_THROWS_AS(impli_a_check(ones, ExponentSystem::make({2.0, 3.0}, {1.0, 1.5, 1.0}), fam), ConfigError);

  Rng rng(36);
  for (int trial = 0; trial < 10; ++trial) {
    const WeightVector ws({oracle::random_weight(g, rng, 0.5, 2.0), oracle::random_weight(g, rng, 0.5, 2.0)});
    const ImpliAReport q = impli_a_check(ws, e, fam);
    CHECK(q.forward_ok);
    CHECK(q.factorization_residual <= 1e-9);
  }

  const ExponentSystem eb = ExponentSystem::make({2.0, 3.0}, {1.0, 1.5, 1.0});
  const GridFunction gg = oracle::random_function(g, rng, 0.3);
  const ImpliBReport b = impli_b_construct({Weight::ones(g)}, Weight::ones(g), gg, eb, fam);
  CHECK(b.identity_residual <= 1e-12);
  CHECK(std::isfinite(b.assembled_apr.value));
  CHECK(b.wm_ratio.value >= 0.0);
}

TEST_CASE("endpoint conclusion") {
  const Grid g = Grid::make(1, 6);
  const ExponentSystem e = ExponentSystem::make({2.0, 2.0}, {1.0, 1.0, 1.0}, {1.0, 1.0});
  const std::vector<GridFunction> fs{GridFunction::constant(g, 1.0), GridFunction::constant(g, 1.0)};
  const WeightVector vs({Weight::ones(g), Weight::ones(g)});
  const EndpointResult r = endpoint_verify(fs, GridFunction::constant(g, 1.0), vs, e);
  CHECK(r.lhs == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(r.rhs == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(r.constant == doctest::Approx(1.0).epsilon(1e-13));
  // Homogeneous in g.
  const EndpointResult s = endpoint_verify(fs, GridFunction::constant(g, 3.0), vs, e);
  CHECK(s.constant == doctest::Approx(3.0).epsilon(1e-13));
}
