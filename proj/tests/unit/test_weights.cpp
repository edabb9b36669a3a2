#include <doctest.h>

#include <string>

#include "mwlab/errors.hpp"
#include "mwlab/exponents.hpp"
#include "mwlab/generators.hpp"
#include "mwlab/maximal.hpp"
#include "mwlab/weights.hpp"
#include "oracles.hpp"

using namespace mwlab;

namespace {

Weight power(const Grid& g, double a) {
  WeightSpec s;
  s.kind = "power";
  s.params["a"] = a;
  return generate_weight(s, g);
}

double cube_mean(const Weight& w, const Box& Q, double e) {
  double s = 0.0;
  for (int c = Q.lo[0]; c < Q.hi[0]; ++c) s += std::pow(w[static_cast<std::size_t>(c)], e);
  return s / static_cast<double>(Q.hi[0] - Q.lo[0]);
}

double cube_min(const Weight& w, const Box& Q) {
  double m = kInf;
  for (int c = Q.lo[0]; c < Q.hi[0]; ++c) m = std::min(m, w[static_cast<std::size_t>(c)]);
  return m;
}

// sup_Q (avg prod w_i^{p/p_i})^{1/p} prod (avg w_i^{1-p_i'})^{1/p_i'} over the 1-d family.
double apvec_oracle(const std::vector<Weight>& ws, const std::vector<double>& p, int L, bool shifted) {
  double inv_p = 0.0;
  for (double x : p) inv_p += 1.0 / x;
  double best = 0.0;
  for (const auto& Q : oracle::family_intervals(L, shifted)) {
    double w_avg = 0.0;
    for (int c = Q.lo[0]; c < Q.hi[0]; ++c) {
      double w = 1.0;
      for (std::size_t i = 0; i < ws.size(); ++i) w *= std::pow(ws[i][static_cast<std::size_t>(c)], 1.0 / (inv_p * p[i]));
      w_avg += w;
    }
    double val = std::pow(w_avg / static_cast<double>(Q.hi[0] - Q.lo[0]), inv_p);
    for (std::size_t i = 0; i < ws.size(); ++i) {
      if (p[i] == 1.0) {
        val /= cube_min(ws[i], Q);
      } else {
        const double pc = p[i] / (p[i] - 1.0);
        val *= std::pow(cube_mean(ws[i], Q, 1.0 - pc), 1.0 / pc);
      }
    }
    best = std::max(best, val);
  }
  return best;
}

}  // namespace

TEST_CASE("exponent system derived quantities") {
  const ExponentSystem e = ExponentSystem::make({2.0, 3.0}, {1.0, 1.5, 1.0});
  CHECK(e.m() == 2);
  CHECK(e.inv_p() == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(e.inv_delta(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(e.inv_delta(1) == doctest::Approx(1.0 / 1.5 - 1.0 / 3.0).epsilon(1e-15));
  CHECK(e.inv_delta(2) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(e.inv_rho() == doctest::Approx(1.0 / 1.5 + 0.5).epsilon(1e-15));
  CHECK(e.inv_r_tilde() == doctest::Approx(1.0 + 1.0 / 1.5).epsilon(1e-15));
  CHECK(ExponentSystem::make({2.0, 2.0}, {2.0, 2.0, 1.0}).inv_delta(0) == 0.0);
  CHECK(e.identity_residual() <= 1e-12);
}

TEST_CASE("exponent system errors name the violated condition") {
  try {
    ExponentSystem::make({2.0, 2.0}, {3.0, 1.0, 1.0});
    FAIL("expected a configuration error");
  } catch (const ConfigError& err) {
    CHECK(std::string(err.what()).find("r_i <= p_i") != std::string::npos);
  }
  CHECK_THROWS_AS(ExponentSystem::make({0.5}, {1.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(ExponentSystem::make({2.0}, {1.0}), ConfigError);
  CHECK_THROWS_AS(ExponentSystem::make({2.0}, {1.0, 1.0}, {3.0}), ConfigError);
  // p < r'_{m+1}: p = 2 and r_2 = 2 gives r' = 2.
  CHECK_THROWS_AS(ExponentSystem::make({2.0}, {1.0, 2.0}), ConfigError);
}

TEST_CASE("off-diagonal exponent identities") {
  Rng rng(44);
  int checked = 0;
  for (int trial = 0; trial < 2000 && checked < 500; ++trial) {
    const double r0 = rng.uniform(1.0, 3.0);
    const double p0 = r0 * rng.uniform(1.0, 4.0);
    const double s0 = rng.bernoulli(0.3) ? kInf : rng.uniform(0.5, 20.0);
    const double q0 = rng.uniform(0.1, std::min(s0, 20.0));
    try {
      const OffDiagExponents x = OffDiagExponents::make(r0, p0, q0, s0, rng.uniform(0.1, 1.0) * p0);
      CHECK(std::abs(1.0 + x.beta() - q0 / x.q()) <= 1e-12 * (1 + q0 / x.q()));
      CHECK(std::abs(1.0 - x.q() * x.inv_s0() * (1.0 + x.beta()) - q0 * x.inv_delta0()) <= 1e-12);
      CHECK(x.identity_residual() <= 1e-12);
      ++checked;
    } catch (const ConfigError&) {
    }
  }
  CHECK(checked == 500);
  const OffDiagExponents x = OffDiagExponents::make(1.0, 2.0, 1.0, kInf, 1.0);
  CHECK(x.q() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(x.beta() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(OffDiagExponents::make(2.0, 1.0, 1.0, kInf, 1.0), ConfigError);
}

TEST_CASE("generators") {
  const Grid g = Grid::make(1, 6);
  const Weight flat = power(g, 0.0);
  for (double x : flat.values()) CHECK(x == 1.0);
  const Weight w = power(g, -0.5);
  for (int k = 0; k < 64; ++k) {
    const double a = k / 64.0, b = (k + 1) / 64.0;
    CHECK(w[static_cast<std::size_t>(k)] == doctest::Approx(2.0 * (std::sqrt(b) - std::sqrt(a)) / (b - a)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(power(g, -1.0), ConfigError);
  CHECK_THROWS_AS(power(Grid::make(2, 4), -0.6), ConfigError);
  WeightSpec bad;
  bad.kind = "sawtooth";
  CHECK_THROWS_AS(generate_weight(bad, g), ConfigError);

  WeightSpec rdf;
  rdf.kind = "rdf";
  rdf.seed = 7;
  rdf.params["k"] = 8;
  const Grid g8 = Grid::make(1, 8);
  const Weight r = generate_weight(rdf, g8);
  CHECK(r.min() > 0.0);
  const double a1 = a1_constant(r, CubeFamily(g8, true)).value;
  CHECK(a1 == doctest::Approx(oracle::golden("rdf_seed7_a1_L8")).epsilon(1e-12));
}

TEST_CASE("A1 constant") {
  const Grid g = Grid::make(1, 6);
  const CubeFamily fam(g, true);
  CHECK(a1_constant(Weight::ones(g), Weight::ones(g), fam).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a1_constant(Weight(GridFunction::constant(g, 7.0)), fam).value == doctest::Approx(1.0).epsilon(1e-12));
  // Continuum value 1/(1 + a) for x^a on [0, t].
  const Grid g12 = Grid::make(1, 12);
  const double v = a1_constant(power(g12, -0.5), CubeFamily(g12, true)).value;
  CHECK(v == doctest::Approx(2.0).epsilon(0.1));

  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const Grid h = Grid::make(1, 4);
    const Weight w = oracle::random_weight(h, rng), mu = oracle::random_weight(h, rng);
    double ref = 0.0;
    for (const auto& Q : oracle::family_intervals(4, true)) {
      double num = 0.0, den = 0.0;
      for (int c = Q.lo[0]; c < Q.hi[0]; ++c) {
        num += w[static_cast<std::size_t>(c)] * mu[static_cast<std::size_t>(c)];
        den += mu[static_cast<std::size_t>(c)];
      }
      ref = std::max(ref, num / den / cube_min(w, Q));
    }
    CHECK(relative_difference(a1_constant(w, mu, CubeFamily(h, true)).value, ref) <= 1e-12);
  }
}

TEST_CASE("A-infinity constant") {
  const Grid g = Grid::make(1, 6);
  const double unit = ainf_constant(Weight::ones(g), CubeFamily(g, true)).value;
  CHECK(unit >= 1.0);
  CHECK(unit == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<double> levels;
  for (int L : {8, 9, 10}) {
    const Grid h = Grid::make(1, L);
    levels.push_back(ainf_constant(power(h, -0.5), CubeFamily(h, true)).value);
  }
  CHECK(std::isfinite(levels[0]));
  CHECK(levels[1] / levels[0] <= 1.5);
  CHECK(levels[2] / levels[1] <= 1.5);
  CHECK(levels[0] / levels[1] <= 1.5);
}

TEST_CASE("A_p vector constant") {
  const Grid g = Grid::make(1, 10);
  const CubeFamily fam(g, true);
  const WeightVector ones({Weight::ones(g), Weight::ones(g)});
  CHECK(apvec_constant(ones, std::vector<double>{2.0, 3.0}, fam).value == doctest::Approx(1.0).epsilon(1e-12));
  const WeightVector pair({power(g, -0.25), Weight::ones(g)});
  const double v = apvec_constant(pair, std::vector<double>{1.0, 1.0}, fam).value;
  CHECK(std::isfinite(v));
  // Continuum value on [0, t]: (8/7)^2 t^{-1/4} / t^{-1/4} = 64/49.
  CHECK(v == doctest::Approx(64.0 / 49.0).epsilon(1e-3));
  CHECK(v == doctest::Approx(oracle::golden("apvec_quarter_L10")).epsilon(1e-12));
  const Weight w2 = power(g, 0.25);
  const WeightVector recip({pow(w2, -1.0), w2});
  CHECK(std::isfinite(apvec_constant(recip, std::vector<double>{2.0, 2.0}, fam).value));

  Rng rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const Grid h = Grid::make(1, 4);
    const std::vector<Weight> ws{oracle::random_weight(h, rng), oracle::random_weight(h, rng)};
    const std::vector<double> p{rng.bernoulli(0.3) ? 1.0 : rng.uniform(1.0, 4.0), rng.uniform(1.0, 4.0)};
    const double got = apvec_constant(WeightVector(ws), p, CubeFamily(h, true)).value;
    CHECK(relative_difference(got, apvec_oracle(ws, p, 4, true)) <= 1e-12);
  }
}

TEST_CASE("restricted vector constants") {
  const Grid g = Grid::make(1, 10);
  const CubeFamily fam(g, true);
  const WeightVector ones({Weight::ones(g), Weight::ones(g)});
  const ExponentSystem e = ExponentSystem::make({2.0, 2.0}, {1.0, 1.0, 1.0});
  CHECK(apr_constant(ones, e, fam).value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(apr_r1_constant(ones, std::vector<double>{2.0, 2.0}, fam).value == doctest::Approx(1.0).epsilon(1e-9));
  const WeightVector halves({power(g, 0.5), power(g, 0.5)});
  const double v = apr_constant(halves, e, fam).value;
  // Intervals at 0 give 2/3; short intervals away from 0 approach 1 from below.
  CHECK(v <= 1.0 + 1e-12);
  CHECK(v == doctest::Approx(oracle::golden("apr_halves_L10")).epsilon(1e-12));
  const WeightVector consts({Weight(GridFunction::constant(g, 3.0)), Weight(GridFunction::constant(g, 0.2))});
  CHECK(apr_constant(consts, ExponentSystem::make({2.0, 2.0}, {2.0, 2.0, 1.0}), fam).value ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("restricted r = 1 class at p = (1, 1) is the A_(1,1) class") {
  Rng rng(15);
  const Grid g = Grid::make(1, 6);
  const CubeFamily fam(g, true);
  const std::vector<double> p{1.0, 1.0};
  for (int trial = 0; trial < 20; ++trial) {
    const WeightVector ws({oracle::random_weight(g, rng), oracle::random_weight(g, rng)});
    CHECK(relative_difference(apr_r1_constant(ws, p, fam).value, apvec_constant(ws, p, fam).value) <= 1e-12);
  }
}

TEST_CASE("characteristic invariants on random vectors") {
  Rng rng(16);
  for (int trial = 0; trial < 25; ++trial) {
    const Grid g = Grid::make(1 + trial % 2, 4);
    const WeightVector ws({oracle::random_weight(g, rng), oracle::random_weight(g, rng)});
    const std::vector<double> p{rng.uniform(1.0, 3.0), rng.uniform(1.0, 3.0)};
    const ExponentSystem e = ExponentSystem::make(p, {1.0, 1.0, 1.0});
    const CubeFamily small(g, false), big(g, true);
    const double c1 = rng.uniform(0.1, 10.0), c2 = rng.uniform(0.1, 10.0);
    const WeightVector scaled({Weight(scale(ws[0].function(), c1)), Weight(scale(ws[1].function(), c2))});

    const double av = apvec_constant(ws, p, big).value;
    const double ar = apr_constant(ws, e, big).value;
    const double r1 = apr_r1_constant(ws, p, big).value;
    const double a1 = a1_constant(ws[0], ws[1], big).value;
    for (double x : {av, ar, r1, a1, ainf_constant(ws[0], big).value}) CHECK(x >= 1.0 - 1e-9);
    CHECK(relative_difference(apvec_constant(scaled, p, big).value, av) <= 1e-9);
    CHECK(relative_difference(apr_constant(scaled, e, big).value, ar) <= 1e-9);
    CHECK(relative_difference(apr_r1_constant(scaled, p, big).value, r1) <= 1e-9);
    CHECK(apvec_constant(ws, p, small).value <= av * (1 + 1e-12));
    CHECK(apr_constant(ws, e, small).value <= ar * (1 + 1e-12));
    CHECK(apr_r1_constant(ws, p, small).value <= r1 * (1 + 1e-12));
    // The two restricted forms agree within 2^4 either way.
    CHECK(ar / r1 <= 16.0);
    CHECK(r1 / ar <= 16.0);
  }
}

TEST_CASE("composite and reduced weights") {
  const Grid g = Grid::make(1, 4);
  Rng rng(18);
  const WeightVector ws({oracle::random_weight(g, rng), oracle::random_weight(g, rng), oracle::random_weight(g, rng)});
  const ExponentSystem e = ExponentSystem::make({2.0, 3.0, 4.0}, {1.0, 2.0, 1.5, 1.0});
  const Weight w = composite_weight(ws, e.p_vector());
  const Weight mu = reduced_measure(ws, e);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const double ref = std::pow(ws[0][i], e.p_total() / 2.0) * std::pow(ws[1][i], e.p_total() / 3.0) *
                       std::pow(ws[2][i], e.p_total() / 4.0);
    CHECK(relative_difference(w[i], ref) <= 1e-13);
    CHECK(relative_difference(mu[i], std::pow(std::pow(ws[0][i], 0.5) * std::pow(ws[1][i], 1.0 / 3.0), e.rho())) <= 1e-13);
  }
  const WeightVector single({ws[0]});
  const Weight unit = reduced_measure(single, ExponentSystem::make({2.0}, {1.0, 1.0}));
  for (double x : unit.values()) CHECK(x == 1.0);
}

TEST_CASE("hat constructions") {
  const Grid g = Grid::make(1, 6);
  const CubeFamily fam(g, true);
  Rng rng(19);
  const Weight u1 = oracle::random_weight(g, rng);
  const Weight mu = Weight::ones(g);
  const GridFunction gg = oracle::random_function(g, rng);

  const HatWeight r1 = hat_ar_construct(u1, gg, 1.0, mu, fam);
  for (std::size_t i = 0; i < g.cell_count(); ++i) CHECK(r1.v[i] == doctest::Approx(u1[i]).epsilon(1e-15));
  const HatWeight flat = hat_ar_construct(Weight::ones(g), GridFunction::constant(g, 1.0), 3.0, mu, fam);
  for (double x : flat.v.values()) CHECK(x == doctest::Approx(1.0).epsilon(1e-15));
  const GridFunction e = interval_indicator(g, 0.0, 0.125);
  const HatWeight two = hat_ar_construct(Weight::ones(g), e, 2.0, mu, CubeFamily(g, false));
  const std::vector<double> ev(e.values().begin(), e.values().end());
  const auto ref = oracle::maximal_1d(ev, oracle::ones(ev.size()), 6, false);
  for (std::size_t i = 0; i < g.cell_count(); ++i) CHECK(relative_difference(two.v[i], 1.0 / ref[i]) <= 1e-13);
  CHECK_THROWS_AS(hat_ar_construct(u1, GridFunction::zeros(g), 2.0, mu, fam), ComputeError);
  CHECK_THROWS_AS(hat_ar_construct(u1, gg, 0.5, mu, fam), ConfigError);

  const HatWeight q1 = hat_arq_construct(u1, gg, 1.0, 2.5, mu, fam);
  for (std::size_t i = 0; i < g.cell_count(); ++i) CHECK(relative_difference(q1.v[i], std::pow(u1[i], 1 / 2.5)) <= 1e-14);
  const HatWeight flat_q = hat_arq_construct(Weight::ones(g), GridFunction::constant(g, 1.0), 2.0, 3.0, mu, fam);
  for (double x : flat_q.v.values()) CHECK(x == doctest::Approx(1.0).epsilon(1e-15));
  const double r = 2.5, q = 1.7;
  const HatWeight gen = hat_arq_construct(u1, gg, r, q, mu, fam);
  const GridFunction mg = maximal(gg, fam, &mu);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const double rhs = u1[i] * std::pow(mg[i], 1.0 - (1.0 + q * (1.0 - 1.0 / r)));
    CHECK(relative_difference(std::pow(gen.v[i], q), rhs) <= 1e-12);
  }
}

TEST_CASE("composite restricted characteristic is controlled by a power of the vector one") {
  Rng rng(20);
  const Grid g = Grid::make(1, 6);
  const CubeFamily fam(g, true);
  int audited = 0;
  for (int trial = 0; trial < 200 && audited < 20; ++trial) {
    std::vector<double> p, r;
    const int m = static_cast<int>(rng.uniform_int(1, 3));
    for (int k = 0; k < m; ++k) {
      r.push_back(rng.uniform(1.0, 2.0));
      p.push_back(r.back() * rng.uniform(1.0, 3.0));
    }
    r.push_back(rng.uniform(1.0, 2.0));
    try {
      const ExponentSystem e = ExponentSystem::make(p, r);
      if (!(e.inv_r() > 1.0 + 1e-6)) continue;
      std::vector<Weight> ws;
      for (int k = 0; k < m; ++k) ws.push_back(oracle::random_weight(g, rng, 0.5, 2.0));
      const CompositeAudit rep = composite_audit(WeightVector(ws), e, fam);
      CHECK(rep.worst_cube_ratio <= rep.holder_constant * (1 + 1e-9));
      ++audited;
    } catch (const ConfigError&) {
    }
  }
  CHECK(audited == 20);
}
