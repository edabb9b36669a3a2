#include <doctest.h>

#include "mwlab/errors.hpp"
#include "mwlab/generators.hpp"
#include "mwlab/maximal.hpp"
#include "mwlab/weights.hpp"
#include "oracles.hpp"

using namespace mwlab;

TEST_CASE("maximal function of constants") {
  for (int d : {1, 2}) {
    const Grid g = Grid::make(d, 4);
    const GridFunction c = GridFunction::constant(g, 0.3);
    Rng rng(1);
    const Weight mu = oracle::random_weight(g, rng);
    for (bool shifted : {false, true}) {
      const CubeFamily fam(g, shifted);
      const GridFunction plain = maximal(c, fam), weighted = maximal(c, fam, &mu);
      for (double x : plain.values()) CHECK(x == 0.3);
      for (double x : weighted.values()) CHECK(x == 0.3);
    }
  }
}

TEST_CASE("maximal function of a half indicator") {
  const Grid g = Grid::make(1, 3);
  const GridFunction m = maximal(interval_indicator(g, 0.0, 0.5), CubeFamily(g, false));
  for (std::size_t i = 4; i < 8; ++i) CHECK(m[i] == 0.5);
  for (std::size_t i = 0; i < 4; ++i) CHECK(m[i] == 1.0);
}

TEST_CASE("maximal function agrees with the exhaustive cube scan") {
  Rng rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    const int L = 3 + trial % 4;
    const Grid g = Grid::make(1, L);
    const bool shifted = trial % 3 != 0;
    const GridFunction f = oracle::random_function(g, rng);
    const Weight mu = trial % 2 ? oracle::random_weight(g, rng) : Weight::ones(g);
    const std::vector<double> fv(f.values().begin(), f.values().end());
    const std::vector<double> mv(mu.values().begin(), mu.values().end());
    const auto ref = oracle::maximal_1d(fv, mv, L, shifted);
    const GridFunction got = maximal(f, CubeFamily(g, shifted), &mu);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(relative_difference(got[i], ref[i]) <= 1e-13);
  }
}

TEST_CASE("maximal function properties") {
  Rng rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    const Grid g = Grid::make(1 + trial % 2, 4);
    const GridFunction f = oracle::random_function(g, rng);
    const GridFunction h = oracle::random_function(g, rng);
    const Weight mu = oracle::random_weight(g, rng);
    const GridFunction small = maximal(f, CubeFamily(g, false), &mu);
    const GridFunction big = maximal(f, CubeFamily(g, true), &mu);
    const GridFunction m = multilinear_maximal(std::vector<GridFunction>{f, h}, CubeFamily(g, true));
    const GridFunction mf = maximal(f, CubeFamily(g, true)), mh = maximal(h, CubeFamily(g, true));
    const GridFunction scaled =
        multilinear_maximal(std::vector<GridFunction>{scale(f, 0.25), scale(h, 8.0)}, CubeFamily(g, true));
    for (std::size_t i = 0; i < f.size(); ++i) {
      CHECK(small[i] >= f[i]);
      CHECK(big[i] >= small[i]);
      CHECK(m[i] <= mf[i] * mh[i] * (1 + 1e-13));
      CHECK(scaled[i] == 2.0 * m[i]);
    }
  }
}

TEST_CASE("multilinear maximal examples") {
  const Grid g = Grid::make(1, 6);
  const CubeFamily fam(g, false);
  const GridFunction one = GridFunction::constant(g, 1.0);
  const GridFunction m = multilinear_maximal(std::vector<GridFunction>{interval_indicator(g, 0.0, 1.0 / 16), one}, fam);
  for (std::size_t i = 32; i < 64; ++i) CHECK(m[i] == 0.0625);
  const GridFunction c = multilinear_maximal(
      std::vector<GridFunction>{GridFunction::constant(g, 3.0), GridFunction::constant(g, 0.5)}, CubeFamily(g, true));
  for (double x : c.values()) CHECK(x == 1.5);
  const GridFunction mm = multilinear_maximal(std::vector<GridFunction>{one, one}, fam);
  for (double x : mm.values()) CHECK(x == 1.0);
  CHECK_THROWS_AS(multilinear_maximal(std::vector<GridFunction>{}, fam), ComputeError);
}

TEST_CASE("local and global split") {
  const Grid g = Grid::make(1, 8);
  WeightSpec s;
  s.kind = "power";
  s.params["a"] = 0.5;
  const Weight mu = generate_weight(s, g);
  const CubeFamily fam(g, true);
  const DyadicCube Q = dyadic_cube(g, 3, {3, 0});
  // Supported in 3Q: the local term dominates.
  std::vector<double> v(g.cell_count(), 0.0);
  for (int i = 70; i < 90; ++i) v[static_cast<std::size_t>(i)] = 1.0;
  const SplitReport inside = local_global_split_check(GridFunction(g, v), mu, Q, fam);
  CHECK(inside.upper <= 2.0);
  // Far away: M(g chi_3Q) = 0 and the quotient is at least 1.
  std::fill(v.begin(), v.end(), 0.0);
  for (int i = 240; i < 256; ++i) v[static_cast<std::size_t>(i)] = 1.0;
  const SplitReport outside = local_global_split_check(GridFunction(g, v), mu, Q, fam);
  CHECK(outside.lower >= 1.0);

  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const GridFunction f = oracle::random_function(g, rng, 0.8);
    if (f.is_zero()) continue;
    const auto cubes = fam.cubes();
    const DyadicCube& R = cubes[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(cubes.size()) - 1))];
    const SplitReport r = local_global_split_check(f, mu, R, fam);
    CHECK(r.upper <= 4.0);
    CHECK(r.lower >= 0.25);
  }
}

TEST_CASE("Rubio de Francia iteration") {
  const Grid g = Grid::make(1, 8);
  const CubeFamily fam(g, true);
  const RdfResult unit = rdf_iterate(GridFunction::constant(g, 1.0), 6, fam);
  CHECK(unit.weight.max() == unit.weight.min());
  CHECK(a1_constant(unit.weight, fam).value == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<bool> cell(g.cell_count(), false);
  cell[77] = true;
  const RdfResult spike = rdf_iterate(indicator(g, cell), 8, fam);
  const double a1 = a1_constant(spike.weight, fam).value;
  CHECK(a1 >= 1.0);
  CHECK(a1 <= 2.0 * spike.K * 1.01);
  CHECK(a1 == doctest::Approx(oracle::golden("rdf_spike_a1_L8")).epsilon(1e-12));
  CHECK(spike.weight.min() > 0.0);

  // Consecutive iterates differ by at most the geometric tail.
  const RdfResult k7 = rdf_iterate(indicator(g, cell), 7, fam);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    CHECK(std::abs(spike.weight[i] - k7.weight[i]) <= std::pow(2.0 * spike.K, -8.0) * spike.weight.max() * 1.0001 +
                                                           std::ldexp(spike.weight.max(), -40));
  }
  CHECK_THROWS_AS(rdf_iterate(GridFunction::zeros(g), 3, fam), ComputeError);
  CHECK_THROWS_AS(rdf_iterate(GridFunction::constant(g, 1.0), 13, fam), ConfigError);
}
