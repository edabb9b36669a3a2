#include <doctest.h>

#include "mwlab/applications.hpp"
#include "mwlab/errors.hpp"
#include "mwlab/generators.hpp"
#include "mwlab/lorentz.hpp"
#include "oracles.hpp"

using namespace mwlab;

namespace {

double kernel(long k, double dy, int power) {
  const long a = std::labs(k);
  if (a == 1) {
    // Midpoint average of y^{-power} over [dy/2, 3dy/2].
    constexpr int n = 200000;
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += std::pow(dy * (0.5 + (j + 0.5) / n), -power);
    return s / n;
  }
  return std::pow(static_cast<double>(a) * dy, -power);
}

// N or N* at one cell by direct enumeration of offsets.
double offset_oracle(const std::vector<double>& product, std::size_t cell, int power) {
  const double dy = 1.0 / static_cast<double>(product.size());
  std::vector<double> v, m;
  for (std::size_t j = 0; j < product.size(); ++j) {
    if (j == cell) continue;
    v.push_back(product[j] * kernel(static_cast<long>(j) - static_cast<long>(cell), dy, power));
    m.push_back(dy);
  }
  return oracle::weak_norm(v, m, 1.0 / power);
}

std::vector<double> product(const GridFunction& f, const GridFunction& g) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f[i] * g[i];
  return out;
}

}  // namespace

TEST_CASE("N on a single spike") {
  const Grid g = Grid::make(1, 6);
  std::vector<bool> mask(64, false);
  mask[20] = true;
  const GridFunction e = indicator(g, mask);
  const GridFunction n = operator_N(e, e);
  CHECK(n[20] == 0.0);
  CHECK(n[19] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(n[21] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  for (int k = 2; k < 40; ++k) CHECK(n[static_cast<std::size_t>(20 + k)] == doctest::Approx(1.0 / (k * k)).epsilon(1e-13));
  const GridFunction s = operator_Nstar(e);
  CHECK(s[21] == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  for (int k = 2; k < 20; ++k) CHECK(s[static_cast<std::size_t>(20 - k)] == doctest::Approx(1.0 / k).epsilon(1e-13));
  CHECK_THROWS_AS(operator_N(GridFunction::zeros(Grid::make(2, 3)), GridFunction::zeros(Grid::make(2, 3))),
                  ConfigError);
  CHECK(operator_N(GridFunction::zeros(g), e).max() == 0.0);
}

TEST_CASE("N and N* against direct enumeration") {
  Rng rng(51);
  const Grid g = Grid::make(1, 6);
  for (int trial = 0; trial < 10; ++trial) {
    const GridFunction f = oracle::random_function(g, rng), h = oracle::random_function(g, rng);
    const GridFunction n = operator_N(f, h), s = operator_Nstar(f);
    const auto fh = product(f, h);
    const std::vector<double> fv(f.values().begin(), f.values().end());
    for (std::size_t c = 0; c < 64; c += 7) {
      CHECK(relative_difference(n[c], offset_oracle(fh, c, 2)) <= 1e-9);
      CHECK(relative_difference(s[c], offset_oracle(fv, c, 1)) <= 1e-9);
      CHECK(n[c] == operator_N_at(f, h, c));
    }
  }
}

TEST_CASE("N symmetries") {
  Rng rng(52);
  const Grid g = Grid::make(1, 7);
  for (int trial = 0; trial < 10; ++trial) {
    const GridFunction f = oracle::random_function(g, rng), h = oracle::random_function(g, rng);
    const GridFunction n = operator_N(f, h);
    const GridFunction scaled = operator_N(scale(f, 2.0), scale(h, 4.0));
    const GridFunction swapped = operator_N(h, f);
    const GridFunction t = operator_T(f, h);
    for (std::size_t i = 0; i < n.size(); ++i) {
      CHECK(scaled[i] == 8.0 * n[i]);
      CHECK(swapped[i] == n[i]);
      CHECK(t[i] == std::sqrt(n[i]));
    }
  }
}

TEST_CASE("hypothesis check") {
  const Grid g = Grid::make(1, 7);
  const CubeFamily fam(g, true);
  std::vector<bool> E(128, false), F(128, false);
  for (int i = 16; i < 48; ++i) E[static_cast<std::size_t>(i)] = true;
  for (int i = 40; i < 80; ++i) F[static_cast<std::size_t>(i)] = true;
  const HypothesisReport a = hypothesis_check(E, F, 1.0, 1.0, 0.5, g, fam);
  const HypothesisReport b = hypothesis_check(E, F, 2.0, 3.0, 0.5, g, fam);
  CHECK(relative_difference(a.ratio, b.ratio) <= 1e-12);
  CHECK(a.ratio <= 4.0);
  CHECK(a.ratio > 0.0);
  CHECK_THROWS_AS(hypothesis_check(E, F, 0.0, 1.0, 0.5, g, fam), ConfigError);
  const std::vector<bool> none(128, false);
  CHECK(hypothesis_check(none, F, 1.0, 1.0, 0.5, g, fam).ratio == 0.0);
}

TEST_CASE("layer decomposition") {
  Rng rng(53);
  const Grid g = Grid::make(1, 6);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(64);
    for (auto& x : v) x = rng.bernoulli(0.2) ? 0.0 : std::exp2(rng.uniform(-6.0, 6.0));
    v[3] = 4.0;
    const GridFunction f(g, v);
    const LayerDecomposition dec = layer_decompose(f);
    const GridFunction fl = layer_floor(dec, g);
    for (std::size_t i = 0; i < 64; ++i) {
      if (v[i] == 0.0) {
        CHECK(fl[i] == 0.0);
        continue;
      }
      CHECK(fl[i] == std::exp2(std::floor(std::log2(v[i]))));
      CHECK(fl[i] <= v[i]);
      CHECK(v[i] < 2.0 * fl[i]);
    }
    CHECK(fl[3] == 4.0);
    for (std::size_t k = 1; k < dec.layers.size(); ++k) CHECK(dec.layers[k - 1] < dec.layers[k]);
  }
  CHECK(layer_decompose(GridFunction::zeros(g)).layers.empty());
}

TEST_CASE("layer bound and endpoint corollary") {
  const Grid g = Grid::make(1, 6);
  const CubeFamily fam(g, true);
  const WeightVector ones({Weight::ones(g), Weight::ones(g)});
  const GridFunction e = interval_indicator(g, 0.25, 0.5);
  const LayerBoundReport t = theorem41_bound_check(e, e, ones, 4.0, fam);
  // One layer: the layer sum equals the Lorentz product for indicators.
  CHECK(t.layer_ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.layer_sum == doctest::Approx(std::pow(0.25, 1.0 / 4.0)).epsilon(1e-12));
  CHECK(t.audit.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(theorem41_bound_check(e, e, ones, 1.0, fam), ConfigError);

  const CorollaryReport z = corollary_endpoint_check(GridFunction::zeros(g), e, ones, 4.0, fam);
  CHECK(z.lhs == 0.0);
  CHECK(z.constant == 0.0);
  const GridFunction one = GridFunction::constant(g, 1.0);
  const CorollaryReport u = corollary_endpoint_check(one, one, ones, 4.0, fam);
  CHECK(u.rhs == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(u.lhs == doctest::Approx(weak_norm(operator_N(one, one), Weight::ones(g), 0.5)).epsilon(1e-15));
  const CorollaryReport h = corollary_endpoint_check(scale(one, 2.0), one, ones, 4.0, fam);
  CHECK(relative_difference(h.constant, u.constant) <= 1e-12);
}

TEST_CASE("series of truncated maximal operators") {
  Rng rng(54);
  const Grid g = Grid::make(1, 6);
  const std::vector<GridFunction> fs{oracle::random_function(g, rng), oracle::random_function(g, rng)};
  const WeightVector ws({oracle::random_weight(g, rng, 0.5, 2.0), oracle::random_weight(g, rng, 0.5, 2.0)});
  const std::vector<double> p{3.0, 3.0};
  const std::vector<double> single{0.5};
  const SeriesReport one = series_sum_check(fs, ws, p, single, true);
  REQUIRE(one.components.size() == 1);
  CHECK(one.aggregate == one.components[0]);
  CHECK(one.pass);
  const SeriesReport none = series_sum_check(fs, ws, p, {}, true);
  CHECK(none.components.empty());
  CHECK(none.aggregate == 0.0);
  std::vector<double> c;
  for (int j = 0; j < 6; ++j) c.push_back(std::exp2(-j));
  const SeriesReport many = series_sum_check(fs, ws, p, c, true);
  CHECK(many.components.size() == 6);
  CHECK(many.pass);
  CHECK_THROWS_AS(series_sum_check(fs, ws, std::vector<double>{2.0, 2.0}, c, true), ConfigError);
}

TEST_CASE("spike families and N* growth") {
  const Grid g = Grid::make(1, 8);
  for (int n : {1, 3, 16, 256}) {
    const GridFunction f = spike_family(g, n);
    CHECK(integrate(f, domain_box(g)) == doctest::Approx(1.0).epsilon(1e-14));
    int nonzero = 0;
    for (double x : f.values()) nonzero += x > 0.0;
    CHECK(nonzero == n);
  }
  CHECK_THROWS_AS(spike_family(g, 0), ConfigError);
  CHECK_THROWS_AS(spike_family(g, 257), ConfigError);
  const std::vector<int> counts{1, 4, 16};
  const auto rows = nstar_growth(g, counts);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) CHECK(r.ratio > 0.0);
  // N* is positively homogeneous of degree one.
  const GridFunction f = spike_family(g, 4);
  const GridFunction a = operator_Nstar(f), b = operator_Nstar(scale(f, 5.0));
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(relative_difference(b[i], 5.0 * a[i]) <= 1e-15);
}
