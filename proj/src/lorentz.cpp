#include "mwlab/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mwlab/errors.hpp"
#include "mwlab/numeric.hpp"

namespace mwlab {

namespace {

struct Level {
  double value;
  double cumulative;  // m({x >= value})
};

// Distinct positive values in decreasing order with the cumulative mass of
// {x >= value}.
std::vector<Level> descending_levels(std::span<const double> values, std::span<const double> masses) {
  if (values.size() != masses.size()) throw ComputeError("values and masses differ in length");
  std::vector<std::size_t> order;
  order.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > 0.0) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] > values[b] || (values[a] == values[b] && a < b);
  });
  std::vector<Level> out;
  KahanSum mass;
  for (std::size_t j = 0; j < order.size(); ++j) {
    mass.add(masses[order[j]]);
    const double v = values[order[j]];
    if (j + 1 == order.size() || values[order[j + 1]] != v) out.push_back({v, mass.value()});
  }
  return out;
}

void check_exponent(double p, const char* name) {
  if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError(std::string(name) + " must be a positive finite number");
}

}  // namespace

double weak_norm(std::span<const double> values, std::span<const double> masses, double p) {
  check_exponent(p, "weak norm exponent p");
  double best = 0.0;
  for (const auto& lvl : descending_levels(values, masses)) {
    best = std::max(best, lvl.value * std::pow(lvl.cumulative, 1.0 / p));
  }
  return best;
}

double lorentz_norm(std::span<const double> values, std::span<const double> masses, LorentzIndex idx) {
  if (idx.is_weak()) return weak_norm(values, masses, idx.p);
  check_exponent(idx.p, "Lorentz exponent p");
  const double q = *idx.q;
  check_exponent(q, "Lorentz exponent q");
  const auto levels = descending_levels(values, masses);
  KahanSum sum;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const double next = (k + 1 < levels.size()) ? levels[k + 1].value : 0.0;
    sum.add(std::pow(levels[k].cumulative, q / idx.p) * (std::pow(levels[k].value, q) - std::pow(next, q)));
  }
  return std::pow(sum.value(), 1.0 / q);
}

double layer_cake_integral(std::span<const double> values, std::span<const double> masses, double s_exponent,
                           double mass_power) {
  if (!(s_exponent > -1.0)) throw ConfigError("layer cake integral needs s_exponent > -1");
  const double e = s_exponent + 1.0;
  const auto levels = descending_levels(values, masses);
  KahanSum sum;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const double next = (k + 1 < levels.size()) ? levels[k + 1].value : 0.0;
    sum.add(std::pow(levels[k].cumulative, mass_power) * (std::pow(levels[k].value, e) - std::pow(next, e)) / e);
  }
  return sum.value();
}

std::vector<double> cell_masses(const Weight& w) {
  const double vol = w.grid().cell_volume();
  return map_values(w.values(), [vol](double x) { return x * vol; });
}

double weak_norm(const GridFunction& f, const Weight& w, double p) {
  check_same_grid(f.grid(), w.grid(), "weak_norm");
  return weak_norm(f.values(), cell_masses(w), p);
}

double lorentz_norm(const GridFunction& f, const Weight& w, LorentzIndex idx) {
  check_same_grid(f.grid(), w.grid(), "lorentz_norm");
  return lorentz_norm(f.values(), cell_masses(w), idx);
}

namespace {

// v^{-1} on the cells of Q together with the cell masses of v dx.
void gather_reciprocal(const Weight& v, const Box& box, std::vector<double>& recip, std::vector<double>& mass) {
  recip.clear();
  mass.clear();
  const double vol = v.grid().cell_volume();
  for_each_cell(v.grid(), box, [&](std::size_t i) {
    recip.push_back(1.0 / v[i]);
    mass.push_back(v[i] * vol);
  });
}

}  // namespace

double restricted_cube_norm(const Weight& v, const DyadicCube& Q, std::optional<double> q) {
  if (!q) return 1.0 / ess_bounds(v.function(), Q).first;
  if (!(*q >= 1.0)) throw ConfigError("restricted cube norm needs q >= 1");
  std::vector<double> recip, mass;
  gather_reciprocal(v, Q.box, recip, mass);
  const double inv_volume = 1.0 / Q.volume(v.grid());
  for (auto& m : mass) m *= inv_volume;
  return weak_norm(recip, mass, *q);
}

double normalized_weak_norm(const GridFunction& h, const Box& box, double inv_exponent) {
  if (inv_exponent == 0.0) return ess_bounds(h.values(), h.grid(), box).second;
  if (!(inv_exponent > 0.0)) throw ConfigError("normalized weak norm needs a positive exponent");
  std::vector<double> vals;
  vals.reserve(box.cell_count());
  for_each_cell(h.grid(), box, [&](std::size_t i) { vals.push_back(h[i]); });
  const std::vector<double> masses(vals.size(), 1.0 / static_cast<double>(vals.size()));
  return weak_norm(vals, masses, 1.0 / inv_exponent);
}

double cube_weak_norm(const Weight& v, const DyadicCube& Q, double q) {
  std::vector<double> recip, mass;
  gather_reciprocal(v, Q.box, recip, mass);
  return weak_norm(recip, mass, q);
}

double dyadic_level_sup(const Weight& v, const DyadicCube& Q, double q) {
  if (!(q >= 1.0)) throw ConfigError("dyadic level sup needs q >= 1");
  std::vector<double> recip, mass;
  gather_reciprocal(v, Q.box, recip, mass);
  // Ascending values with prefix masses: prefix[j] = mass of the first j.
  std::vector<std::size_t> order(recip.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return recip[a] < recip[b]; });
  std::vector<double> sorted(order.size()), prefix(order.size() + 1, 0.0);
  KahanSum acc;
  for (std::size_t j = 0; j < order.size(); ++j) {
    sorted[j] = recip[order[j]];
    acc.add(mass[order[j]]);
    prefix[j + 1] = acc.value();
  }
  // Left limit at breakpoint d of t * v({t < u <= 2t}) is d * v({d <= u < 2d}).
  auto band = [&](double d) {
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), d) - sorted.begin();
    const auto hi = std::lower_bound(sorted.begin(), sorted.end(), 2.0 * d) - sorted.begin();
    return prefix[static_cast<std::size_t>(hi)] - prefix[static_cast<std::size_t>(lo)];
  };
  double best = 0.0;
  for (double a : sorted) {
    for (double d : {a, 0.5 * a}) {
      const double m = band(d);
      if (m > 0.0) best = std::max(best, d * std::pow(m, 1.0 / q));
    }
  }
  return best;
}

double dyadic_level_sup_ladder(const Weight& v, const DyadicCube& Q, double q, int substeps) {
  if (!(q >= 1.0)) throw ConfigError("dyadic level sup needs q >= 1");
  if (substeps < 1) throw ConfigError("ladder substeps must be positive");
  std::vector<double> recip, mass;
  gather_reciprocal(v, Q.box, recip, mass);
  const auto [lo, hi] = std::minmax_element(recip.begin(), recip.end());
  const double floor_t = *lo / 2.0;
  double best = 0.0;
  for (int j = 0;; ++j) {
    const double t = *hi * std::exp2(-static_cast<double>(j) / substeps);
    if (t < floor_t) break;
    KahanSum m;
    for (std::size_t i = 0; i < recip.size(); ++i) {
      if (recip[i] > t && recip[i] <= 2.0 * t) m.add(mass[i]);
    }
    best = std::max(best, t * std::pow(m.value(), 1.0 / q));
  }
  return best;
}

NormEquivalence norm_equivalence_check(const Weight& v, const DyadicCube& Q, double q, double a, double b) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw ConfigError("norm equivalence needs 1 <= q < inf");
  if (!(a > 0.0 && a < 1.0)) throw ConfigError("norm equivalence needs 0 < a < 1");
  if (!(b >= 0.0 && b < 1.0)) throw ConfigError("norm equivalence needs 0 <= b < 1");
  NormEquivalence out;
  const double inv_qc = 1.0 - 1.0 / q;  // 1/q'
  out.k = inv_qc / a + b / (a * q);
  if (!(out.k > 0.0)) throw ConfigError("norm equivalence: k = 1/(a q') + b/(a q) vanishes (q = 1, b = 0)");
  out.lhs = cube_weak_norm(v, Q, q);
  std::vector<double> vals, masses;
  const double vol = v.grid().cell_volume();
  for_each_cell(v.grid(), Q.box, [&](std::size_t i) {
    vals.push_back(std::pow(v[i], -a));
    masses.push_back(std::pow(v[i], b) * vol);
  });
  out.rhs_power_k = std::pow(weak_norm(vals, masses, out.k * q), out.k);
  out.ratio = out.lhs / out.rhs_power_k;
  return out;
}

}  // namespace mwlab
