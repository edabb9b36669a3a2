#include "mwlab/weights.hpp"

#include <algorithm>
#include <cmath>

#include "mwlab/errors.hpp"
#include "mwlab/lorentz.hpp"
#include "mwlab/maximal.hpp"
#include "mwlab/numeric.hpp"

namespace mwlab {

namespace {

GridFunction power_of(const Weight& w, double e) {
  return GridFunction(w.grid(), map_values(w.values(), [e](double v) { return std::pow(v, e); }));
}

void check_p(std::span<const double> p, std::size_t m) {
  if (p.size() != m) throw ConfigError("exponent vector length does not match the weight vector");
  for (double x : p) {
    if (!(x >= 1.0) || !std::isfinite(x)) throw ConfigError("weight exponents must satisfy 1 <= p_i < inf");
  }
}

double inverse_total(std::span<const double> p) {
  KahanSum s;
  for (double x : p) s.add(1.0 / x);
  return s.value();
}

class AprEvaluator {
 public:
  AprEvaluator(const WeightVector& ws, const ExponentSystem& e)
      : e_(e), composite_(power_of(composite_weight(ws, e.p_vector()), 1.0 / (e.inv_delta(e.m()) * e.p_total()))) {
    for (int i = 0; i < e.m(); ++i) neg_.push_back(power_of(ws[static_cast<std::size_t>(i)], -1.0 / e.p(i)));
  }

  double operator()(const DyadicCube& Q) const {
    const double inv_dm1 = e_.inv_delta(e_.m());
    double out = std::pow(average(composite_, Q.box), inv_dm1);
    for (int i = 0; i < e_.m(); ++i) out *= normalized_weak_norm(neg_[static_cast<std::size_t>(i)], Q.box, e_.inv_delta(i));
    return out;
  }

 private:
  const ExponentSystem& e_;
  GridFunction composite_;
  std::vector<GridFunction> neg_;
};

class ApvecEvaluator {
 public:
  ApvecEvaluator(const WeightVector& ws, std::span<const double> p)
      : p_(p.begin(), p.end()), inv_p_(inverse_total(p)), composite_(composite_weight(ws, p).function()) {
    for (std::size_t i = 0; i < ws.size(); ++i) {
      dual_.push_back(p_[i] == 1.0 ? ws[i].function() : power_of(ws[i], -1.0 / (p_[i] - 1.0)));
    }
  }

  double operator()(const DyadicCube& Q) const {
    double out = std::pow(average(composite_, Q.box), inv_p_);
    for (std::size_t i = 0; i < p_.size(); ++i) {
      if (p_[i] == 1.0) {
        out /= ess_bounds(dual_[i].values(), dual_[i].grid(), Q.box).first;
      } else {
        out *= std::pow(average(dual_[i], Q.box), 1.0 - 1.0 / p_[i]);
      }
    }
    return out;
  }

 private:
  std::vector<double> p_;
  double inv_p_ = 1.0;
  GridFunction composite_;
  std::vector<GridFunction> dual_;
};

class AprR1Evaluator {
 public:
  AprR1Evaluator(const WeightVector& ws, std::span<const double> p)
      : ws_(ws), p_(p.begin(), p.end()), inv_p_(inverse_total(p)), composite_(composite_weight(ws, p).function()) {}

  double operator()(const DyadicCube& Q) const {
    double out = std::pow(average(composite_, Q.box), inv_p_);
    for (std::size_t i = 0; i < p_.size(); ++i) {
      const std::optional<double> q = p_[i] == 1.0 ? std::nullopt : std::optional<double>(conjugate(p_[i]));
      out *= restricted_cube_norm(ws_[i], Q, q);
    }
    return out;
  }

 private:
  const WeightVector& ws_;
  std::vector<double> p_;
  double inv_p_ = 1.0;
  GridFunction composite_;
};

}  // namespace

WeightVector::WeightVector(std::vector<Weight> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw ConfigError("weight vector must have at least one component");
  for (const auto& w : weights_) check_same_grid(w.grid(), weights_.front().grid(), "weight vector");
}

WeightVector WeightVector::with(std::size_t i, Weight w) const {
  auto copy = weights_;
  copy.at(i) = std::move(w);
  return WeightVector(std::move(copy));
}

Weight composite_weight(const WeightVector& ws, std::span<const double> p) {
  check_p(p, ws.size());
  const double inv_p = inverse_total(p);
  std::vector<double> out(ws.grid().cell_count(), 1.0);
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const double e = 1.0 / (p[i] * inv_p);
    const auto v = ws[i].values();
    for (std::size_t c = 0; c < out.size(); ++c) out[c] *= std::pow(v[c], e);
  }
  return Weight(ws.grid(), std::move(out));
}

Weight reduced_measure(const WeightVector& ws, const ExponentSystem& e) {
  if (static_cast<int>(ws.size()) != e.m()) throw ConfigError("exponent system and weight vector differ in m");
  std::vector<double> out(ws.grid().cell_count(), 1.0);
  for (int i = 0; i + 1 < e.m(); ++i) {
    const double ex = e.rho() / e.p(i);
    const auto v = ws[static_cast<std::size_t>(i)].values();
    for (std::size_t c = 0; c < out.size(); ++c) out[c] *= std::pow(v[c], ex);
  }
  return Weight(ws.grid(), std::move(out));
}

double a1_cube(const Weight& w, const Weight& mu, const DyadicCube& Q) {
  return average(w.function(), Q.box, &mu) / ess_bounds(w.function(), Q).first;
}

ConstantEstimate a1_constant(const Weight& w, const Weight& mu, const CubeFamily& family) {
  check_same_grid(w.grid(), mu.grid(), "a1_constant");
  return sup_over_family(family, [&](const DyadicCube& Q) { return a1_cube(w, mu, Q); });
}

ConstantEstimate a1_constant(const Weight& w, const CubeFamily& family) {
  return a1_constant(w, Weight::ones(w.grid()), family);
}

double ainf_cube(const Weight& mu, const DyadicCube& Q, const CubeFamily& family) {
  const Grid& grid = mu.grid();
  const int width = Q.box.hi[0] - Q.box.lo[0];
  std::vector<double> local(Q.box.cell_count(), 0.0);
  auto slot = [&](std::size_t cell) {
    const int x = static_cast<int>(cell % static_cast<std::size_t>(grid.cells_per_axis()));
    const int y = static_cast<int>(cell / static_cast<std::size_t>(grid.cells_per_axis()));
    return static_cast<std::size_t>(x - Q.box.lo[0]) + static_cast<std::size_t>(y - Q.box.lo[1]) * static_cast<std::size_t>(width);
  };
  family.for_each_intersecting(Q.box, [&](const DyadicCube& R) {
    const Box overlap = intersect(R.box, Q.box);
    if (overlap.empty()) return;
    const double value = measure(mu, overlap) / R.volume(grid);
    for_each_cell(grid, overlap, [&](std::size_t c) {
      auto& s = local[slot(c)];
      s = std::max(s, value);
    });
  });
  KahanSum total;
  for (double v : local) total.add(v);
  return total.value() * grid.cell_volume() / measure(mu, Q);
}

ConstantEstimate ainf_constant(const Weight& mu, const CubeFamily& family) {
  return sup_over_family(family, [&](const DyadicCube& Q) { return ainf_cube(mu, Q, family); });
}

double apvec_cube(const WeightVector& ws, std::span<const double> p, const DyadicCube& Q) {
  return ApvecEvaluator(ws, p)(Q);
}

ConstantEstimate apvec_constant(const WeightVector& ws, std::span<const double> p, const CubeFamily& family) {
  const ApvecEvaluator eval(ws, p);
  return sup_over_family(family, eval);
}

std::vector<double> apr_values(const WeightVector& ws, const ExponentSystem& e, std::span<const DyadicCube> cubes) {
  const AprEvaluator eval(ws, e);
  std::vector<double> out;
  out.reserve(cubes.size());
  for (const auto& Q : cubes) out.push_back(eval(Q));
  return out;
}

double apr_cube(const WeightVector& ws, const ExponentSystem& e, const DyadicCube& Q) {
  return AprEvaluator(ws, e)(Q);
}

ConstantEstimate apr_constant(const WeightVector& ws, const ExponentSystem& e, const CubeFamily& family) {
  const AprEvaluator eval(ws, e);
  return sup_over_family(family, eval);
}

double apr_r1_cube(const WeightVector& ws, std::span<const double> p, const DyadicCube& Q) {
  return AprR1Evaluator(ws, p)(Q);
}

ConstantEstimate apr_r1_constant(const WeightVector& ws, std::span<const double> p, const CubeFamily& family) {
  const AprR1Evaluator eval(ws, p);
  return sup_over_family(family, eval);
}

namespace {

HatWeight build_hat(const Weight& u1, const GridFunction& g, double r, std::optional<double> q, double exponent,
                    double outer_power, const Weight& mu, const CubeFamily& family) {
  check_same_grid(u1.grid(), g.grid(), "hat construction");
  check_same_grid(u1.grid(), mu.grid(), "hat construction");
  if (g.is_zero()) throw ComputeError("hat construction needs a nonzero g");
  GridFunction mg = maximal(g, family, &mu);
  std::vector<double> v(u1.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (exponent != 0.0 && !(mg[i] > 0.0)) throw ComputeError("M_mu g vanishes on a cell; the family misses it");
    const double factor = exponent == 0.0 ? 1.0 : std::pow(mg[i], exponent);
    v[i] = std::pow(u1[i] * factor, outer_power);
  }
  return HatWeight{Weight(u1.grid(), std::move(v)), u1, std::move(mg), r, q, exponent, a1_constant(u1, mu, family)};
}

}  // namespace

HatWeight hat_ar_construct(const Weight& u1, const GridFunction& g, double r, const Weight& mu,
                           const CubeFamily& family) {
  if (!(r >= 1.0) || !std::isfinite(r)) throw ConfigError("hat class exponent must satisfy 1 <= r < inf");
  return build_hat(u1, g, r, std::nullopt, 1.0 - r, 1.0, mu, family);
}

HatWeight hat_arq_construct(const Weight& u1, const GridFunction& g, double r, double q, const Weight& mu,
                            const CubeFamily& family) {
  if (!(r >= 1.0) || !std::isfinite(r)) throw ConfigError("hat class exponent must satisfy 1 <= r < inf");
  if (!(q > 0.0) || !std::isfinite(q)) throw ConfigError("hat class power must satisfy 0 < q < inf");
  const double inv_r_dual = 1.0 - 1.0 / r;
  return build_hat(u1, g, r, q, -q * inv_r_dual, 1.0 / q, mu, family);
}

double one_weight_restricted_cube(const Weight& W, double s, const DyadicCube& Q) {
  if (!(s >= 1.0)) throw ConfigError("restricted exponent must satisfy s >= 1");
  const GridFunction neg = power_of(W, -1.0 / s);
  return std::pow(average(W.function(), Q.box), 1.0 / s) * normalized_weak_norm(neg, Q.box, 1.0 - 1.0 / s);
}

CompositeAudit composite_audit(const WeightVector& ws, const ExponentSystem& e, const CubeFamily& family) {
  CompositeAudit out;
  const double inv_dm1 = e.inv_delta(e.m());
  const double excess = e.inv_r() - 1.0;
  out.s = excess / inv_dm1;
  out.theta = 1.0 / excess;
  int finite = 0;
  for (int i = 0; i < e.m(); ++i) finite += e.inv_delta(i) > 0.0 ? 1 : 0;
  const double inv_s_dual = 1.0 - 1.0 / out.s;
  out.holder_constant = (inv_s_dual <= 0.0 || finite <= 1) ? 1.0 : std::pow(static_cast<double>(finite), inv_s_dual);

  const Weight W = pow(composite_weight(ws, e.p_vector()), 1.0 / (inv_dm1 * e.p_total()));
  const GridFunction neg = power_of(W, -1.0 / out.s);
  const double s_eff = std::max(out.s, 1.0);
  auto composite_cube = [&](const DyadicCube& Q) {
    return std::pow(average(W.function(), Q.box), 1.0 / s_eff) * normalized_weak_norm(neg, Q.box, std::max(inv_s_dual, 0.0));
  };
  const AprEvaluator apr(ws, e);
  out.composite.family = out.apr.family = family.descriptor();
  out.composite.resolution = out.apr.resolution = family.grid().level();
  bool first = true;
  for (const auto& Q : family.cubes()) {
    const double c = composite_cube(Q);
    const double a = apr(Q);
    const double ratio = c / std::pow(a, out.theta);
    if (first || c > out.composite.value) {
      out.composite.value = c;
      out.composite.witness = Q;
    }
    if (first || a > out.apr.value) {
      out.apr.value = a;
      out.apr.witness = Q;
    }
    if (first || ratio > out.worst_cube_ratio) {
      out.worst_cube_ratio = ratio;
      out.worst_cube = Q;
    }
    first = false;
  }
  return out;
}

}  // namespace mwlab
