#pragma once

// Weight characteristics as suprema over a cube family. Each characteristic
// has a per-cube evaluator; the supremum keeps the maximizing cube so that a
// reported value can be reproduced on one cube.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mwlab/exponents.hpp"
#include "mwlab/grid.hpp"

namespace mwlab {

struct ConstantEstimate {
  double value = 0.0;
  DyadicCube witness;
  std::string family;
  int resolution = 0;
};

/// Maximum of per_cube(Q) over the distinct cubes of the family. Ties keep
/// the first cube in generation order.
template <class Fn>
ConstantEstimate sup_over_family(const CubeFamily& family, Fn&& per_cube) {
  ConstantEstimate out;
  out.family = family.descriptor();
  out.resolution = family.grid().level();
  bool first = true;
  for (const auto& Q : family.cubes()) {
    const double v = per_cube(Q);
    if (first || v > out.value) {
      out.value = v;
      out.witness = Q;
      first = false;
    }
  }
  return out;
}

class WeightVector {
 public:
  /// Throws ConfigError for an empty list or mixed grids.
  explicit WeightVector(std::vector<Weight> weights);

  std::size_t size() const noexcept { return weights_.size(); }
  const Weight& operator[](std::size_t i) const { return weights_.at(i); }
  const std::vector<Weight>& weights() const noexcept { return weights_; }
  const Grid& grid() const noexcept { return weights_.front().grid(); }
  /// Copy with component i replaced.
  WeightVector with(std::size_t i, Weight w) const;

 private:
  std::vector<Weight> weights_;
};

/// w = prod_i w_i^{p/p_i}.
Weight composite_weight(const WeightVector& ws, std::span<const double> p);
/// mu = (prod_{i<m} w_i^{1/p_i})^rho; identically 1 when m = 1.
Weight reduced_measure(const WeightVector& ws, const ExponentSystem& e);

// A_1(mu): (mu(Q)^{-1} int_Q w mu) / ess inf_Q w.
double a1_cube(const Weight& w, const Weight& mu, const DyadicCube& Q);
ConstantEstimate a1_constant(const Weight& w, const Weight& mu, const CubeFamily& family);
ConstantEstimate a1_constant(const Weight& w, const CubeFamily& family);

// Fujii-Wilson: mu(Q)^{-1} int_Q M(mu chi_Q), with M over the family.
double ainf_cube(const Weight& mu, const DyadicCube& Q, const CubeFamily& family);
ConstantEstimate ainf_constant(const Weight& mu, const CubeFamily& family);

// A_p-vector with strong dual averages; p_i = 1 uses (ess inf w_i)^{-1}.
double apvec_cube(const WeightVector& ws, std::span<const double> p, const DyadicCube& Q);
ConstantEstimate apvec_constant(const WeightVector& ws, std::span<const double> p, const CubeFamily& family);

// Restricted class with general r: (avg w^{delta_{m+1}/p})^{1/delta_{m+1}}
// times prod_i ||chi_Q w_i^{-1/p_i}||_{L^{delta_i,inf}(dx/|Q|)}.
double apr_cube(const WeightVector& ws, const ExponentSystem& e, const DyadicCube& Q);
ConstantEstimate apr_constant(const WeightVector& ws, const ExponentSystem& e, const CubeFamily& family);
/// apr_cube on each listed cube, sharing the precomputed powers.
std::vector<double> apr_values(const WeightVector& ws, const ExponentSystem& e, std::span<const DyadicCube> cubes);

// Restricted class with r = 1: (avg w)^{1/p} prod_i ||chi_Q w_i^{-1}||_{L^{p_i',inf}(w_i/|Q|)}.
double apr_r1_cube(const WeightVector& ws, std::span<const double> p, const DyadicCube& Q);
ConstantEstimate apr_r1_constant(const WeightVector& ws, std::span<const double> p, const CubeFamily& family);

/// A weight of the form u_1 (M_mu g)^{e} with its ingredients kept for audits.
struct HatWeight {
  Weight v;
  Weight u1;
  GridFunction maximal_g;
  double r = 1.0;
  std::optional<double> q;
  /// Exponent e applied to M_mu g.
  double maximal_exponent = 0.0;
  /// Recorded A_1(mu) characteristic of u_1.
  ConstantEstimate u1_a1;
};

/// v = u_1 (M_mu g)^{1-r}. Throws ComputeError for g == 0, ConfigError for r < 1.
HatWeight hat_ar_construct(const Weight& u1, const GridFunction& g, double r, const Weight& mu,
                           const CubeFamily& family);
/// v = (u_1 (M_mu g)^{-q/r'})^{1/q}, so that v^q = hat_ar_construct(u_1, g, 1 + q/r').
HatWeight hat_arq_construct(const Weight& u1, const GridFunction& g, double r, double q, const Weight& mu,
                            const CubeFamily& family);

struct CompositeAudit {
  /// s = (1/r - 1) delta_{m+1}.
  double s = 1.0;
  /// theta = r / (1 - r).
  double theta = 1.0;
  /// Weak Hoelder constant m_fin^{1/s'} (m_fin = number of finite delta_i).
  double holder_constant = 1.0;
  /// sup_Q of the one-weight restricted characteristic of W = w^{delta_{m+1}/p}.
  ConstantEstimate composite;
  ConstantEstimate apr;
  /// max_Q composite_Q / apr_Q^theta, expected <= holder_constant.
  double worst_cube_ratio = 0.0;
  DyadicCube worst_cube;
};

/// One-weight restricted characteristic of W at exponent s on one cube:
/// (avg_Q W)^{1/s} ||chi_Q W^{-1/s}||_{L^{s',inf}(dx/|Q|)}.
double one_weight_restricted_cube(const Weight& W, double s, const DyadicCube& Q);

CompositeAudit composite_audit(const WeightVector& ws, const ExponentSystem& e, const CubeFamily& family);

}  // namespace mwlab
