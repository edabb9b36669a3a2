#pragma once

// The constructive steps of the extrapolation argument evaluated on grid
// data: the Sawyer-type ratio, the off-diagonal pipeline (H, the E/F split,
// the auxiliary weight v, both estimates and the gamma optimization), the
// factorization of restricted vector weights, and the endpoint conclusion.

#include <span>
#include <vector>

#include "mwlab/exponents.hpp"
#include "mwlab/grid.hpp"
#include "mwlab/weights.hpp"

namespace mwlab {

struct SawyerResult {
  /// ||M_mu f / v||_{L^{1,inf}(u v mu)}
  double lhs = 0.0;
  /// ||f||_{L^1(u mu)}
  double rhs = 0.0;
  double ratio = 0.0;
};

/// Throws ComputeError when f vanishes.
SawyerResult sawyer_ratio(const GridFunction& f, const Weight& u, const Weight& v, const Weight& mu,
                          const CubeFamily& family);

/// H = f^{r0} w^{1 - delta1/r0} mu^{-1}.
GridFunction build_H(const GridFunction& f, const Weight& w, const Weight& mu, const OffDiagExponents& x);

/// Inputs of one off-diagonal run with the y- and gamma-independent pieces
/// precomputed: M_mu H and Phi = w^{(delta1/r0)(q/s0)} mu^{q/s0} M_mu H.
class OffDiagContext {
 public:
  OffDiagContext(GridFunction f, GridFunction g, Weight w, Weight mu, OffDiagExponents x, CubeFamily family);

  const GridFunction& f() const noexcept { return f_; }
  const GridFunction& g() const noexcept { return g_; }
  const Weight& w() const noexcept { return w_; }
  const Weight& mu() const noexcept { return mu_; }
  const OffDiagExponents& exponents() const noexcept { return x_; }
  const CubeFamily& family() const noexcept { return family_; }
  const GridFunction& H() const noexcept { return H_; }
  const GridFunction& MH() const noexcept { return MH_; }
  const std::vector<double>& phi() const noexcept { return phi_; }
  /// Density of the conclusion measure, w^{q/r0} mu^{q/delta1}.
  const std::vector<double>& sigma() const noexcept { return sigma_; }

 private:
  GridFunction f_, g_;
  Weight w_, mu_;
  OffDiagExponents x_;
  CubeFamily family_;
  GridFunction H_, MH_;
  std::vector<double> phi_, sigma_;
};

struct EFMasks {
  std::vector<bool> E;
  std::vector<bool> F;
};

/// E = {Phi > (gamma y)^{r0}}, F = {Phi <= (gamma y)^{r0}, g > y}.
EFMasks split_EF(const OffDiagContext& ctx, double y, double gamma);
/// True when E and F are disjoint and {g > y} is contained in their union.
bool masks_cover_and_disjoint(const EFMasks& m, const GridFunction& g, double y);

struct AuxWeight {
  Weight v;
  /// max relative residual of v^{delta0/r0} = w^{delta1/r0} (M_mu H)^{-(delta0/r0)/(p0/r0)'}
  double identity_residual = 0.0;
};

/// v = w^{delta1/delta0} (M_mu H)^{-1/(p0/r0)'}. Throws ComputeError for H == 0.
AuxWeight construct_v(const Weight& w, const GridFunction& H, const Weight& mu, const OffDiagExponents& x,
                      const CubeFamily& family);
AuxWeight construct_v(const OffDiagContext& ctx);

struct EstimateE {
  /// int_E w^{q/r0} mu^{q/delta1}
  double lhs = 0.0;
  /// (gamma y)^{-r0} ||f||^{r0}_{L^{r0, alpha r0/p0}(w)}
  double rhs = 0.0;
  /// ||Phi||_{L^{1,inf}(w^{delta1/r0} Psi^{-1} mu)}, Psi = Phi / M_mu H
  double weak_term = 0.0;
  /// int H w^{delta1/r0} mu
  double h_integral = 0.0;
  /// int f^{r0} w
  double f_integral = 0.0;
  /// weak_term / h_integral
  double sawyer_constant = 0.0;
  /// ||f||^{r0}_{L^{r0}(w)} / ||f||^{r0}_{L^{r0,alpha r0/p0}(w)}
  double embedding_constant = 0.0;
  /// lhs <= (gamma y)^{-r0} weak_term
  bool chebyshev_ok = true;
  /// h_integral == f_integral (relative residual)
  double identity_residual = 0.0;
};

EstimateE estimate_E(const OffDiagContext& ctx, const EFMasks& masks, double y, double gamma);

struct EstimateF {
  /// int_F w^{q/r0} mu^{q/delta1}
  double lhs = 0.0;
  /// gamma^{r0 beta} y^{r0 beta - q0} ||f||^{q0 r0/p0}_{L^{r0, alpha r0/p0}(w)}
  double rhs = 0.0;
  /// int_{g > y} v^{q0/r0} mu^{q0/delta0}
  double level_integral = 0.0;
  /// ||g||_{L^{q0,inf}(v^{q0/r0} mu^{q0/delta0})} / ||f||_{L^{p0,alpha}(v^{p0/r0} mu^{1-p0/r0})}
  double hypothesis_constant = 0.0;
  /// Layer-cake integrals int s^{e} (int_{f>s} density)^{alpha/p0} ds along the chain.
  double layer_v = 0.0, layer_H = 0.0, layer_w = 0.0, layer_final = 0.0;
  /// Every step of the chain, each with its measured constant.
  bool pointwise_ok = true, chebyshev_ok = true, maximal_step_ok = true, final_step_ok = true;
  double pointwise_residual = 0.0, substitution_residual = 0.0, norm_residual = 0.0;
};

EstimateF estimate_F(const OffDiagContext& ctx, const EFMasks& masks, const AuxWeight& v, double y, double gamma);

struct GammaChoice {
  double gamma = 0.0;
  double value = 0.0;
};

/// Minimizes A gamma^{-r0} + B gamma^{r0 beta}. Throws ConfigError unless
/// A, B, r0, beta > 0.
GammaChoice gamma_optimize(double A, double B, double r0, double beta);
/// Minimum of the same objective over `points` log-spaced gammas spanning
/// [gamma/span, gamma*span].
double gamma_grid_minimum(double A, double B, double r0, double beta, double center, double span, int points);

struct OffDiagRow {
  double y = 0.0;
  double lhs = 0.0;
  /// y^{-q} ||f||^q_{L^{r0, alpha r0/p0}(w)}
  double norm_term = 0.0;
  double A = 0.0, B = 0.0, gamma = 0.0, bound = 0.0;
  /// lhs / norm_term
  double constant = 0.0;
  /// bound / norm_term
  double bound_constant = 0.0;
  bool masks_ok = true, chains_ok = true, gamma_ok = true, bound_ok = true;
  EstimateE e;
  EstimateF f;
};

struct OffDiagReport {
  std::vector<OffDiagRow> rows;
  double v_identity_residual = 0.0;
  double max_constant = 0.0, min_constant = 0.0;
  /// max/min of the nonvacuous constants (1 when fewer than two)
  double spread = 1.0;
  bool pass = true;
};

/// y grid {2^k median(g | g > 0) : k = -3..3}. Empty when g == 0.
std::vector<double> default_y_grid(const GridFunction& g);

OffDiagReport offdiag_verify(const OffDiagContext& ctx, std::span<const double> ys);

struct ImpliAReport {
  /// [w]_{A_{p,r}}, [(w_1,...,w_{m-1},1)]_{A_{p,r}}, [w_m^{rho/r_m}]_{A_1(mu)}
  ConstantEstimate full, reduced, a1;
  double forward_bound = 0.0;
  bool forward_ok = true;
  /// max_Q |full_Q - reduced_Q a1_Q^{1/rho}| / full_Q
  double factorization_residual = 0.0;
  /// inf_Q reduced_Q
  double reduced_min = 0.0;
  bool reverse_reduced_ok = true;
  bool reverse_a1_ok = true;
};

/// Requires p_m = r_m.
ImpliAReport impli_a_check(const WeightVector& ws, const ExponentSystem& e, const CubeFamily& family);

struct ImpliBReport {
  WeightVector assembled;
  Weight mu;
  ConstantEstimate u_a1;
  /// max_Q of the per-cube ratio of the two sides of the w_m estimate
  ConstantEstimate wm_ratio;
  ConstantEstimate assembled_apr;
  /// [(w_1,...,w_{m-1},1)] in the class with p_m replaced by r_m
  ConstantEstimate reduced_apr;
  double identity_residual = 0.0;
};

/// w_{1..m-1} given, W^{delta_{m+1}/r_m} = u_m (M_mu g)^{-delta_{m+1}/delta_m},
/// w_m = W^{p_m/r_m} mu^{-p_m/delta_m}. Requires p_m > r_m.
ImpliBReport impli_b_construct(const std::vector<Weight>& leading, const Weight& u_m, const GridFunction& g,
                               const ExponentSystem& e, const CubeFamily& family);

/// ||chi_Q w_m^{-1/p_m}||_{L^{delta_m,inf}(dx/|Q|)} divided by
/// (ess inf_Q (M_mu g)^{1/delta_m} / ess inf_Q u_m^{1/delta_{m+1}}) (mu(Q)/|Q|)^{1/delta_m}.
double wm_cube_ratio(const Weight& w_m, const GridFunction& maximal_g, const Weight& u_m, const Weight& mu,
                     const ExponentSystem& e, const DyadicCube& Q);

struct EndpointResult {
  /// ||g||_{L^{r~,inf}(prod v_i^{r~/r_i})}
  double lhs = 0.0;
  /// prod_i ||f_i||_{L^{r_i, alpha_i r_i/p_i}(v_i)}
  double rhs = 0.0;
  double constant = 0.0;
};

/// Endpoint conclusion for the pair (f, g).
EndpointResult endpoint_verify(std::span<const GridFunction> fs, const GridFunction& g, const WeightVector& vs,
                               const ExponentSystem& e);

}  // namespace mwlab
