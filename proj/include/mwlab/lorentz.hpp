#pragma once

// Lorentz quasi-norms of step functions.
//
// Normalization: ||f||_{L^{p,q}(w)} = (q * int_0^inf t^{q-1} w({f>t})^{q/p} dt)^{1/q}
// for q < inf, and the weak functional sup_t t * w({f>t})^{1/p} for q = inf.
// With this choice L^{p,p} = L^p and every indicator has norm w(E)^{1/p}
// for every q. On grid data t -> w({f>t}) is a step function, so all of these
// are finite sums over the distinct values of f and are evaluated exactly.

#include <optional>
#include <span>

#include "mwlab/grid.hpp"

namespace mwlab {

struct LorentzIndex {
  double p = 1.0;
  /// nullopt encodes q = infinity (the weak space).
  std::optional<double> q;

  static LorentzIndex weak(double p) { return LorentzIndex{p, std::nullopt}; }
  static LorentzIndex strong(double p, double q) { return LorentzIndex{p, q}; }
  bool is_weak() const noexcept { return !q.has_value(); }
};

// Primitives on (value, mass) samples. Values must be >= 0; only samples
// with positive value contribute.

/// sup_t t * m({value > t})^{1/p}; exact (attained at t -> value^-).
double weak_norm(std::span<const double> values, std::span<const double> masses, double p);
double lorentz_norm(std::span<const double> values, std::span<const double> masses, LorentzIndex idx);
/// int_0^inf s^{s_exponent} m({value > s})^{mass_power} ds, exact for step
/// data; requires s_exponent > -1.
double layer_cake_integral(std::span<const double> values, std::span<const double> masses,
                           double s_exponent, double mass_power);

/// ||f||_{L^{p,inf}(w)}. Throws ConfigError for p <= 0.
double weak_norm(const GridFunction& f, const Weight& w, double p);
/// ||f||_{L^{p,q}(w)}; delegates to weak_norm for q = inf.
double lorentz_norm(const GridFunction& f, const Weight& w, LorentzIndex idx);
/// Cell masses f-independent: mass_i = w_i * cell volume.
std::vector<double> cell_masses(const Weight& w);

/// ||chi_Q v^{-1}||_{L^{q,inf}(v dx / |Q|)}; q = nullopt gives ess sup_Q v^{-1}.
double restricted_cube_norm(const Weight& v, const DyadicCube& Q, std::optional<double> q);
/// ||chi_box h||_{L^{1/inv,inf}(dx/|box|)}; inv = 0 gives the cell maximum.
double normalized_weak_norm(const GridFunction& h, const Box& box, double inv_exponent);
/// ||chi_Q v^{-1}||_{L^{q,inf}(v)} without the 1/|Q| normalization.
double cube_weak_norm(const Weight& v, const DyadicCube& Q, double q);

/// S = sup_t t * v({x in Q : t < v^{-1}(x) <= 2t})^{1/q}, evaluated exactly
/// at the left limits of the finitely many breakpoints {a, a/2 : a a value
/// of v^{-1} on Q}.
double dyadic_level_sup(const Weight& v, const DyadicCube& Q, double q);
/// The same functional restricted to the ladder t_j = max(v^{-1}) 2^{-j/substeps}
/// reaching down to min(v^{-1})/2. Increases to dyadic_level_sup as
/// substeps grows.
double dyadic_level_sup_ladder(const Weight& v, const DyadicCube& Q, double q, int substeps);

struct NormEquivalence {
  double k = 1.0;
  /// ||chi_Q v^{-1}||_{L^{q,inf}(v)}
  double lhs = 0.0;
  /// ||chi_Q v^{-a}||_{L^{kq,inf}(v^b)}^k
  double rhs_power_k = 0.0;
  double ratio = 0.0;
};

/// Both sides of the equivalence ||chi_Q v^{-1}||_{L^{q,inf}(v)} ~
/// ||chi_Q v^{-a}||^k_{L^{kq,inf}(v^b)}, k = 1/(a q') + b/(a q).
/// Throws ConfigError unless q >= 1, 0 < a < 1, 0 <= b < 1 and k > 0.
NormEquivalence norm_equivalence_check(const Weight& v, const DyadicCube& Q, double q, double a, double b);

}  // namespace mwlab
