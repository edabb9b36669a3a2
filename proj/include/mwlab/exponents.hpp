#pragma once

// Exponent bookkeeping for the restricted multilinear classes and for the
// off-diagonal extrapolation step. Reciprocals are stored throughout so that
// infinite exponents (delta_i when r_i = p_i, s_0 = infinity) are exact zeros.

#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

namespace mwlab {

class ExponentSystem {
 public:
  /// p has m entries, r has m + 1, alpha is empty (all alpha_i = p_i) or has
  /// m entries. Throws ConfigError naming the violated condition.
  static ExponentSystem make(std::vector<double> p, std::vector<double> r, std::vector<double> alpha = {});
  static ExponentSystem from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  int m() const noexcept { return static_cast<int>(p_.size()); }
  /// 0-based: p(0) = p_1.
  double p(int i) const { return p_.at(static_cast<std::size_t>(i)); }
  /// 0-based, i = m gives r_{m+1}.
  double r(int i) const { return r_.at(static_cast<std::size_t>(i)); }
  double alpha(int i) const { return alpha_.at(static_cast<std::size_t>(i)); }
  const std::vector<double>& p_vector() const noexcept { return p_; }
  const std::vector<double>& r_vector() const noexcept { return r_; }
  const std::vector<double>& alpha_vector() const noexcept { return alpha_; }

  /// 1/p = sum 1/p_i.
  double inv_p() const noexcept { return inv_p_; }
  double p_total() const noexcept { return 1.0 / inv_p_; }
  /// 1/p_{m+1} = 1 - 1/p (negative when p < 1).
  double inv_p_next() const noexcept { return 1.0 - inv_p_; }
  /// 1/delta_{i+1} for i = 0..m; zero encodes delta = infinity.
  double inv_delta(int i) const { return inv_delta_.at(static_cast<std::size_t>(i)); }
  double delta(int i) const;
  /// 1/r = sum_{i=1}^{m+1} 1/r_i.
  double inv_r() const noexcept { return inv_r_; }
  /// 1/rho = 1/r_m - 1/r'_{m+1} + sum_{i<m} 1/p_i.
  double inv_rho() const noexcept { return inv_rho_; }
  double rho() const noexcept { return 1.0 / inv_rho_; }
  /// 1/r~ = sum_{i=1}^{m} 1/r_i.
  double inv_r_tilde() const noexcept { return inv_r_tilde_; }

  /// Same system with p_{i+1} replaced (and alpha_{i+1} clamped to it).
  ExponentSystem with_p(int i, double value) const;
  /// Largest absolute residual of the derived identities.
  double identity_residual() const;

 private:
  ExponentSystem() = default;
  std::vector<double> p_, r_, alpha_;
  std::vector<double> inv_delta_;
  double inv_p_ = 1.0, inv_r_ = 1.0, inv_rho_ = 1.0, inv_r_tilde_ = 1.0;
};

/// Parameters of the off-diagonal step: r0 <= p0, 0 < q0 < s0 (s0 may be
/// infinite), alpha in (0, p0].
class OffDiagExponents {
 public:
  static OffDiagExponents make(double r0, double p0, double q0, double s0, double alpha);
  static OffDiagExponents from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  double r0() const noexcept { return r0_; }
  double p0() const noexcept { return p0_; }
  double q0() const noexcept { return q0_; }
  double s0() const noexcept { return inv_s0_ == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / inv_s0_; }
  double inv_s0() const noexcept { return inv_s0_; }
  double alpha() const noexcept { return alpha_; }
  /// 1/delta0 = 1/q0 - 1/s0.
  double inv_delta0() const noexcept { return 1.0 / q0_ - inv_s0_; }
  double delta0() const noexcept { return 1.0 / inv_delta0(); }
  /// 1/q = 1/q0 + 1/r0 - 1/p0.
  double inv_q() const noexcept { return 1.0 / q0_ + 1.0 / r0_ - 1.0 / p0_; }
  double q() const noexcept { return 1.0 / inv_q(); }
  /// 1/delta1 = 1/q - 1/s0.
  double inv_delta1() const noexcept { return inv_q() - inv_s0_; }
  double delta1() const noexcept { return 1.0 / inv_delta1(); }
  /// beta = (q0/r0) / (p0/r0)'.
  double beta() const noexcept { return (q0_ / r0_) * (1.0 - r0_ / p0_); }
  /// 1/(p0/r0)' = 1 - r0/p0.
  double inv_dual_ratio() const noexcept { return 1.0 - r0_ / p0_; }
  bool degenerate() const noexcept { return p0_ == r0_; }
  double identity_residual() const;

 private:
  OffDiagExponents() = default;
  double r0_ = 1.0, p0_ = 1.0, q0_ = 1.0, inv_s0_ = 0.0, alpha_ = 1.0;
};

}  // namespace mwlab
