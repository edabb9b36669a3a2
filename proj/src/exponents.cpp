#include "mwlab/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mwlab/errors.hpp"
#include "mwlab/numeric.hpp"

namespace mwlab {

namespace {

std::string num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

std::vector<double> read_vector(const nlohmann::json& j, const char* key, bool optional) {
  if (!j.contains(key)) {
    require(optional, std::string("exponents.") + key + " is required");
    return {};
  }
  const auto& v = j.at(key);
  require(v.is_array(), std::string("exponents.") + key + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    require(x.is_number(), std::string("exponents.") + key + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

double read_number(const nlohmann::json& j, const char* key) {
  require(j.contains(key), std::string("offdiag.") + key + " is required");
  const auto& v = j.at(key);
  if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity")) return kInf;
  require(v.is_number(), std::string("offdiag.") + key + " must be a number or \"inf\"");
  return v.get<double>();
}

}  // namespace

ExponentSystem ExponentSystem::make(std::vector<double> p, std::vector<double> r, std::vector<double> alpha) {
  const std::size_t m = p.size();
  require(m >= 1, "exponents: need m >= 1 components");
  require(r.size() == m + 1, "exponents: r must have m + 1 = " + std::to_string(m + 1) + " entries");
  if (alpha.empty()) alpha = p;
  require(alpha.size() == m, "exponents: alpha must have m entries");
  for (std::size_t i = 0; i < m; ++i) {
    const std::string k = std::to_string(i + 1);
    require(std::isfinite(p[i]) && p[i] >= 1.0, "exponents: p_" + k + " must satisfy 1 <= p_i < inf, got " + num(p[i]));
    require(alpha[i] > 0.0 && alpha[i] <= p[i],
            "exponents: alpha_" + k + " must satisfy 0 < alpha_i <= p_i, got " + num(alpha[i]));
  }
  for (std::size_t i = 0; i <= m; ++i) {
    require(std::isfinite(r[i]) && r[i] >= 1.0,
            "exponents: r_" + std::to_string(i + 1) + " must satisfy 1 <= r_i < inf, got " + num(r[i]));
  }
  for (std::size_t i = 0; i < m; ++i) {
    const std::string k = std::to_string(i + 1);
    require(r[i] <= p[i], "exponents: r_i <= p_i violated for i = " + k + " (r_" + k + " = " + num(r[i]) +
                              " > p_" + k + " = " + num(p[i]) + ")");
  }
  ExponentSystem e;
  e.p_ = std::move(p);
  e.r_ = std::move(r);
  e.alpha_ = std::move(alpha);
  KahanSum inv_p, inv_r_tilde;
  for (std::size_t i = 0; i < m; ++i) {
    inv_p.add(1.0 / e.p_[i]);
    inv_r_tilde.add(1.0 / e.r_[i]);
  }
  e.inv_p_ = inv_p.value();
  e.inv_r_tilde_ = inv_r_tilde.value();
  e.inv_r_ = e.inv_r_tilde_ + 1.0 / e.r_[m];
  const double inv_r_next_dual = 1.0 - 1.0 / e.r_[m];
  require(e.inv_p_ > inv_r_next_dual, "exponents: p < r'_{m+1} violated (1/p = " + num(e.inv_p_) +
                                          ", 1/r'_{m+1} = " + num(inv_r_next_dual) + ")");
  e.inv_delta_.resize(m + 1);
  for (std::size_t i = 0; i < m; ++i) e.inv_delta_[i] = (e.r_[i] == e.p_[i]) ? 0.0 : 1.0 / e.r_[i] - 1.0 / e.p_[i];
  e.inv_delta_[m] = e.inv_p_ - inv_r_next_dual;
  KahanSum rho;
  rho.add(1.0 / e.r_[m - 1]);
  rho.add(-inv_r_next_dual);
  for (std::size_t i = 0; i + 1 < m; ++i) rho.add(1.0 / e.p_[i]);
  e.inv_rho_ = rho.value();
  return e;
}

ExponentSystem ExponentSystem::from_json(const nlohmann::json& j) {
  require(j.is_object(), "exponents must be an object");
  return make(read_vector(j, "p", false), read_vector(j, "r", false), read_vector(j, "alpha", true));
}

nlohmann::json ExponentSystem::to_json() const { return {{"p", p_}, {"r", r_}, {"alpha", alpha_}}; }

double ExponentSystem::delta(int i) const {
  const double inv = inv_delta(i);
  return inv == 0.0 ? kInf : 1.0 / inv;
}

ExponentSystem ExponentSystem::with_p(int i, double value) const {
  auto p = p_;
  auto alpha = alpha_;
  p.at(static_cast<std::size_t>(i)) = value;
  alpha[static_cast<std::size_t>(i)] = std::min(alpha[static_cast<std::size_t>(i)], value);
  return make(std::move(p), r_, std::move(alpha));
}

double ExponentSystem::identity_residual() const {
  const int mm = m();
  double worst = 0.0;
  auto note = [&](double a, double b) { worst = std::max(worst, std::abs(a - b)); };
  // 1/rho = 1/delta_{m+1} + 1/delta_m
  note(inv_rho_, inv_delta_[static_cast<std::size_t>(mm)] + inv_delta_[static_cast<std::size_t>(mm - 1)]);
  // sum_{i<=m} 1/delta_i = (1/r - 1) - 1/delta_{m+1}
  KahanSum s;
  for (int i = 0; i < mm; ++i) s.add(inv_delta_[static_cast<std::size_t>(i)]);
  note(s.value(), (inv_r_ - 1.0) - inv_delta_[static_cast<std::size_t>(mm)]);
  // 1/delta_{m+1} = 1/r_{m+1} - 1/p_{m+1}
  note(inv_delta_[static_cast<std::size_t>(mm)], 1.0 / r_.back() - inv_p_next());
  // rho definition
  KahanSum rho;
  for (int i = 0; i + 1 < mm; ++i) rho.add(1.0 / p_[static_cast<std::size_t>(i)]);
  note(inv_rho_, rho.value() + 1.0 / r_[static_cast<std::size_t>(mm - 1)] - (1.0 - 1.0 / r_.back()));
  return worst;
}

OffDiagExponents OffDiagExponents::make(double r0, double p0, double q0, double s0, double alpha) {
  require(std::isfinite(r0) && r0 >= 1.0, "offdiag: r0 must satisfy r0 >= 1, got " + num(r0));
  require(std::isfinite(p0) && p0 >= r0, "offdiag: r0 <= p0 < inf violated (r0 = " + num(r0) + ", p0 = " + num(p0) + ")");
  require(q0 > 0.0 && q0 < s0, "offdiag: 0 < q0 < s0 violated (q0 = " + num(q0) + ", s0 = " + num(s0) + ")");
  require(alpha > 0.0 && alpha <= p0, "offdiag: alpha must satisfy 0 < alpha <= p0, got " + num(alpha));
  OffDiagExponents x;
  x.r0_ = r0;
  x.p0_ = p0;
  x.q0_ = q0;
  x.inv_s0_ = std::isinf(s0) ? 0.0 : 1.0 / s0;
  x.alpha_ = alpha;
  require(x.inv_q() > x.inv_s0_, "offdiag: derived q must satisfy q < s0");
  return x;
}

OffDiagExponents OffDiagExponents::from_json(const nlohmann::json& j) {
  require(j.is_object(), "offdiag must be an object");
  return make(read_number(j, "r0"), read_number(j, "p0"), read_number(j, "q0"), read_number(j, "s0"),
              read_number(j, "alpha"));
}

nlohmann::json OffDiagExponents::to_json() const {
  nlohmann::json s0 = inv_s0_ == 0.0 ? nlohmann::json("inf") : nlohmann::json(1.0 / inv_s0_);
  return {{"r0", r0_}, {"p0", p0_}, {"q0", q0_}, {"s0", s0}, {"alpha", alpha_}};
}

double OffDiagExponents::identity_residual() const {
  double worst = 0.0;
  const double q_over_s0 = q() * inv_s0_;
  worst = std::max(worst, std::abs((1.0 + beta()) - q0_ / q()));
  worst = std::max(worst, std::abs((1.0 - q_over_s0 * (1.0 + beta())) - q0_ * inv_delta0()));
  worst = std::max(worst, std::abs((inv_q() - 1.0 / q0_) - (1.0 / r0_ - 1.0 / p0_)));
  return worst;
}

}  // namespace mwlab
