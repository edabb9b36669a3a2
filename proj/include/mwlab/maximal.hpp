#pragma once

// Maximal operators over a cube family: M_mu, the multilinear M of plain
// averages, the local/global comparison on a cube, and the Rubio de Francia
// iteration used to manufacture A_1 weights.

#include <optional>
#include <span>

#include "mwlab/grid.hpp"

namespace mwlab {

struct MaximalConfig {
  CubeFamily family;
  /// Absent means Lebesgue measure.
  std::optional<Weight> mu;
};

/// M_mu g(x) = sup over family cubes Q containing x of mu-average of g on Q.
GridFunction maximal(const GridFunction& g, const CubeFamily& family, const Weight* mu = nullptr);
GridFunction maximal(const GridFunction& g, const MaximalConfig& cfg);

/// sup over Q containing x of prod_i (1/|Q|) int_Q f_i. Throws ComputeError
/// for an empty argument list or mixed grids.
GridFunction multilinear_maximal(std::span<const GridFunction> fs, const CubeFamily& family);

struct SplitReport {
  /// max over cells of Q of M_mu g / (ess inf_Q M_mu g + M_mu(g chi_3Q))
  double upper = 0.0;
  /// min over cells of Q of the same quotient
  double lower = 0.0;
  double ess_inf = 0.0;
};

SplitReport local_global_split_check(const GridFunction& g, const Weight& mu, const DyadicCube& Q,
                                     const CubeFamily& family);

/// max over probes h of ||M h||_{L^2(mu)} / ||h||_{L^2(mu)}; the probes are g
/// itself, a corner cell, a central cell and the left half of the domain.
double probe_operator_norm(const GridFunction& g, const CubeFamily& family, const Weight* mu = nullptr);

struct RdfResult {
  Weight weight;
  /// Measured bound, twice the probe norm.
  double K = 1.0;
};

/// Rg = sum_{j=0}^{k} M^j g / (2K)^j, floored at 2^-40 max Rg.
/// Throws ComputeError for g == 0 and ConfigError unless 0 <= k <= 12.
RdfResult rdf_iterate(const GridFunction& g, int k, const CubeFamily& family, const Weight* mu = nullptr);

}  // namespace mwlab
