#pragma once

// The bilinear operators N, T = N^{1/2} and the linear N* on the unit
// interval, the dyadic layer decomposition, and checks of the endpoint
// bounds they satisfy.
//
// Offsets y are multiples k*dy of the cell size with k != 0; cell k carries
// the kernel |k dy|^{-2} (N) or |k dy|^{-1} (N*) except for |k| = 1, where
// the average of the kernel over [dy/2, 3dy/2] is used.

#include <span>
#include <vector>

#include "mwlab/grid.hpp"
#include "mwlab/weights.hpp"

namespace mwlab {

/// N(f,g)(x) = sup_t t |{y != 0 : f(x+y) g(x+y) / y^2 > t}|^2. Requires d = 1.
GridFunction operator_N(const GridFunction& f, const GridFunction& g);
/// N(f,g) evaluated at a single cell.
double operator_N_at(const GridFunction& f, const GridFunction& g, std::size_t cell);
/// T = N^{1/2} pointwise.
GridFunction operator_T(const GridFunction& f, const GridFunction& g);
/// N*(f)(x) = sup_t t |{y != 0 : f(x+y)/|y| > t}|. Requires d = 1.
GridFunction operator_Nstar(const GridFunction& f);

struct HypothesisReport {
  /// sup over cells of T(l1 chi_E, l2 chi_F) / ((l1 l2)^alpha M(chi_E, chi_F)^alpha)
  double ratio = 0.0;
  std::size_t witness_cell = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Pointwise comparison of T on scaled indicators against the bilinear
/// maximal function of the indicators.
HypothesisReport hypothesis_check(const std::vector<bool>& E, const std::vector<bool>& F, double lambda1,
                                  double lambda2, double alpha, const Grid& grid, const CubeFamily& family);

struct LayerDecomposition {
  /// Occupied layers j in increasing order.
  std::vector<int> layers;
  /// masks[k] = {2^{layers[k]} <= f < 2^{layers[k]+1}}.
  std::vector<std::vector<bool>> masks;
};

LayerDecomposition layer_decompose(const GridFunction& f);
/// sum_j 2^j chi_{E_j}.
GridFunction layer_floor(const LayerDecomposition& dec, const Grid& grid);

struct LayerBoundReport {
  /// ||N(f1,f2)||^{1/2}_{L^{q/2,inf}((w1 w2)^{1/2})}
  double lhs = 0.0;
  /// sum_{i,j} 2^{j/2} 2^{i/2} w1(E_j)^{1/(2q)} w2(F_i)^{1/(2q)}
  double layer_sum = 0.0;
  /// prod_i ||f_i||^{1/2}_{L^{q,1/2}(w_i)}
  double norm_product = 0.0;
  double lhs_ratio = 0.0;
  double layer_ratio = 0.0;
  ConstantEstimate audit;
};

/// Both steps of the layer argument for S = N at alpha = 1/2, p = q/2,
/// p1 = p2 = q. The weights are audited in the restricted class for (q, q).
LayerBoundReport theorem41_bound_check(const GridFunction& f1, const GridFunction& f2, const WeightVector& ws,
                                      double q, const CubeFamily& family);

struct CorollaryReport {
  /// ||N(f1,f2)||_{L^{1/2,inf}((v1 v2)^{1/2})}
  double lhs = 0.0;
  /// prod_i ||f_i||_{L^{1,1/(2q)}(v_i)}
  double rhs = 0.0;
  double constant = 0.0;
  ConstantEstimate audit;
};

CorollaryReport corollary_endpoint_check(const GridFunction& f1, const GridFunction& f2, const WeightVector& vs,
                                         double q, const CubeFamily& family);

struct SeriesReport {
  /// ||sum_j T_j(f)||_{L^{p,inf}(w)} / prod_i ||f_i||_{L^{p_i,1}(w_i)}
  double aggregate = 0.0;
  /// the same ratio for each T_j = c_j M over cubes of level >= j
  std::vector<double> components;
  /// p' * sum_j of the component ratios
  double bound = 0.0;
  bool pass = true;
};

/// Aggregation of T_j = c_j M restricted to cubes of level >= j (j = 0, 1, ...),
/// for exponents p_i with p = (sum 1/p_i)^{-1} > 1.
SeriesReport series_sum_check(std::span<const GridFunction> fs, const WeightVector& ws, std::span<const double> p,
                              std::span<const double> c, bool shifted);

struct GrowthRow {
  int spikes = 0;
  double ratio = 0.0;
};

/// ||N* f||_{L^{1,inf}} / ||f||_{L^1} for f made of n one-cell spikes at
/// (k - 1/2)/n, k = 1..n, with total mass 1.
std::vector<GrowthRow> nstar_growth(const Grid& grid, std::span<const int> spike_counts);
GridFunction spike_family(const Grid& grid, int spikes);

}  // namespace mwlab
