#pragma once

// Discrete domains for the weight laboratory: a uniform grid on the unit cube
// [0,1)^d (d = 1, 2), nonnegative cell functions, strictly positive weights,
// and the dyadic (optionally one-third shifted) cube families over which all
// suprema are taken. Functions are extended by zero outside the domain; cubes
// that stick out of the domain are clipped to the cells they cover.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mwlab {

class Grid {
 public:
  /// Throws ConfigError unless d in {1,2} and 2 <= L <= 14.
  static Grid make(int dimension, int level);

  int dimension() const noexcept { return dimension_; }
  int level() const noexcept { return level_; }
  int cells_per_axis() const noexcept { return 1 << level_; }
  std::size_t cell_count() const noexcept;
  /// Side length 2^{-L} of one cell.
  double cell_size() const noexcept;
  /// 2^{-dL}.
  double cell_volume() const noexcept;
  /// Cells along each axis; the second axis has extent 1 when d = 1.
  std::array<int, 2> extent() const noexcept;
  std::size_t index(int x, int y = 0) const noexcept {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(y) * static_cast<std::size_t>(cells_per_axis());
  }

  bool operator==(const Grid&) const = default;

 private:
  Grid(int dimension, int level) : dimension_(dimension), level_(level) {}
  int dimension_ = 1;
  int level_ = 2;
};

Grid make_grid(int dimension, int level);

/// Half-open box of cells [lo, hi) per axis.
struct Box {
  std::array<int, 2> lo{0, 0};
  std::array<int, 2> hi{1, 1};

  std::size_t cell_count() const noexcept {
    return static_cast<std::size_t>(hi[0] - lo[0]) * static_cast<std::size_t>(hi[1] - lo[1]);
  }
  bool empty() const noexcept { return hi[0] <= lo[0] || hi[1] <= lo[1]; }
  bool contains(int x, int y) const noexcept {
    return x >= lo[0] && x < hi[0] && y >= lo[1] && y < hi[1];
  }
  bool contains(const Box& other) const noexcept {
    return other.lo[0] >= lo[0] && other.hi[0] <= hi[0] && other.lo[1] >= lo[1] &&
           other.hi[1] <= hi[1];
  }
  bool operator==(const Box&) const = default;
  auto operator<=>(const Box&) const = default;
};

Box intersect(const Box& a, const Box& b) noexcept;
Box domain_box(const Grid& grid) noexcept;

/// Visit every cell index of `box` in x-fastest order.
template <class Fn>
void for_each_cell(const Grid& grid, const Box& box, Fn&& fn) {
  const auto n = static_cast<std::size_t>(grid.cells_per_axis());
  for (int y = box.lo[1]; y < box.hi[1]; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * n;
    for (int x = box.lo[0]; x < box.hi[0]; ++x) fn(row + static_cast<std::size_t>(x));
  }
}

/// A member of a (possibly shifted) dyadic family. `offset` is the lattice
/// index k per axis, `shift` the one-third shift index s in {0,1,2} per axis,
/// `box` the cells it covers after clipping to the domain.
struct DyadicCube {
  int level = 0;
  std::array<int, 2> offset{0, 0};
  std::array<int, 2> shift{0, 0};
  Box box;

  std::size_t cell_count() const noexcept { return box.cell_count(); }
  /// Lebesgue measure of the clipped cube.
  double volume(const Grid& grid) const noexcept;
  std::string describe() const;
  bool operator==(const DyadicCube&) const = default;
};

/// The unshifted dyadic cube of the given level and lattice offset.
/// Throws ConfigError when it does not lie in the domain or level > L.
DyadicCube dyadic_cube(const Grid& grid, int level, std::array<int, 2> offset);
/// The 2^d dyadic children of an unshifted cube.
std::vector<DyadicCube> children(const Grid& grid, const DyadicCube& cube);
/// The concentric cube of three times the side, clipped to the domain.
Box tripled(const Grid& grid, const DyadicCube& cube);

/// One translate class of cubes at a fixed level: all cubes
/// [k*side + shift, (k+1)*side + shift) per axis that meet the domain.
struct Lattice {
  int level = 0;
  int side = 1;
  std::array<int, 2> shift_index{0, 0};
  std::array<int, 2> shift_cells{0, 0};
};

/// Dyadic cubes of levels min_level..L, plus (when shifted) the one-third
/// shifted lattices. Cells (level L) always belong to the family.
class CubeFamily {
 public:
  CubeFamily(const Grid& grid, bool shifted, int min_level = 0);

  const Grid& grid() const noexcept { return grid_; }
  bool shifted() const noexcept { return shifted_; }
  int min_level() const noexcept { return min_level_; }
  std::string descriptor() const;
  const std::vector<Lattice>& lattices() const noexcept { return lattices_; }

  /// Visit every lattice cube (clipped boxes may repeat across lattices).
  template <class Fn>
  void for_each(Fn&& fn) const {
    for (const auto& lat : lattices_) for_each_in_lattice(lat, domain_box(grid_), fn);
  }
  /// Visit every lattice cube that meets `region`.
  template <class Fn>
  void for_each_intersecting(const Box& region, Fn&& fn) const {
    for (const auto& lat : lattices_) for_each_in_lattice(lat, region, fn);
  }

  /// Distinct cubes (by covered cells) in deterministic generation order.
  std::vector<DyadicCube> cubes() const;
  std::size_t size() const { return cubes().size(); }

 private:
  template <class Fn>
  void for_each_in_lattice(const Lattice& lat, const Box& region, Fn& fn) const;

  Grid grid_;
  bool shifted_;
  int min_level_;
  std::vector<Lattice> lattices_;
};

/// Free-function spelling of the family constructor.
CubeFamily cube_family(const Grid& grid, bool shifted);

template <class Fn>
void CubeFamily::for_each_in_lattice(const Lattice& lat, const Box& region, Fn& fn) const {
  const auto ext = grid_.extent();
  std::array<int, 2> k_lo{}, k_hi{}, side{};
  for (int a = 0; a < 2; ++a) {
    side[a] = (a < grid_.dimension()) ? lat.side : 1;
    const int s = (a < grid_.dimension()) ? lat.shift_cells[a] : 0;
    const int lo = std::max(region.lo[a], 0);
    const int hi = std::min(region.hi[a], ext[a]);
    if (hi <= lo) return;
    // cube k covers [k*side + s, (k+1)*side + s)
    auto floor_div = [](int num, int den) { return num >= 0 ? num / den : -((-num + den - 1) / den); };
    k_lo[a] = floor_div(lo - s, side[a]);
    k_hi[a] = floor_div(hi - 1 - s, side[a]);
  }
  DyadicCube cube;
  cube.level = lat.level;
  cube.shift = lat.shift_index;
  for (int ky = k_lo[1]; ky <= k_hi[1]; ++ky) {
    for (int kx = k_lo[0]; kx <= k_hi[0]; ++kx) {
      const std::array<int, 2> k{kx, ky};
      for (int a = 0; a < 2; ++a) {
        const int s = (a < grid_.dimension()) ? lat.shift_cells[a] : 0;
        const int start = k[a] * side[a] + s;
        cube.box.lo[a] = std::max(start, 0);
        cube.box.hi[a] = std::min(start + side[a], ext[a]);
      }
      cube.offset = k;
      if (!cube.box.empty()) fn(static_cast<const DyadicCube&>(cube));
    }
  }
}

/// Nonnegative finite sample values, one per cell.
class GridFunction {
 public:
  /// Throws ConfigError on a length mismatch or negative/non-finite values.
  GridFunction(const Grid& grid, std::vector<double> values);

  static GridFunction constant(const Grid& grid, double value);
  static GridFunction zeros(const Grid& grid) { return constant(grid, 0.0); }

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }
  double max() const noexcept;
  double min() const noexcept;
  bool is_zero() const noexcept;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// A strictly positive GridFunction, doubling as the measure w dx.
class Weight {
 public:
  /// Throws ConfigError if some value is not strictly positive.
  explicit Weight(GridFunction values);
  Weight(const Grid& grid, std::vector<double> values) : Weight(GridFunction(grid, std::move(values))) {}

  static Weight ones(const Grid& grid) { return Weight(GridFunction::constant(grid, 1.0)); }

  const Grid& grid() const noexcept { return values_.grid(); }
  const GridFunction& function() const noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_.values(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }
  /// max/min.
  double spread() const noexcept { return max_ / min_; }

 private:
  GridFunction values_;
  double min_ = 1.0;
  double max_ = 1.0;
};

// Pointwise algebra.
template <class Fn>
std::vector<double> map_values(std::span<const double> a, Fn&& fn) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = fn(a[i]);
  return out;
}
Weight pow(const Weight& w, double exponent);
Weight operator*(const Weight& a, const Weight& b);
GridFunction operator*(const GridFunction& a, const GridFunction& b);
GridFunction scale(const GridFunction& f, double c);
GridFunction indicator(const Grid& grid, const std::vector<bool>& mask);

/// Sum over the cells of Q of f * mu * cell_volume (mu = 1 when absent).
/// Throws ComputeError when Q does not belong to f's grid.
double integrate(const GridFunction& f, const DyadicCube& Q, const Weight* mu = nullptr);
double integrate(const GridFunction& f, const Box& box, const Weight* mu = nullptr);
/// w(box) = integral of w over the box.
double measure(const Weight& w, const Box& box);
double measure(const Weight& w, const DyadicCube& Q);
/// Average of f over the box against mu (mu = 1 when absent), computed as a
/// compensated deviation from the first cell value so constants are exact.
double average(const GridFunction& f, const Box& box, const Weight* mu = nullptr);

/// Cell-wise (min, max) of f over Q. Throws ComputeError for an empty box.
std::pair<double, double> ess_bounds(const GridFunction& f, const DyadicCube& Q);
std::pair<double, double> ess_bounds(std::span<const double> values, const Grid& grid, const Box& box);

/// w({f > t}).
double level_measure(const GridFunction& f, double t, const Weight& w);

void check_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace mwlab
