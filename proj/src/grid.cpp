#include "mwlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mwlab/errors.hpp"
#include "mwlab/numeric.hpp"

namespace mwlab {

Grid Grid::make(int dimension, int level) {
  if (dimension != 1 && dimension != 2) {
    throw ConfigError("grid.d must be 1 or 2, got " + std::to_string(dimension));
  }
  if (level < 2 || level > 14) {
    throw ConfigError("grid.L must satisfy 2 <= L <= 14, got " + std::to_string(level));
  }
  return Grid(dimension, level);
}

Grid make_grid(int dimension, int level) { return Grid::make(dimension, level); }

std::size_t Grid::cell_count() const noexcept {
  return std::size_t{1} << (static_cast<std::size_t>(dimension_) * static_cast<std::size_t>(level_));
}

double Grid::cell_size() const noexcept { return std::ldexp(1.0, -level_); }

double Grid::cell_volume() const noexcept { return std::ldexp(1.0, -dimension_ * level_); }

std::array<int, 2> Grid::extent() const noexcept {
  return {cells_per_axis(), dimension_ == 2 ? cells_per_axis() : 1};
}

Box intersect(const Box& a, const Box& b) noexcept {
  Box out;
  for (int k = 0; k < 2; ++k) {
    out.lo[k] = std::max(a.lo[k], b.lo[k]);
    out.hi[k] = std::max(out.lo[k], std::min(a.hi[k], b.hi[k]));
  }
  return out;
}

Box domain_box(const Grid& grid) noexcept {
  const auto ext = grid.extent();
  return Box{{0, 0}, {ext[0], ext[1]}};
}

double DyadicCube::volume(const Grid& grid) const noexcept {
  return static_cast<double>(cell_count()) * grid.cell_volume();
}

std::string DyadicCube::describe() const {
  std::ostringstream os;
  os << "l" << level << ":k" << offset[0];
  if (box.hi[1] - box.lo[1] > 1 || offset[1] != 0) os << "," << offset[1];
  if (shift[0] != 0 || shift[1] != 0) os << ":s" << shift[0] << shift[1];
  os << ":[" << box.lo[0] << "," << box.hi[0] << ")";
  if (box.hi[1] - box.lo[1] > 1 || box.lo[1] != 0) os << "x[" << box.lo[1] << "," << box.hi[1] << ")";
  return os.str();
}

DyadicCube dyadic_cube(const Grid& grid, int level, std::array<int, 2> offset) {
  if (level < 0 || level > grid.level()) {
    throw ConfigError("cube level " + std::to_string(level) + " outside 0.." + std::to_string(grid.level()));
  }
  const int side = 1 << (grid.level() - level);
  const int count = 1 << level;
  DyadicCube cube;
  cube.level = level;
  cube.offset = offset;
  for (int a = 0; a < 2; ++a) {
    if (a >= grid.dimension()) {
      cube.offset[a] = 0;
      cube.box.lo[a] = 0;
      cube.box.hi[a] = 1;
      continue;
    }
    if (offset[a] < 0 || offset[a] >= count) {
      throw ConfigError("cube offset " + std::to_string(offset[a]) + " outside the domain at level " +
                        std::to_string(level));
    }
    cube.box.lo[a] = offset[a] * side;
    cube.box.hi[a] = (offset[a] + 1) * side;
  }
  return cube;
}

std::vector<DyadicCube> children(const Grid& grid, const DyadicCube& cube) {
  if (cube.level >= grid.level()) return {};
  std::vector<DyadicCube> out;
  const int ny = grid.dimension() == 2 ? 2 : 1;
  for (int dy = 0; dy < ny; ++dy) {
    for (int dx = 0; dx < 2; ++dx) {
      out.push_back(dyadic_cube(grid, cube.level + 1,
                                {2 * cube.offset[0] + dx, grid.dimension() == 2 ? 2 * cube.offset[1] + dy : 0}));
    }
  }
  return out;
}

Box tripled(const Grid& grid, const DyadicCube& cube) {
  const auto ext = grid.extent();
  Box out = cube.box;
  for (int a = 0; a < grid.dimension(); ++a) {
    const int side = cube.box.hi[a] - cube.box.lo[a];
    out.lo[a] = std::max(0, cube.box.lo[a] - side);
    out.hi[a] = std::min(ext[a], cube.box.hi[a] + side);
  }
  return out;
}

CubeFamily::CubeFamily(const Grid& grid, bool shifted, int min_level)
    : grid_(grid), shifted_(shifted), min_level_(min_level) {
  if (min_level < 0 || min_level > grid.level()) {
    throw ConfigError("cube family min_level must lie in 0..L");
  }
  const int d = grid.dimension();
  for (int level = min_level; level <= grid.level(); ++level) {
    const int side = 1 << (grid.level() - level);
    // Distinct shift amounts per axis; a one-third shift that rounds to a
    // shift already present reproduces an existing lattice.
    std::vector<std::pair<int, int>> shifts{{0, 0}};
    if (shifted) {
      for (int s = 1; s <= 2; ++s) {
        const int cells = (s * side) / 3;
        const bool seen = std::any_of(shifts.begin(), shifts.end(), [&](const auto& p) { return p.second == cells; });
        if (!seen) shifts.emplace_back(s, cells);
      }
    }
    for (const auto& sy : (d == 2 ? shifts : std::vector<std::pair<int, int>>{{0, 0}})) {
      for (const auto& sx : shifts) {
        Lattice lat;
        lat.level = level;
        lat.side = side;
        lat.shift_index = {sx.first, sy.first};
        lat.shift_cells = {sx.second, sy.second};
        lattices_.push_back(lat);
      }
    }
  }
}

std::string CubeFamily::descriptor() const {
  std::string out = shifted_ ? "dyadic+thirds" : "dyadic";
  if (min_level_ > 0) out += ":min" + std::to_string(min_level_);
  return out;
}

std::vector<DyadicCube> CubeFamily::cubes() const {
  std::vector<DyadicCube> out;
  std::set<Box> seen;
  for_each([&](const DyadicCube& c) {
    if (seen.insert(c.box).second) out.push_back(c);
  });
  return out;
}

CubeFamily cube_family(const Grid& grid, bool shifted) { return CubeFamily(grid, shifted); }

GridFunction::GridFunction(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.cell_count()) {
    throw ConfigError("grid function has " + std::to_string(values_.size()) + " values, grid has " +
                      std::to_string(grid_.cell_count()) + " cells");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
      throw ConfigError("grid function value at cell " + std::to_string(i) + " is not a finite nonnegative number");
    }
  }
}

GridFunction GridFunction::constant(const Grid& grid, double value) {
  return GridFunction(grid, std::vector<double>(grid.cell_count(), value));
}

double GridFunction::max() const noexcept { return *std::max_element(values_.begin(), values_.end()); }
double GridFunction::min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }

bool GridFunction::is_zero() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

Weight::Weight(GridFunction values) : values_(std::move(values)) {
  min_ = values_.min();
  max_ = values_.max();
  if (!(min_ > 0.0)) throw ConfigError("weight must be strictly positive on every cell");
}

Weight pow(const Weight& w, double exponent) {
  if (exponent == 1.0) return w;
  return Weight(w.grid(), map_values(w.values(), [&](double v) { return std::pow(v, exponent); }));
}

Weight operator*(const Weight& a, const Weight& b) {
  check_same_grid(a.grid(), b.grid(), "weight product");
  std::vector<double> out(a.values().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return Weight(a.grid(), std::move(out));
}

GridFunction operator*(const GridFunction& a, const GridFunction& b) {
  check_same_grid(a.grid(), b.grid(), "function product");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return GridFunction(a.grid(), std::move(out));
}

GridFunction scale(const GridFunction& f, double c) {
  return GridFunction(f.grid(), map_values(f.values(), [&](double v) { return c * v; }));
}

GridFunction indicator(const Grid& grid, const std::vector<bool>& mask) {
  if (mask.size() != grid.cell_count()) throw ConfigError("mask length does not match the grid");
  std::vector<double> out(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) out[i] = mask[i] ? 1.0 : 0.0;
  return GridFunction(grid, std::move(out));
}

void check_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw ComputeError(std::string(what) + ": operands live on different grids");
}

namespace {

void check_box(const Grid& grid, const Box& box) {
  if (!domain_box(grid).contains(box)) throw ComputeError("cube does not belong to this grid");
}

}  // namespace

double integrate(const GridFunction& f, const Box& box, const Weight* mu) {
  check_box(f.grid(), box);
  if (mu) check_same_grid(f.grid(), mu->grid(), "integrate");
  KahanSum sum;
  const auto v = f.values();
  if (mu) {
    const auto m = mu->values();
    for_each_cell(f.grid(), box, [&](std::size_t i) { sum.add(v[i] * m[i]); });
  } else {
    for_each_cell(f.grid(), box, [&](std::size_t i) { sum.add(v[i]); });
  }
  return sum.value() * f.grid().cell_volume();
}

double integrate(const GridFunction& f, const DyadicCube& Q, const Weight* mu) { return integrate(f, Q.box, mu); }

double measure(const Weight& w, const Box& box) { return integrate(w.function(), box, nullptr); }

double measure(const Weight& w, const DyadicCube& Q) { return measure(w, Q.box); }

double average(const GridFunction& f, const Box& box, const Weight* mu) {
  check_box(f.grid(), box);
  if (box.empty()) throw ComputeError("average over an empty box");
  const auto v = f.values();
  const double ref = v[f.grid().index(box.lo[0], box.lo[1])];
  KahanSum dev;
  KahanSum mass;
  if (mu) {
    const auto m = mu->values();
    for_each_cell(f.grid(), box, [&](std::size_t i) {
      dev.add((v[i] - ref) * m[i]);
      mass.add(m[i]);
    });
    return ref + dev.value() / mass.value();
  }
  for_each_cell(f.grid(), box, [&](std::size_t i) { dev.add(v[i] - ref); });
  return ref + dev.value() / static_cast<double>(box.cell_count());
}

std::pair<double, double> ess_bounds(std::span<const double> values, const Grid& grid, const Box& box) {
  const Box clipped = intersect(box, domain_box(grid));
  if (clipped.empty()) throw ComputeError("ess_bounds: cube does not meet the domain");
  double lo = kInf;
  double hi = -kInf;
  for_each_cell(grid, clipped, [&](std::size_t i) {
    lo = std::min(lo, values[i]);
    hi = std::max(hi, values[i]);
  });
  return {lo, hi};
}

std::pair<double, double> ess_bounds(const GridFunction& f, const DyadicCube& Q) {
  return ess_bounds(f.values(), f.grid(), Q.box);
}

double level_measure(const GridFunction& f, double t, const Weight& w) {
  check_same_grid(f.grid(), w.grid(), "level_measure");
  KahanSum sum;
  const auto v = f.values();
  const auto m = w.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] > t) sum.add(m[i]);
  }
  return sum.value() * f.grid().cell_volume();
}

}  // namespace mwlab
