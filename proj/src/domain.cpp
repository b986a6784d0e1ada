#include "tumorsim/domain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tumorsim/error.hpp"

namespace tumorsim {

Grid::Grid(int dim, double length, int steps)
    : dim_(dim), length_(length), steps_(steps), spacing_(length / steps) {}

std::size_t Grid::node_count() const noexcept {
  const std::size_t side = nodes_per_side();
  return dim_ == 2 ? side * side : side;
}

std::array<double, 2> Grid::position(std::size_t node) const noexcept {
  const std::size_t side = nodes_per_side();
  if (dim_ == 1) return {coordinate(node), 0.0};
  return {coordinate(node % side), coordinate(node / side)};
}

Grid build_grid(int dim, double length, int steps) {
  if (dim != 1 && dim != 2) {
    throw Error(ErrorCode::ConfigError, "grid dimension must be 1 or 2, got " + std::to_string(dim));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw Error(ErrorCode::ConfigError, "domain length must be positive");
  }
  if (steps < 2) {
    throw Error(ErrorCode::BadResolution, "need at least 2 steps per side, got " + std::to_string(steps));
  }
  return Grid(dim, length, steps);
}

std::vector<double> trapezoid_weights(const Grid& grid) {
  const std::size_t side = grid.nodes_per_side();
  std::vector<double> w1(side, grid.spacing());
  w1.front() *= 0.5;
  w1.back() *= 0.5;
  if (grid.dim() == 1) return w1;
  std::vector<double> w(side * side);
  for (std::size_t j = 0; j < side; ++j)
    for (std::size_t i = 0; i < side; ++i) w[j * side + i] = w1[i] * w1[j];
  return w;
}

Field::Field(const Grid& grid, double value) : grid_(grid), values_(grid.node_count(), value) {}

Field::Field(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.node_count()) {
    throw Error(ErrorCode::GridMismatch, "field has " + std::to_string(values_.size()) +
                                             " values for " + std::to_string(grid_.node_count()) +
                                             " nodes");
  }
}

double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }
double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double max_abs_difference(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw Error(ErrorCode::GridMismatch, "fields live on different grids");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void check_region(const Region& region, const Grid& grid) {
  for (int axis = 0; axis < grid.dim(); ++axis) {
    const double lo = region.lower[axis];
    const double hi = region.upper[axis];
    if (!(lo <= hi) || lo < 0.0 || hi > grid.length()) {
      throw Error(ErrorCode::ConfigError, "region bounds [" + std::to_string(lo) + ", " +
                                              std::to_string(hi) + "] must lie ordered inside [0, " +
                                              std::to_string(grid.length()) + "]");
    }
  }
}

void laplacian(const Grid& grid, std::span<const double> u, std::span<double> out) {
  const std::size_t side = grid.nodes_per_side();
  const std::size_t last = side - 1;
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  // Second difference along one line with reflected ghost nodes.
  auto second_diff = [last](const double* line, std::size_t stride, std::size_t i) {
    const double left = i == 0 ? line[stride] : line[(i - 1) * stride];
    const double right = i == last ? line[(last - 1) * stride] : line[(i + 1) * stride];
    return left - 2.0 * line[i * stride] + right;
  };
  if (grid.dim() == 1) {
    for (std::size_t i = 0; i < side; ++i) out[i] = second_diff(u.data(), 1, i) * inv_h2;
    return;
  }
  for (std::size_t j = 0; j < side; ++j) {
    const double* row = u.data() + j * side;
    const double* col_base = u.data();
    for (std::size_t i = 0; i < side; ++i) {
      const double dxx = second_diff(row, 1, i);
      const double dyy = second_diff(col_base + i, side, j);
      out[j * side + i] = (dxx + dyy) * inv_h2;
    }
  }
}

Field laplacian(const Field& u) {
  Field out(u.grid());
  laplacian(u.grid(), u.values(), out.values());
  return out;
}

Field indicator(const Region& region, const Grid& grid) {
  check_region(region, grid);
  Field chi(grid);
  std::size_t inside = 0;
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const auto pos = grid.position(node);
    bool in = true;
    for (int axis = 0; axis < grid.dim(); ++axis) {
      in = in && pos[axis] >= region.lower[axis] && pos[axis] <= region.upper[axis];
    }
    if (in) {
      chi[node] = 1.0;
      ++inside;
    }
  }
  if (inside == 0) throw Error(ErrorCode::EmptyRegion, "no grid node lies inside the region");
  return chi;
}

namespace {

// Covered fraction of node i's dual cell along one axis.
double axis_fraction(const Grid& grid, std::size_t i, double lo, double hi) {
  const double h = grid.spacing();
  const double x = grid.coordinate(i);
  const double cell_lo = std::max(0.0, x - 0.5 * h);
  const double cell_hi = std::min(grid.length(), x + 0.5 * h);
  const double overlap = std::min(cell_hi, hi) - std::max(cell_lo, lo);
  double f = overlap / (cell_hi - cell_lo);
  // Snap rounding noise so symmetric regions give symmetric fields.
  constexpr double snap = 1e-12;
  if (f < snap) f = 0.0;
  if (f > 1.0 - snap) f = 1.0;
  return f;
}

}  // namespace

Field coverage_fraction(const Region& region, const Grid& grid) {
  check_region(region, grid);
  const std::size_t side = grid.nodes_per_side();
  std::vector<double> fx(side), fy(side, 1.0);
  for (std::size_t i = 0; i < side; ++i) fx[i] = axis_fraction(grid, i, region.lower[0], region.upper[0]);
  if (grid.dim() == 2) {
    for (std::size_t j = 0; j < side; ++j) fy[j] = axis_fraction(grid, j, region.lower[1], region.upper[1]);
  }
  Field chi(grid);
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    chi[node] = grid.dim() == 1 ? fx[node] : fx[node % side] * fy[node / side];
  }
  if (chi.max() == 0.0) throw Error(ErrorCode::EmptyRegion, "region covers no part of any cell");
  return chi;
}

}  // namespace tumorsim
