#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace tumorsim {

/// Uniform node-centred grid on [0, L] or [0, L]^2 with n steps per side.
/// Nodes sit at i * h, i = 0..n, boundary nodes included. In 2D the node
/// index is iy * (n + 1) + ix (x varies fastest).
class Grid {
 public:
  Grid() = default;

  int dim() const noexcept { return dim_; }
  double length() const noexcept { return length_; }
  int steps() const noexcept { return steps_; }
  double spacing() const noexcept { return spacing_; }
  std::size_t nodes_per_side() const noexcept { return static_cast<std::size_t>(steps_) + 1; }
  std::size_t node_count() const noexcept;

  double coordinate(std::size_t i) const noexcept { return static_cast<double>(i) * spacing_; }
  /// (x, y) of a node; y is 0 in 1D.
  std::array<double, 2> position(std::size_t node) const noexcept;

  bool operator==(const Grid&) const = default;

 private:
  friend Grid build_grid(int dim, double length, int steps);
  Grid(int dim, double length, int steps);

  int dim_ = 1;
  double length_ = 1.0;
  int steps_ = 2;
  double spacing_ = 0.5;
};

/// Throws Error(BadResolution) for n < 2 and Error(ConfigError) for a bad
/// dimension or non-positive length.
Grid build_grid(int dim, double length, int steps);

/// Trapezoidal quadrature weights (tensor product in 2D).
std::vector<double> trapezoid_weights(const Grid& grid);

/// One real value per grid node.
class Field {
 public:
  Field() = default;
  explicit Field(const Grid& grid, double value = 0.0);
  Field(const Grid& grid, std::vector<double> values);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  double max() const;
  double min() const;
  double max_abs() const;
  bool all_finite() const;

  bool operator==(const Field&) const = default;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Largest pointwise |a - b|. Throws Error(GridMismatch) for different grids.
double max_abs_difference(const Field& a, const Field& b);

/// Axis-aligned closed interval (1D) or box (2D).
struct Region {
  std::array<double, 2> lower{0.0, 0.0};
  std::array<double, 2> upper{0.0, 0.0};

  static Region interval(double a, double b) { return {{a, 0.0}, {b, 0.0}}; }
  static Region box(double x0, double x1, double y0, double y1) { return {{x0, y0}, {x1, y1}}; }

  bool operator==(const Region&) const = default;
};

/// Throws Error(ConfigError) when the region leaves [0, L] or is inverted.
void check_region(const Region& region, const Grid& grid);

/// Second-order Laplacian with homogeneous Neumann closure by ghost-node
/// reflection (u_{-1} = u_1, u_{n+1} = u_{n-1}).
Field laplacian(const Field& u);

/// Same stencil writing into a caller-owned buffer; `out` must not alias `u`.
void laplacian(const Grid& grid, std::span<const double> u, std::span<double> out);

/// 1 at nodes inside the closed region, 0 elsewhere. Throws
/// Error(EmptyRegion) if the region catches no node.
Field indicator(const Region& region, const Grid& grid);

/// Fraction of each node's dual cell ([x - h/2, x + h/2] clipped to the
/// domain) covered by the region. Weighted by the dual-cell volumes (the
/// trapezoid weights) the fractions sum to the measure of the region.
Field coverage_fraction(const Region& region, const Grid& grid);

}  // namespace tumorsim
