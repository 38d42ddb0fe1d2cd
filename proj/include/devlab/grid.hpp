#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace devlab {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Uniform tensor-product grid on a box in 1D or 2D.
///
/// Nodes are ordered lexicographically with x fastest: node (i, j) has flat
/// index i + nx * j. In 1D the second axis is collapsed to a single node.
class Grid {
 public:
  static constexpr int kMinNodes = 5;

  /// Throws Error(InvalidArgument) for dim outside {1, 2}, fewer than five
  /// nodes on an axis, or an empty interval.
  Grid(int dim, std::span<const Interval> bounds, std::span<const int> nodes);

  int dim() const noexcept { return dim_; }
  int nodes(int axis) const noexcept { return n_[axis]; }
  double spacing(int axis) const noexcept { return h_[axis]; }
  const Interval& bounds(int axis) const noexcept { return bounds_[axis]; }

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(n_[1]);
  }
  std::size_t index(int i, int j = 0) const noexcept {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(n_[0]) * j;
  }
  int ix(std::size_t node) const noexcept { return static_cast<int>(node % n_[0]); }
  int iy(std::size_t node) const noexcept { return static_cast<int>(node / n_[0]); }

  /// Coordinate a + i*h along an axis; the same expression is used everywhere
  /// so coordinates are reproducible from the index.
  double coord(int axis, int i) const noexcept { return bounds_[axis].lo + i * h_[axis]; }
  double x(std::size_t node) const noexcept { return coord(0, ix(node)); }
  double y(std::size_t node) const noexcept { return dim_ == 2 ? coord(1, iy(node)) : 0.0; }

  bool is_boundary(std::size_t node) const noexcept;

  /// Trapezoidal weight of a node (tensor product in 2D).
  double weight(std::size_t node) const noexcept;

  const std::vector<std::size_t>& interior() const noexcept { return interior_; }
  const std::vector<std::size_t>& boundary() const noexcept { return boundary_; }

  /// Position of a node in interior(), or -1 for boundary nodes.
  long interior_position(std::size_t node) const noexcept { return interior_pos_[node]; }

  /// Number of stored symmetric-tensor components per node: d(d+1)/2.
  int tensor_components() const noexcept { return dim_ == 1 ? 1 : 3; }

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.dim_ == b.dim_ && a.n_ == b.n_ && a.bounds_ == b.bounds_;
  }

 private:
  int dim_;
  std::array<Interval, 2> bounds_{};
  std::array<int, 2> n_{1, 1};
  std::array<double, 2> h_{1.0, 1.0};
  std::vector<std::size_t> interior_;
  std::vector<std::size_t> boundary_;
  std::vector<long> interior_pos_;
};

Grid make_grid(int dim, std::span<const Interval> bounds, std::span<const int> nodes);
Grid make_grid_1d(Interval bounds, int nodes);
Grid make_grid_2d(Interval bx, Interval by, int nx, int ny);

/// One real value per node.
class ScalarField {
 public:
  explicit ScalarField(Grid grid);
  ScalarField(Grid grid, std::vector<double> values);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t node) const noexcept { return values_[node]; }
  double& operator[](std::size_t node) noexcept { return values_[node]; }
  std::size_t size() const noexcept { return values_.size(); }

  /// True when every boundary value is exactly zero.
  bool is_clamped() const noexcept;

  double max_abs() const noexcept;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s) noexcept;

 private:
  Grid grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
/// Nodewise product.
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

/// Symmetric d x d matrix per node, upper triangle only. 2D component order is
/// (q11, q22, q12); 1D has the single component q11. Storage is node-major.
class TensorField {
 public:
  explicit TensorField(Grid grid);
  TensorField(Grid grid, std::vector<double> values);

  const Grid& grid() const noexcept { return grid_; }
  int components() const noexcept { return grid_.tensor_components(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator()(std::size_t node, int comp) const noexcept {
    return values_[node * components() + comp];
  }
  double& operator()(std::size_t node, int comp) noexcept {
    return values_[node * components() + comp];
  }

  double max_abs() const noexcept;

  TensorField& operator+=(const TensorField& other);
  TensorField& operator-=(const TensorField& other);
  TensorField& operator*=(double s) noexcept;

 private:
  Grid grid_;
  std::vector<double> values_;
};

TensorField operator+(TensorField a, const TensorField& b);
TensorField operator-(TensorField a, const TensorField& b);
TensorField operator*(double s, TensorField a);

/// Contraction multiplicity of a stored component: 2 for the 2D off-diagonal.
inline double component_multiplicity(int dim, int comp) noexcept {
  return (dim == 2 && comp == 2) ? 2.0 : 1.0;
}

void require_same_grid(const Grid& a, const Grid& b);

/// Trapezoidal quadrature of a nodal field over the box.
double integrate(const ScalarField& field);

/// Quadrature of the double contraction q : g.
double inner(const TensorField& q, const TensorField& g);

}  // namespace devlab
