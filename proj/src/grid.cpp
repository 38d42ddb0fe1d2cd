#include "devlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "devlab/error.hpp"

namespace devlab {

Grid::Grid(int dim, std::span<const Interval> bounds, std::span<const int> nodes) : dim_(dim) {
  if (dim != 1 && dim != 2) {
    throw Error(ErrorCode::InvalidArgument, "grid dimension must be 1 or 2, got " + std::to_string(dim));
  }
  if (bounds.size() < static_cast<std::size_t>(dim) || nodes.size() < static_cast<std::size_t>(dim)) {
    throw Error(ErrorCode::InvalidArgument, "grid needs bounds and node counts for every axis");
  }
  for (int a = 0; a < dim; ++a) {
    if (nodes[a] < kMinNodes) {
      throw Error(ErrorCode::InvalidArgument,
                  "axis " + std::to_string(a) + " has " + std::to_string(nodes[a]) +
                      " nodes; at least 5 are required");
    }
    if (!(bounds[a].hi > bounds[a].lo) || !std::isfinite(bounds[a].lo) || !std::isfinite(bounds[a].hi)) {
      throw Error(ErrorCode::InvalidArgument, "axis " + std::to_string(a) + " has an empty interval");
    }
    bounds_[a] = bounds[a];
    n_[a] = nodes[a];
    h_[a] = (bounds[a].hi - bounds[a].lo) / (nodes[a] - 1);
  }
  if (dim == 1) {
    bounds_[1] = Interval{0.0, 0.0};
    n_[1] = 1;
    h_[1] = 1.0;
  }

  interior_pos_.assign(size(), -1);
  for (std::size_t k = 0; k < size(); ++k) {
    if (is_boundary(k)) {
      boundary_.push_back(k);
    } else {
      interior_pos_[k] = static_cast<long>(interior_.size());
      interior_.push_back(k);
    }
  }
}

bool Grid::is_boundary(std::size_t node) const noexcept {
  const int i = ix(node);
  if (i == 0 || i == n_[0] - 1) return true;
  if (dim_ == 2) {
    const int j = iy(node);
    return j == 0 || j == n_[1] - 1;
  }
  return false;
}

double Grid::weight(std::size_t node) const noexcept {
  auto axis_weight = [this](int axis, int i) {
    return (i == 0 || i == n_[axis] - 1) ? 0.5 * h_[axis] : h_[axis];
  };
  double w = axis_weight(0, ix(node));
  if (dim_ == 2) w *= axis_weight(1, iy(node));
  return w;
}

Grid make_grid(int dim, std::span<const Interval> bounds, std::span<const int> nodes) {
  return Grid(dim, bounds, nodes);
}

Grid make_grid_1d(Interval bounds, int nodes) {
  const std::array<Interval, 1> b{bounds};
  const std::array<int, 1> n{nodes};
  return Grid(1, b, n);
}

Grid make_grid_2d(Interval bx, Interval by, int nx, int ny) {
  const std::array<Interval, 2> b{bx, by};
  const std::array<int, 2> n{nx, ny};
  return Grid(2, b, n);
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw Error(ErrorCode::GridMismatch, "fields live on different grids");
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(Grid grid) : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw Error(ErrorCode::InvalidArgument, "scalar field has " + std::to_string(values_.size()) +
                                                " values for " + std::to_string(grid_.size()) + " nodes");
  }
}

bool ScalarField::is_clamped() const noexcept {
  return std::all_of(grid_.boundary().begin(), grid_.boundary().end(),
                     [this](std::size_t k) { return values_[k] == 0.0; });
}

double ScalarField::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  ScalarField out(a.grid());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
  return out;
}

// ---------------------------------------------------------------------------

TensorField::TensorField(Grid grid)
    : grid_(std::move(grid)), values_(grid_.size() * grid_.tensor_components(), 0.0) {}

TensorField::TensorField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size() * grid_.tensor_components()) {
    throw Error(ErrorCode::InvalidArgument, "tensor field has " + std::to_string(values_.size()) +
                                                " values; expected " +
                                                std::to_string(grid_.size() * grid_.tensor_components()));
  }
}

double TensorField::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

TensorField& TensorField::operator+=(const TensorField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

TensorField& TensorField::operator-=(const TensorField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

TensorField& TensorField::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

TensorField operator+(TensorField a, const TensorField& b) { return a += b; }
TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }
TensorField operator*(double s, TensorField a) { return a *= s; }

// ---------------------------------------------------------------------------

double integrate(const ScalarField& field) {
  const Grid& g = field.grid();
  double sum = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) sum += g.weight(k) * field[k];
  return sum;
}

double inner(const TensorField& q, const TensorField& g) {
  require_same_grid(q.grid(), g.grid());
  const Grid& grid = q.grid();
  const int nc = q.components();
  double sum = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double contraction = 0.0;
    for (int c = 0; c < nc; ++c) {
      contraction += component_multiplicity(grid.dim(), c) * q(k, c) * g(k, c);
    }
    sum += grid.weight(k) * contraction;
  }
  return sum;
}

}  // namespace devlab
