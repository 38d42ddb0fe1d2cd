#pragma once

#include <Eigen/Dense>

#include <optional>

#include "devlab/grid.hpp"

namespace devlab {

enum class CoeffMode { Direct, Inverse };

/// The SPD material map A acting nodewise on symmetric tensors.
///
/// Three representations are supported: the identity, a positive scalar field
/// times the identity, and a spatially constant SPD matrix. The matrix acts on
/// the orthonormal coordinates (q11, q22, sqrt(2) q12) of a 2D tensor, so that
/// A is self-adjoint for the contraction q : g and its eigenvalues are exactly
/// the spectral bounds. In 1D the matrix is 1x1.
class CoefficientTensor {
 public:
  enum class Kind { Identity, Scalar, Matrix };

  static CoefficientTensor identity(const Grid& grid);
  /// Spatially constant c * identity.
  static CoefficientTensor scaled_identity(const Grid& grid, double c);
  /// c(x) * identity; throws NotSPD unless c > 0 at every node.
  static CoefficientTensor scalar_field(ScalarField c);
  /// Throws NotSPD for a nonsymmetric or indefinite matrix, InvalidArgument
  /// for a size other than d(d+1)/2.
  static CoefficientTensor matrix(const Grid& grid, const Eigen::MatrixXd& m);

  Kind kind() const noexcept { return kind_; }
  const Grid& grid() const noexcept { return grid_; }

  /// Lower and upper spectral bounds over all nodes.
  double kappa1() const noexcept { return kappa1_; }
  double kappa2() const noexcept { return kappa2_; }

  TensorField apply(const TensorField& q, CoeffMode mode) const;

  /// Per-node block B with (A q) : g = g^T B q in stored components,
  /// contraction multiplicity included (no quadrature weight).
  Eigen::MatrixXd contraction_block(std::size_t node, CoeffMode mode) const;

  /// Scalar multiplier at a node for the Identity and Scalar kinds.
  double scalar_at(std::size_t node) const noexcept;
  const Eigen::MatrixXd& mandel_matrix() const noexcept { return matrix_; }

 private:
  CoefficientTensor(Grid grid, Kind kind) : grid_(std::move(grid)), kind_(kind) {}

  Grid grid_;
  Kind kind_;
  std::optional<ScalarField> scalar_;
  Eigen::MatrixXd matrix_;
  Eigen::MatrixXd matrix_inv_;
  double kappa1_ = 1.0;
  double kappa2_ = 1.0;
};

TensorField apply_coeff(const TensorField& q, const CoefficientTensor& a, CoeffMode mode);

/// ||q||_A = (A q, q)^{1/2}, or the A^{-1} variant.
double norm_weighted(const TensorField& q, const CoefficientTensor& a, CoeffMode mode);

}  // namespace devlab
