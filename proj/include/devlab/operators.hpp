#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "devlab/coefficient.hpp"
#include "devlab/grid.hpp"

namespace devlab {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Clamped boundary marker: v = 0 and dv/dn = 0 on the boundary. Boundary
/// values are zero; the normal-derivative condition enters through even
/// ghost reflection (v_{-1} = v_1) in the Hessian stencil.
struct ClampedBC {};

/// The discrete Hessian on clamped fields and its quadrature-weighted adjoint.
///
/// The Hessian is assembled once per grid as a sparse matrix mapping the
/// interior values of a clamped field to all stored tensor components. The
/// divDiv operator is defined as W_V^{-1} Lambda^T W_Y, which makes
/// (hessian(v), q) = (v, div_div(q)) hold to rounding for every clamped v.
class HessianOperator {
 public:
  explicit HessianOperator(Grid grid, ClampedBC bc = {});

  const Grid& grid() const noexcept { return grid_; }
  const SparseMatrix& matrix() const noexcept { return lambda_; }
  std::size_t unknowns() const noexcept { return grid_.interior().size(); }

  /// Throws NotClamped when a boundary value is nonzero.
  TensorField apply(const ScalarField& v) const;
  /// Values on boundary nodes are zero: they carry no information since
  /// clamped fields vanish there.
  ScalarField adjoint(const TensorField& q) const;

  /// H = Lambda^T W_{Y,A} Lambda on interior unknowns.
  SparseMatrix weighted_bilaplacian(const CoefficientTensor& a) const;
  /// W_{Y,A}: block diagonal of quadrature weight times A's contraction block.
  SparseMatrix weighted_tensor_mass(const CoefficientTensor& a, CoeffMode mode) const;

  /// Interior quadrature weights (W_V restricted to unknowns).
  const Eigen::VectorXd& interior_weights() const noexcept { return w_interior_; }

  Eigen::VectorXd gather(const ScalarField& v) const;
  ScalarField scatter(const Eigen::VectorXd& x) const;

 private:
  Grid grid_;
  SparseMatrix lambda_;
  Eigen::VectorXd w_interior_;
  SparseMatrix w_y_;
};

TensorField hessian(const ScalarField& v, ClampedBC bc = {});
ScalarField div_div(const TensorField& q);

enum class EigenMethod { Dense, Iterative };

/// Smallest generalized eigenvalue of (H, W_V) on clamped fields and its root.
struct CoercivityResult {
  double lambda_min = 0.0;
  double kappa = 0.0;
};

/// Dense mode is limited to 2500 unknowns. Throws SolveFailure when the
/// smallest eigenvalue is not positive.
CoercivityResult coercivity(const Grid& grid, const CoefficientTensor& a,
                            EigenMethod method = EigenMethod::Dense);

double coercivity_constant(const Grid& grid, ClampedBC bc, const CoefficientTensor& a,
                           EigenMethod method = EigenMethod::Dense);

/// Lowest `count` clamped eigenmodes of (H_id, W_V), scaled to unit max norm.
std::vector<ScalarField> clamped_eigenmodes(const Grid& grid, int count);

}  // namespace devlab
