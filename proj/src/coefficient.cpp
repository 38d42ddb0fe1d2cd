#include "devlab/coefficient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "devlab/error.hpp"

namespace devlab {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

// Diagonal of the map from stored components to orthonormal coordinates.
Eigen::VectorXd mandel_scale(int dim) {
  if (dim == 1) return Eigen::VectorXd::Ones(1);
  Eigen::VectorXd t(3);
  t << 1.0, 1.0, kSqrt2;
  return t;
}

Eigen::VectorXd multiplicities(int dim) {
  Eigen::VectorXd d(dim == 1 ? 1 : 3);
  for (int c = 0; c < d.size(); ++c) d[c] = component_multiplicity(dim, c);
  return d;
}

}  // namespace

CoefficientTensor CoefficientTensor::identity(const Grid& grid) {
  return CoefficientTensor(grid, Kind::Identity);
}

CoefficientTensor CoefficientTensor::scaled_identity(const Grid& grid, double c) {
  ScalarField field(grid);
  for (double& v : field.values()) v = c;
  return scalar_field(std::move(field));
}

CoefficientTensor CoefficientTensor::scalar_field(ScalarField c) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double v : c.values()) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::NotSPD, "scalar coefficient must be positive and finite at every node");
    }
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CoefficientTensor a(c.grid(), Kind::Scalar);
  a.scalar_ = std::move(c);
  a.kappa1_ = lo;
  a.kappa2_ = hi;
  return a;
}

CoefficientTensor CoefficientTensor::matrix(const Grid& grid, const Eigen::MatrixXd& m) {
  const int nc = grid.tensor_components();
  if (m.rows() != nc || m.cols() != nc) {
    throw Error(ErrorCode::InvalidArgument, "coefficient matrix must be " + std::to_string(nc) + "x" +
                                                std::to_string(nc) + " for a " +
                                                std::to_string(grid.dim()) + "D grid");
  }
  if (!m.allFinite()) throw Error(ErrorCode::NotSPD, "coefficient matrix has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale) {
    throw Error(ErrorCode::NotSPD, "coefficient matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) {
    throw Error(ErrorCode::NotSPD, "coefficient matrix is not positive definite (smallest eigenvalue " +
                                       std::to_string(lo) + ")");
  }
  CoefficientTensor a(grid, Kind::Matrix);
  a.matrix_ = m;
  a.matrix_inv_ = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
                  eig.eigenvectors().transpose();
  a.kappa1_ = lo;
  a.kappa2_ = hi;
  return a;
}

double CoefficientTensor::scalar_at(std::size_t node) const noexcept {
  return kind_ == Kind::Scalar ? (*scalar_)[node] : 1.0;
}

TensorField CoefficientTensor::apply(const TensorField& q, CoeffMode mode) const {
  require_same_grid(grid_, q.grid());
  TensorField out = q;
  const int nc = q.components();
  switch (kind_) {
    case Kind::Identity:
      break;
    case Kind::Scalar:
      for (std::size_t k = 0; k < grid_.size(); ++k) {
        const double c = (*scalar_)[k];
        for (int comp = 0; comp < nc; ++comp) {
          out(k, comp) = mode == CoeffMode::Direct ? q(k, comp) * c : q(k, comp) / c;
        }
      }
      break;
    case Kind::Matrix: {
      const Eigen::VectorXd t = mandel_scale(grid_.dim());
      const Eigen::MatrixXd& s = mode == CoeffMode::Direct ? matrix_ : matrix_inv_;
      Eigen::VectorXd xi(nc);
      for (std::size_t k = 0; k < grid_.size(); ++k) {
        for (int comp = 0; comp < nc; ++comp) xi[comp] = t[comp] * q(k, comp);
        const Eigen::VectorXd eta = s * xi;
        for (int comp = 0; comp < nc; ++comp) out(k, comp) = eta[comp] / t[comp];
      }
      break;
    }
  }
  return out;
}

Eigen::MatrixXd CoefficientTensor::contraction_block(std::size_t node, CoeffMode mode) const {
  const int dim = grid_.dim();
  if (kind_ == Kind::Matrix) {
    const Eigen::VectorXd t = mandel_scale(dim);
    const Eigen::MatrixXd& s = mode == CoeffMode::Direct ? matrix_ : matrix_inv_;
    return t.asDiagonal() * s * t.asDiagonal();
  }
  const double c = scalar_at(node);
  const double factor = mode == CoeffMode::Direct ? c : 1.0 / c;
  return Eigen::MatrixXd(factor * multiplicities(dim).asDiagonal());
}

TensorField apply_coeff(const TensorField& q, const CoefficientTensor& a, CoeffMode mode) {
  return a.apply(q, mode);
}

double norm_weighted(const TensorField& q, const CoefficientTensor& a, CoeffMode mode) {
  return std::sqrt(std::max(0.0, inner(a.apply(q, mode), q)));
}

}  // namespace devlab
