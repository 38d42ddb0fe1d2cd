#include "devlab/operators.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <string>
#include <vector>

#include "devlab/error.hpp"

namespace devlab {

namespace {

// Even reflection of an out-of-range index about the boundary node.
int reflect(int i, int n) {
  if (i < 0) return -i;
  if (i > n - 1) return 2 * (n - 1) - i;
  return i;
}

struct Tap {
  int di;
  int dj;
  double coef;
};

}  // namespace

HessianOperator::HessianOperator(Grid grid, ClampedBC /*bc*/) : grid_(std::move(grid)) {
  const int nc = grid_.tensor_components();
  const int nx = grid_.nodes(0);
  const int ny = grid_.nodes(1);
  const double hx = grid_.spacing(0);
  const double hy = grid_.spacing(1);

  std::vector<std::vector<Tap>> stencils;
  stencils.push_back({{-1, 0, 1.0 / (hx * hx)}, {0, 0, -2.0 / (hx * hx)}, {1, 0, 1.0 / (hx * hx)}});
  if (grid_.dim() == 2) {
    stencils.push_back({{0, -1, 1.0 / (hy * hy)}, {0, 0, -2.0 / (hy * hy)}, {0, 1, 1.0 / (hy * hy)}});
    const double c = 1.0 / (4.0 * hx * hy);
    stencils.push_back({{1, 1, c}, {-1, -1, c}, {1, -1, -c}, {-1, 1, -c}});
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(grid_.size() * 10);
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    const int i = grid_.ix(k);
    const int j = grid_.iy(k);
    for (int comp = 0; comp < nc; ++comp) {
      for (const Tap& tap : stencils[comp]) {
        const int ri = reflect(i + tap.di, nx);
        const int rj = grid_.dim() == 2 ? reflect(j + tap.dj, ny) : 0;
        const long col = grid_.interior_position(grid_.index(ri, rj));
        if (col < 0) continue;  // clamped: boundary value is zero
        triplets.emplace_back(static_cast<int>(k * nc + comp), static_cast<int>(col), tap.coef);
      }
    }
  }
  lambda_.resize(static_cast<int>(grid_.size() * nc), static_cast<int>(unknowns()));
  lambda_.setFromTriplets(triplets.begin(), triplets.end());
  lambda_.makeCompressed();

  w_interior_.resize(static_cast<int>(unknowns()));
  for (std::size_t p = 0; p < unknowns(); ++p) w_interior_[p] = grid_.weight(grid_.interior()[p]);

  w_y_ = weighted_tensor_mass(CoefficientTensor::identity(grid_), CoeffMode::Direct);
}

Eigen::VectorXd HessianOperator::gather(const ScalarField& v) const {
  require_same_grid(grid_, v.grid());
  Eigen::VectorXd x(static_cast<int>(unknowns()));
  for (std::size_t p = 0; p < unknowns(); ++p) x[p] = v[grid_.interior()[p]];
  return x;
}

ScalarField HessianOperator::scatter(const Eigen::VectorXd& x) const {
  ScalarField v(grid_);
  for (std::size_t p = 0; p < unknowns(); ++p) v[grid_.interior()[p]] = x[p];
  return v;
}

TensorField HessianOperator::apply(const ScalarField& v) const {
  require_same_grid(grid_, v.grid());
  if (!v.is_clamped()) {
    throw Error(ErrorCode::NotClamped, "hessian requires a clamped field (zero boundary values)");
  }
  const Eigen::VectorXd q = lambda_ * gather(v);
  return TensorField(grid_, std::vector<double>(q.data(), q.data() + q.size()));
}

ScalarField HessianOperator::adjoint(const TensorField& q) const {
  require_same_grid(grid_, q.grid());
  const Eigen::Map<const Eigen::VectorXd> qv(q.values().data(), static_cast<int>(q.values().size()));
  const Eigen::VectorXd r = lambda_.transpose() * (w_y_ * qv);
  return scatter(r.cwiseQuotient(w_interior_));
}

SparseMatrix HessianOperator::weighted_tensor_mass(const CoefficientTensor& a, CoeffMode mode) const {
  require_same_grid(grid_, a.grid());
  const int nc = grid_.tensor_components();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(grid_.size() * nc * nc);
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    const Eigen::MatrixXd block = grid_.weight(k) * a.contraction_block(k, mode);
    for (int r = 0; r < nc; ++r) {
      for (int c = 0; c < nc; ++c) {
        if (block(r, c) != 0.0) {
          triplets.emplace_back(static_cast<int>(k * nc + r), static_cast<int>(k * nc + c), block(r, c));
        }
      }
    }
  }
  SparseMatrix m(static_cast<int>(grid_.size() * nc), static_cast<int>(grid_.size() * nc));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

SparseMatrix HessianOperator::weighted_bilaplacian(const CoefficientTensor& a) const {
  const SparseMatrix wa = weighted_tensor_mass(a, CoeffMode::Direct);
  SparseMatrix h = SparseMatrix(lambda_.transpose()) * (wa * lambda_);
  // Symmetrize exactly; the triple product can differ from its transpose in
  // the last bit.
  SparseMatrix ht = h.transpose();
  h = 0.5 * (h + ht);
  h.makeCompressed();
  return h;
}

TensorField hessian(const ScalarField& v, ClampedBC bc) { return HessianOperator(v.grid(), bc).apply(v); }

ScalarField div_div(const TensorField& q) { return HessianOperator(q.grid()).adjoint(q); }

// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kDenseLimit = 2500;

Eigen::MatrixXd scaled_dense(const SparseMatrix& h, const Eigen::VectorXd& w) {
  const Eigen::VectorXd s = w.cwiseSqrt().cwiseInverse();
  return s.asDiagonal() * Eigen::MatrixXd(h) * s.asDiagonal();
}

}  // namespace

CoercivityResult coercivity(const Grid& grid, const CoefficientTensor& a, EigenMethod method) {
  const HessianOperator op(grid);
  const SparseMatrix h = op.weighted_bilaplacian(a);
  const Eigen::VectorXd& w = op.interior_weights();
  double lambda_min = 0.0;

  if (method == EigenMethod::Dense) {
    if (op.unknowns() > kDenseLimit) {
      throw Error(ErrorCode::InvalidArgument, "dense coercivity eigensolve limited to 2500 unknowns; got " +
                                                  std::to_string(op.unknowns()));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled_dense(h, w), Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw Error(ErrorCode::SolveFailure, "dense eigensolve failed");
    lambda_min = eig.eigenvalues().minCoeff();
  } else {
    // Inverse iteration on H x = lambda W x.
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(h);
    if (ldlt.info() != Eigen::Success) throw Error(ErrorCode::SolveFailure, "factorization of H failed");
    Eigen::VectorXd x = Eigen::VectorXd::Ones(h.rows());
    double previous = 0.0;
    for (int it = 0; it < 5000; ++it) {
      const Eigen::VectorXd rhs = w.cwiseProduct(x);
      x = ldlt.solve(rhs);
      x /= std::sqrt(x.dot(w.asDiagonal() * x));
      const double rayleigh = x.dot(h * x);
      if (it > 0 && std::abs(rayleigh - previous) <= 1e-14 * std::abs(rayleigh)) {
        previous = rayleigh;
        break;
      }
      previous = rayleigh;
    }
    lambda_min = previous;
  }

  if (!(lambda_min > 0.0)) {
    throw Error(ErrorCode::SolveFailure,
                "discrete bilaplacian is not positive definite (lambda_min = " + std::to_string(lambda_min) + ")");
  }
  return {lambda_min, std::sqrt(lambda_min)};
}

double coercivity_constant(const Grid& grid, ClampedBC /*bc*/, const CoefficientTensor& a, EigenMethod method) {
  return coercivity(grid, a, method).kappa;
}

std::vector<ScalarField> clamped_eigenmodes(const Grid& grid, int count) {
  const HessianOperator op(grid);
  if (op.unknowns() > kDenseLimit) {
    throw Error(ErrorCode::InvalidArgument, "eigenmodes are computed densely; grid has too many unknowns");
  }
  const SparseMatrix h = op.weighted_bilaplacian(CoefficientTensor::identity(grid));
  const Eigen::VectorXd& w = op.interior_weights();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled_dense(h, w));
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::SolveFailure, "dense eigensolve failed");

  std::vector<ScalarField> modes;
  const int n = std::min<int>(count, static_cast<int>(op.unknowns()));
  for (int m = 0; m < n; ++m) {
    Eigen::VectorXd x = eig.eigenvectors().col(m).cwiseQuotient(w.cwiseSqrt());
    Eigen::Index arg = 0;
    x.cwiseAbs().maxCoeff(&arg);
    x /= x[arg];
    modes.push_back(op.scatter(x));
  }
  return modes;
}

}  // namespace devlab
