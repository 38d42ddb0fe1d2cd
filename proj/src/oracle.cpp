#include "devlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "devlab/error.hpp"

namespace devlab {

OracleResult brute_force_qp(const DenseQP& qp) {
  const Eigen::Index n = qp.b.size();
  if (n < 1 || n > DenseQP::kMaxUnknowns) {
    throw Error(ErrorCode::InvalidArgument,
                "brute-force oracle handles 1 to 16 unknowns, got " + std::to_string(n));
  }
  if (qp.h.rows() != n || qp.h.cols() != n || qp.phi.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "dense QP dimensions are inconsistent");
  }
  if ((qp.h - qp.h.transpose()).cwiseAbs().maxCoeff() > 1e-13 * std::max(1.0, qp.h.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::InvalidArgument, "dense QP matrix is not symmetric");
  }

  const double u_tol = 1e-12 * (1.0 + qp.phi.cwiseAbs().maxCoeff());
  const double h_scale = qp.h.cwiseAbs().maxCoeff();

  std::optional<OracleResult> best;
  int found = 0;
  const unsigned long subsets = 1ul << n;
  for (unsigned long mask = 0; mask < subsets; ++mask) {
    std::vector<Eigen::Index> free_idx;
    std::vector<Eigen::Index> fixed_idx;
    for (Eigen::Index i = 0; i < n; ++i) {
      ((mask >> i) & 1ul ? fixed_idx : free_idx).push_back(i);
    }

    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i : fixed_idx) u[i] = qp.phi[i];
    if (!free_idx.empty()) {
      const auto nf = static_cast<Eigen::Index>(free_idx.size());
      Eigen::MatrixXd hff(nf, nf);
      Eigen::VectorXd rhs(nf);
      for (Eigen::Index r = 0; r < nf; ++r) {
        rhs[r] = qp.b[free_idx[r]];
        for (Eigen::Index i : fixed_idx) rhs[r] -= qp.h(free_idx[r], i) * qp.phi[i];
        for (Eigen::Index c = 0; c < nf; ++c) hff(r, c) = qp.h(free_idx[r], free_idx[c]);
      }
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hff);
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw Error(ErrorCode::OracleFailure, "oracle: reduced matrix is not positive definite");
      }
      const Eigen::VectorXd uf = ldlt.solve(rhs);
      for (Eigen::Index r = 0; r < nf; ++r) u[free_idx[r]] = uf[r];
    }

    const Eigen::VectorXd lambda = qp.h * u - qp.b;
    const double lam_tol = 1e-12 * (1.0 + qp.b.cwiseAbs().maxCoeff() + h_scale * u.cwiseAbs().maxCoeff());
    bool ok = true;
    for (Eigen::Index i : free_idx) ok = ok && u[i] >= qp.phi[i] - u_tol;
    for (Eigen::Index i : fixed_idx) ok = ok && lambda[i] >= -lam_tol;
    if (!ok) continue;

    ++found;
    if (best) {
      // Strict convexity: any further KKT point must coincide with the first.
      const double diff = (best->u - u).cwiseAbs().maxCoeff();
      if (diff > 1e-8 * (1.0 + u.cwiseAbs().maxCoeff())) {
        throw Error(ErrorCode::OracleFailure, "oracle: found two distinct KKT points");
      }
      best->degenerate = true;
      continue;
    }
    OracleResult res;
    res.u = u;
    res.lambda = lambda;
    res.active.assign(static_cast<std::size_t>(n), false);
    for (Eigen::Index i : fixed_idx) {
      res.active[static_cast<std::size_t>(i)] = true;
      if (std::abs(lambda[i]) <= 1e-10) res.degenerate = true;
    }
    best = std::move(res);
  }

  if (!best) throw Error(ErrorCode::OracleFailure, "oracle: no active set yields a KKT point");
  best->kkt_points = found;
  return *best;
}

DenseQP make_dense_qp(const ObstacleProblem& problem) {
  const QuadraticForm qf = assemble(problem);
  DenseQP qp;
  qp.h = Eigen::MatrixXd(qf.h);
  qp.b = qf.b;
  qp.phi = problem.op().gather(problem.obstacle());
  return qp;
}

double gradient_check(const ObstacleProblem& problem, const ScalarField& v, const ScalarField& w,
                      std::span<const double> steps) {
  const HessianOperator& op = problem.op();
  const QuadraticForm qf = assemble(problem);
  const Eigen::VectorXd x = op.gather(v);
  const double analytic = op.gather(w).dot(qf.h * x - qf.b);

  double worst = 0.0;
  for (double eps : steps) {
    const double jp = primal_energy(v + eps * w, problem);
    const double jm = primal_energy(v - eps * w, problem);
    const double fd = (jp - jm) / (2.0 * eps);
    const double denom = std::max({std::abs(analytic), std::abs(fd)});
    const double err = denom == 0.0 ? 0.0 : std::abs(analytic - fd) / denom;
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace devlab
