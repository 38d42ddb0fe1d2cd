#include "devlab/reconstruction.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>

#include "devlab/deviation.hpp"
#include "devlab/error.hpp"

namespace devlab {

TensorField naive_flux(const ScalarField& v, const ObstacleProblem& problem) {
  return apply_coeff(problem.op().apply(v), problem.coeff(), CoeffMode::Direct);
}

FluxRepair feasible_flux_report(const ScalarField& v, const ObstacleProblem& problem) {
  constexpr int kMaxPasses = 4;
  const HessianOperator& op = problem.op();
  const double tol = default_dual_tol(problem);

  FluxRepair out{naive_flux(v, problem)};
  const TensorField y0 = out.y_star;

  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  bool factored = false;
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    const DualFeasibility feas = dual_feasible(out.y_star, problem, tol);
    // Admissible input is returned untouched.
    if (pass == 0 && feas.feasible) break;
    ScalarField r(problem.grid());
    bool any = false;
    for (std::size_t k : problem.grid().interior()) {
      // After the first pass only genuine violations are repaired; rounding
      // below half the tolerance is left alone.
      const double viol = feas.violation[k];
      if (viol > (pass == 0 ? 0.0 : 0.5 * tol)) {
        r[k] = viol;
        any = true;
      }
    }
    if (!any) break;
    if (pass == 0) out.residual_norm = std::sqrt(integrate(hadamard(r, r)));

    if (!factored) {
      ldlt.compute(op.weighted_bilaplacian(CoefficientTensor::identity(problem.grid())));
      if (ldlt.info() != Eigen::Success) throw Error(ErrorCode::SolveFailure, "flux repair: factorization failed");
      factored = true;
    }
    const Eigen::VectorXd rhs = op.interior_weights().cwiseProduct(op.gather(r));
    const Eigen::VectorXd w = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !w.allFinite()) {
      throw Error(ErrorCode::SolveFailure, "flux repair: linear solve failed");
    }
    out.y_star += op.apply(op.scatter(w));
    out.passes = pass + 1;
  }

  if (!dual_feasible(out.y_star, problem, tol).feasible) {
    throw Error(ErrorCode::SolveFailure, "flux repair did not reach the admissible set");
  }
  const TensorField diff = out.y_star - y0;
  out.correction_norm = std::sqrt(std::max(0.0, inner(diff, diff)));
  return out;
}

TensorField feasible_flux(const ScalarField& v, const ObstacleProblem& problem) {
  return feasible_flux_report(v, problem).y_star;
}

}  // namespace devlab
