#include "devlab/deviation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "devlab/error.hpp"

namespace devlab {

namespace {

double half_weighted_sq(const TensorField& q, const CoefficientTensor& a, CoeffMode mode) {
  return 0.5 * inner(a.apply(q, mode), q);
}

void require_problem_grid(const ObstacleProblem& problem, const Grid& g) { require_same_grid(problem.grid(), g); }

}  // namespace

DeviationReport deviation_terms(const ScalarField& v, const TensorField& y_star, const ScalarField& u,
                                const TensorField& p_star, const ObstacleProblem& problem) {
  require_problem_grid(problem, v.grid());
  require_problem_grid(problem, y_star.grid());
  require_problem_grid(problem, u.grid());
  require_problem_grid(problem, p_star.grid());
  const HessianOperator& op = problem.op();
  const CoefficientTensor& a = problem.coeff();

  const TensorField hv = op.apply(v);
  const TensorField herr = op.apply(v - u);
  const TensorField dual_err = p_star - y_star;

  DeviationReport r;
  r.e_v = half_weighted_sq(herr, a, CoeffMode::Direct);
  r.e_y = half_weighted_sq(dual_err, a, CoeffMode::Inverse);
  r.m_k = inner(herr, dual_err);
  r.rhs = half_weighted_sq(a.apply(hv, CoeffMode::Direct) - y_star, a, CoeffMode::Inverse);
  r.rhs_alt = half_weighted_sq(hv - a.apply(y_star, CoeffMode::Inverse), a, CoeffMode::Direct);
  r.residual = std::abs(r.e_v + r.e_y + r.m_k - r.rhs);
  return r;
}

DeviationReport deviation_terms_plain(const ScalarField& v, const TensorField& y_star, const ScalarField& u,
                                      const TensorField& p_star) {
  require_same_grid(v.grid(), y_star.grid());
  const HessianOperator op(v.grid());
  const TensorField hv = op.apply(v);
  const TensorField herr = op.apply(v - u);
  const TensorField dual_err = p_star - y_star;
  const TensorField gap = hv - y_star;

  DeviationReport r;
  r.e_v = 0.5 * inner(herr, herr);
  r.e_y = 0.5 * inner(dual_err, dual_err);
  r.m_k = inner(herr, dual_err);
  r.rhs = 0.5 * inner(gap, gap);
  r.rhs_alt = r.rhs;
  r.residual = std::abs(r.e_v + r.e_y + r.m_k - r.rhs);
  return r;
}

double scalar_product_mk(const ScalarField& v, const TensorField& y_star, const ScalarField& u,
                         const TensorField& p_star) {
  const HessianOperator op(v.grid());
  return inner(op.apply(v - u), p_star - y_star);
}

double default_dual_tol(const ObstacleProblem& problem) { return 1e-10 * (1.0 + problem.load().max_abs()); }

DualFeasibility dual_feasible(const TensorField& y_star, const ObstacleProblem& problem, double tol) {
  require_problem_grid(problem, y_star.grid());
  const ScalarField dd = problem.op().adjoint(y_star);
  DualFeasibility out{true, -std::numeric_limits<double>::infinity(), ScalarField(problem.grid())};
  for (std::size_t k : problem.grid().interior()) {
    const double viol = problem.load()[k] - dd[k];
    out.violation[k] = viol;
    out.max_violation = std::max(out.max_violation, viol);
  }
  out.feasible = out.max_violation <= tol;
  return out;
}

DualFeasibility dual_feasible(const TensorField& y_star, const ObstacleProblem& problem) {
  return dual_feasible(y_star, problem, default_dual_tol(problem));
}

double BiharmonicReport::scale() const noexcept { return 1.0 + rhs_norm + std::abs(penalty); }

bool in_constraint_set(const ScalarField& v, const ObstacleProblem& problem, double tol) {
  require_problem_grid(problem, v.grid());
  if (!v.is_clamped()) return false;
  const ScalarField& phi = problem.obstacle();
  if (tol < 0.0) tol = 1e-12 * (1.0 + phi.max_abs());
  for (std::size_t k : problem.grid().interior()) {
    if (v[k] < phi[k] - tol) return false;
  }
  return true;
}

BiharmonicReport biharmonic_terms(const ScalarField& v, const TensorField& y_star, const PrimalSolution& solution,
                                  const ObstacleProblem& problem) {
  require_problem_grid(problem, v.grid());
  require_problem_grid(problem, y_star.grid());
  require_problem_grid(problem, solution.u.grid());
  require_problem_grid(problem, solution.lambda.grid());
  const Grid& grid = problem.grid();
  const HessianOperator& op = problem.op();
  const CoefficientTensor& a = problem.coeff();
  const ScalarField& u = solution.u;
  const ScalarField& lambda = solution.lambda;
  const ScalarField& phi = problem.obstacle();
  const ScalarField& f = problem.load();

  const TensorField p_star = recover_dual(u, problem);
  const ScalarField dd = op.adjoint(y_star);

  BiharmonicReport r;
  r.error_term = half_weighted_sq(op.apply(v - u), a, CoeffMode::Direct);
  r.dual_term = half_weighted_sq(p_star - y_star, a, CoeffMode::Inverse);
  r.rhs_norm = half_weighted_sq(a.apply(op.apply(v), CoeffMode::Direct) - y_star, a, CoeffMode::Inverse);

  for (std::size_t k : solution.partition.active) r.mu_phi += grid.weight(k) * (v[k] - phi[k]) * lambda[k];
  for (std::size_t k : solution.partition.inactive) {
    r.mu_star_phi += grid.weight(k) * (u[k] - phi[k]) * (dd[k] - f[k]);
  }
  for (std::size_t k : grid.interior()) r.penalty += grid.weight(k) * (phi[k] - v[k]) * (f[k] - dd[k]);

  r.residual = std::abs(r.error_term + r.mu_phi + r.dual_term + r.mu_star_phi - r.rhs_norm - r.penalty);
  r.dual_admissible = dual_feasible(y_star, problem).feasible;
  r.primal_feasible = in_constraint_set(v, problem);
  r.admissible = r.dual_admissible && r.primal_feasible;
  return r;
}

double majorant_unchecked(const ScalarField& v, const TensorField& y_star, const ObstacleProblem& problem) {
  require_problem_grid(problem, v.grid());
  require_problem_grid(problem, y_star.grid());
  const Grid& grid = problem.grid();
  const HessianOperator& op = problem.op();
  const CoefficientTensor& a = problem.coeff();
  const ScalarField dd = op.adjoint(y_star);
  const double rhs_norm = half_weighted_sq(a.apply(op.apply(v), CoeffMode::Direct) - y_star, a, CoeffMode::Inverse);
  double penalty = 0.0;
  for (std::size_t k : grid.interior()) {
    penalty += grid.weight(k) * (problem.obstacle()[k] - v[k]) * (problem.load()[k] - dd[k]);
  }
  return rhs_norm + penalty;
}

double majorant(const ScalarField& v, const TensorField& y_star, const ObstacleProblem& problem) {
  if (!in_constraint_set(v, problem)) {
    throw Error(ErrorCode::Infeasible, "approximation is not clamped or lies below the obstacle");
  }
  const DualFeasibility feas = dual_feasible(y_star, problem);
  if (!feas.feasible) {
    throw Error(ErrorCode::Inadmissible, "dual approximation is inadmissible: max(f - divDiv y*) = " +
                                             std::to_string(feas.max_violation));
  }
  return majorant_unchecked(v, y_star, problem);
}

DualObjective dual_objective(const TensorField& y_star, const ObstacleProblem& problem) {
  const DualFeasibility feas = dual_feasible(y_star, problem);
  if (!feas.feasible) return {-std::numeric_limits<double>::infinity(), false};
  const Grid& grid = problem.grid();
  const double energy = half_weighted_sq(y_star, problem.coeff(), CoeffMode::Inverse);
  // The supremum over v >= phi of sum w v (f - divDiv y*) is attained at v = phi.
  double sup = 0.0;
  for (std::size_t k : grid.interior()) sup += grid.weight(k) * problem.obstacle()[k] * feas.violation[k];
  return {-energy - sup, true};
}

std::vector<RankedEntry> compare_approximations(const std::vector<ApproximationPair>& pairs,
                                                const ObstacleProblem& problem, const ScalarField* exact_u) {
  if (pairs.empty()) throw Error(ErrorCode::InvalidArgument, "compare needs at least one approximation pair");
  std::vector<RankedEntry> entries;
  entries.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const ApproximationPair& pair = pairs[i];
    RankedEntry e;
    e.name = pair.name;
    e.input_index = i;
    e.admissible = in_constraint_set(pair.v, problem) && dual_feasible(pair.y_star, problem).feasible;
    e.majorant = majorant_unchecked(pair.v, pair.y_star, problem);
    if (exact_u != nullptr) {
      e.true_error =
          half_weighted_sq(problem.op().apply(pair.v - *exact_u), problem.coeff(), CoeffMode::Direct);
    }
    entries.push_back(std::move(e));
  }
  std::stable_sort(entries.begin(), entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
    if (a.admissible != b.admissible) return a.admissible;
    if (!a.admissible) return false;
    return a.majorant < b.majorant;
  });
  for (std::size_t i = 0; i < entries.size(); ++i) entries[i].rank = i + 1;
  return entries;
}

}  // namespace devlab
