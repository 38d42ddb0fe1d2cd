#pragma once

#include <optional>
#include <string>
#include <vector>

#include "devlab/obstacle.hpp"

namespace devlab {

/// Terms of the deviation identity
///   E_v + E_y + M_K = RHS
/// for an arbitrary primal/dual pair (v, y*) against the exact pair (u, p*).
struct DeviationReport {
  double e_v = 0.0;      // 1/2 ||Lambda(v - u)||_A^2
  double e_y = 0.0;      // 1/2 ||p* - y*||_{A^-1}^2
  double m_k = 0.0;      // (Lambda(v - u), p* - y*)
  double rhs = 0.0;      // 1/2 ||A Lambda v - y*||_{A^-1}^2
  double rhs_alt = 0.0;  // 1/2 ||Lambda v - A^-1 y*||_A^2
  double residual = 0.0;
};

/// Every term is evaluated from its own definition; the residual is what is
/// left when they are combined. Valid for any clamped v and any y*.
DeviationReport deviation_terms(const ScalarField& v, const TensorField& y_star, const ScalarField& u,
                                const TensorField& p_star, const ObstacleProblem& problem);

/// The no-tensor form (A = identity) through plain L2 inner products only.
DeviationReport deviation_terms_plain(const ScalarField& v, const TensorField& y_star, const ScalarField& u,
                                      const TensorField& p_star);

/// (Lambda(v - u), p* - y*) without touching the coefficient tensor.
double scalar_product_mk(const ScalarField& v, const TensorField& y_star, const ScalarField& u,
                         const TensorField& p_star);

struct DualFeasibility {
  bool feasible = false;
  double max_violation = 0.0;  // max over interior nodes of f - divDiv y*
  ScalarField violation;       // f - divDiv y*, zero on the boundary
};

/// 1e-10 * (1 + ||f||_inf).
double default_dual_tol(const ObstacleProblem& problem);

/// Membership of y* in the admissible dual set: f - divDiv y* <= tol on
/// every interior node.
DualFeasibility dual_feasible(const TensorField& y_star, const ObstacleProblem& problem, double tol);
DualFeasibility dual_feasible(const TensorField& y_star, const ObstacleProblem& problem);

/// The biharmonic obstacle decomposition
///   error + mu_phi + dual + mu_star_phi = rhs_norm + penalty.
///
/// At the discrete level the volume term over the coincidence set and the
/// jump across the free boundary merge into the nodal multiplier, so mu_phi
/// is sum_active w (v - phi) lambda. All nodal sums run over interior nodes.
struct BiharmonicReport {
  double error_term = 0.0;
  double mu_phi = 0.0;
  double mu_star_phi = 0.0;
  double dual_term = 0.0;
  double rhs_norm = 0.0;
  double penalty = 0.0;
  double residual = 0.0;
  bool admissible = false;   // y* admissible and v above the obstacle
  bool dual_admissible = false;
  bool primal_feasible = false;

  double majorant() const noexcept { return rhs_norm + penalty; }
  /// Scale used for relative tolerances: 1 + rhs_norm + |penalty|.
  double scale() const noexcept;
};

BiharmonicReport biharmonic_terms(const ScalarField& v, const TensorField& y_star, const PrimalSolution& solution,
                                  const ObstacleProblem& problem);

/// v >= phi - tol on interior nodes; tol defaults to 1e-12 * (1 + ||phi||_inf).
bool in_constraint_set(const ScalarField& v, const ObstacleProblem& problem, double tol = -1.0);

/// Right side of the biharmonic decomposition: the guaranteed bound on
/// 1/2 ||Lambda(v - u)||_A^2. Throws Inadmissible for y* outside the admissible
/// dual set and Infeasible for v below the obstacle.
double majorant(const ScalarField& v, const TensorField& y_star, const ObstacleProblem& problem);

/// Same value without the admissibility checks. Not a guaranteed bound.
double majorant_unchecked(const ScalarField& v, const TensorField& y_star, const ObstacleProblem& problem);

struct DualObjective {
  double value = 0.0;
  bool finite = false;  // false: the supremum is +inf and value is -inf
};

/// I*(y*) = -1/2 ||y*||_{A^-1}^2 - sum w phi (f - divDiv y*).
DualObjective dual_objective(const TensorField& y_star, const ObstacleProblem& problem);

struct ApproximationPair {
  std::string name;
  ScalarField v;
  TensorField y_star;
};

struct RankedEntry {
  std::string name;
  std::size_t input_index = 0;
  bool admissible = false;
  double majorant = 0.0;                 // unchecked value, meaningful only if admissible
  std::optional<double> true_error;      // 1/2 ||Lambda(v - u)||_A^2 when u is known
  std::size_t rank = 0;                  // 1-based
};

/// Ranks pairs by ascending majorant; inadmissible pairs go last. Ties keep
/// the input order.
std::vector<RankedEntry> compare_approximations(const std::vector<ApproximationPair>& pairs,
                                                const ObstacleProblem& problem,
                                                const ScalarField* exact_u = nullptr);

}  // namespace devlab
