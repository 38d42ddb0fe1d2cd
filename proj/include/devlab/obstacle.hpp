#pragma once

#include <memory>
#include <string>
#include <vector>

#include "devlab/coefficient.hpp"
#include "devlab/grid.hpp"
#include "devlab/operators.hpp"

namespace devlab {

/// Clamped obstacle problem: minimize 1/2 ||Lambda v||_A^2 - (f, v) over
/// clamped v with v >= phi.
class ObstacleProblem {
 public:
  /// Validates that all fields share one grid, that f and phi are finite and
  /// that phi <= 0 on boundary nodes (otherwise the constraint set is empty
  /// and Infeasible is thrown).
  ObstacleProblem(ScalarField f, ScalarField phi, CoefficientTensor a, ClampedBC bc = {});

  const Grid& grid() const noexcept { return f_.grid(); }
  const ScalarField& load() const noexcept { return f_; }
  const ScalarField& obstacle() const noexcept { return phi_; }
  const CoefficientTensor& coeff() const noexcept { return a_; }
  const HessianOperator& op() const noexcept { return *op_; }

 private:
  ScalarField f_;
  ScalarField phi_;
  CoefficientTensor a_;
  std::shared_ptr<const HessianOperator> op_;
};

/// Discrete energy J(v) = 1/2 x^T H x - b^T x over interior unknowns x.
struct QuadraticForm {
  SparseMatrix h;
  Eigen::VectorXd b;
  Eigen::VectorXd w;  // interior quadrature weights

  double energy(const Eigen::VectorXd& x) const { return 0.5 * x.dot(h * x) - b.dot(x); }
};

QuadraticForm assemble(const ObstacleProblem& problem);

/// J(v) evaluated through the continuum integrand: 1/2 ||Lambda v||_A^2 - (f, v).
double primal_energy(const ScalarField& v, const ObstacleProblem& problem);

enum class SolverMethod { ProjectedGradient, PSOR };

SolverMethod parse_solver_method(const std::string& name);
const char* to_string(SolverMethod method) noexcept;

struct SolverOptions {
  SolverMethod method = SolverMethod::ProjectedGradient;
  double tol = 1e-9;
  long max_iter = 0;          // 0: 200000 in 1D, 500000 in 2D
  double eps_active = -1.0;   // < 0: 1e-7 * (1 + ||phi||_inf)
  int check_every = 10;
  /// Every this many sweeps, minimize on the current face and accept the
  /// projected result only if it lowers the energy. 0 disables.
  int subspace_every = 25;
  double omega = 1.5;
  int power_iterations = 20;
  double lipschitz_safety = 1.05;
  bool record_energy = false;
};

struct KKTReport {
  double stationarity = 0.0;     // max over inactive nodes of |lambda|
  double feasibility = 0.0;      // max of (phi - u)_+
  double complementarity = 0.0;  // sum of w |lambda (u - phi)|
  double multiplier_sign = 0.0;  // max over active nodes of (-lambda)_+

  double max() const noexcept;
};

struct Partition {
  std::vector<std::size_t> active;    // node indices with u - phi <= eps
  std::vector<std::size_t> inactive;  // remaining interior nodes
};

struct PrimalSolution {
  ScalarField u;
  ScalarField lambda;  // W_V^{-1}(H u - b) on interior nodes, zero on the boundary
  Partition partition;
  long iterations = 0;
  bool converged = false;
  double eps_active = 0.0;
  KKTReport kkt;
  std::vector<double> energy_history;
};

double default_eps_active(const ObstacleProblem& problem);

PrimalSolution solve_primal(const ObstacleProblem& problem, const SolverOptions& opts = {});

/// Nodal multiplier W_V^{-1}(H u - b).
ScalarField multiplier(const ScalarField& u, const ObstacleProblem& problem);

TensorField recover_dual(const ScalarField& u, const ObstacleProblem& problem);

Partition coincidence_set(const ScalarField& u, const ScalarField& phi, double eps_active);

KKTReport kkt_report(const ScalarField& u, const ScalarField& lambda, const ObstacleProblem& problem,
                     double eps_active);

}  // namespace devlab
