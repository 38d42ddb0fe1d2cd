#include "devlab/obstacle.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "devlab/error.hpp"

namespace devlab {

ObstacleProblem::ObstacleProblem(ScalarField f, ScalarField phi, CoefficientTensor a, ClampedBC bc)
    : f_(std::move(f)), phi_(std::move(phi)), a_(std::move(a)) {
  require_same_grid(f_.grid(), phi_.grid());
  require_same_grid(f_.grid(), a_.grid());
  for (std::size_t k = 0; k < f_.size(); ++k) {
    if (!std::isfinite(f_[k]) || !std::isfinite(phi_[k])) {
      throw Error(ErrorCode::InvalidArgument, "load and obstacle must be finite at every node");
    }
  }
  // The projection of zero onto {v >= phi, clamped} is max(phi, 0) inside and
  // zero on the boundary; it is admissible iff phi <= 0 on the boundary.
  for (std::size_t k : f_.grid().boundary()) {
    if (phi_[k] > 0.0) {
      throw Error(ErrorCode::Infeasible, "obstacle is positive at boundary node (" + std::to_string(f_.grid().x(k)) +
                                             ", " + std::to_string(f_.grid().y(k)) +
                                             "); no clamped field lies above it");
    }
  }
  op_ = std::make_shared<const HessianOperator>(f_.grid(), bc);
}

QuadraticForm assemble(const ObstacleProblem& problem) {
  const HessianOperator& op = problem.op();
  QuadraticForm qf;
  qf.h = op.weighted_bilaplacian(problem.coeff());
  qf.w = op.interior_weights();
  qf.b = qf.w.cwiseProduct(op.gather(problem.load()));
  return qf;
}

double primal_energy(const ScalarField& v, const ObstacleProblem& problem) {
  const TensorField hv = problem.op().apply(v);
  const double a_norm = norm_weighted(hv, problem.coeff(), CoeffMode::Direct);
  return 0.5 * a_norm * a_norm - integrate(hadamard(problem.load(), v));
}

SolverMethod parse_solver_method(const std::string& name) {
  if (name == "projected_gradient" || name == "pg") return SolverMethod::ProjectedGradient;
  if (name == "psor") return SolverMethod::PSOR;
  throw Error(ErrorCode::InvalidArgument, "unknown solver method '" + name + "'");
}

const char* to_string(SolverMethod method) noexcept {
  return method == SolverMethod::PSOR ? "psor" : "projected_gradient";
}

double KKTReport::max() const noexcept {
  return std::max({stationarity, feasibility, complementarity, multiplier_sign});
}

double default_eps_active(const ObstacleProblem& problem) {
  return 1e-7 * (1.0 + problem.obstacle().max_abs());
}

namespace {

struct IterateKKT {
  Eigen::VectorXd lambda;
  KKTReport kkt;
};

IterateKKT evaluate_kkt(const QuadraticForm& qf, const Eigen::VectorXd& x, const Eigen::VectorXd& phi,
                        double eps_active) {
  IterateKKT out;
  out.lambda = (qf.h * x - qf.b).cwiseQuotient(qf.w);
  for (Eigen::Index p = 0; p < x.size(); ++p) {
    const double gap = x[p] - phi[p];
    const double lam = out.lambda[p];
    out.kkt.feasibility = std::max(out.kkt.feasibility, -gap);
    out.kkt.complementarity += qf.w[p] * std::abs(lam * gap);
    if (gap <= eps_active) {
      out.kkt.multiplier_sign = std::max(out.kkt.multiplier_sign, -lam);
    } else {
      out.kkt.stationarity = std::max(out.kkt.stationarity, std::abs(lam));
    }
  }
  out.kkt.feasibility = std::max(out.kkt.feasibility, 0.0);
  return out;
}

// Complementarity is a sum of lambda * (u - phi), so it is measured relative
// to the size of the gap; a distant obstacle would otherwise amplify rounding
// in lambda.
bool kkt_satisfied(const KKTReport& kkt, const Eigen::VectorXd& x, const Eigen::VectorXd& phi, double threshold) {
  const double gap_scale = 1.0 + (x - phi).cwiseAbs().maxCoeff();
  return kkt.stationarity <= threshold && kkt.feasibility <= threshold && kkt.multiplier_sign <= threshold &&
         kkt.complementarity <= threshold * gap_scale;
}

double lipschitz_estimate(const SparseMatrix& h, int iterations, double safety) {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd x(h.rows());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = dist(rng);
  x.normalize();
  double rayleigh = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd y = h * x;
    rayleigh = x.dot(y);
    const double norm = y.norm();
    if (norm == 0.0) break;
    x = y / norm;
  }
  return safety * rayleigh;
}

// Minimizes the energy with the nodes in `fixed` held at the obstacle. The
// factorization is cached while the free set stays the same.
class FaceSolver {
 public:
  explicit FaceSolver(const QuadraticForm& qf) : qf_(qf) {}

  std::optional<Eigen::VectorXd> solve(const std::vector<char>& fixed, const Eigen::VectorXd& phi) {
    const Eigen::Index n = qf_.b.size();
    if (fixed != fixed_ || !ready_) {
      fixed_ = fixed;
      free_.clear();
      std::vector<int> pos(n, -1);
      for (Eigen::Index p = 0; p < n; ++p) {
        if (!fixed[p]) {
          pos[p] = static_cast<int>(free_.size());
          free_.push_back(static_cast<int>(p));
        }
      }
      ready_ = false;
      if (free_.empty()) {
        ready_ = true;
      } else {
        std::vector<Eigen::Triplet<double>> trip;
        for (int c = 0; c < qf_.h.outerSize(); ++c) {
          for (SparseMatrix::InnerIterator it(qf_.h, c); it; ++it) {
            const int r = static_cast<int>(it.row());
            if (pos[r] >= 0 && pos[c] >= 0) trip.emplace_back(pos[r], pos[c], it.value());
          }
        }
        SparseMatrix hff(static_cast<int>(free_.size()), static_cast<int>(free_.size()));
        hff.setFromTriplets(trip.begin(), trip.end());
        ldlt_.compute(hff);
        if (ldlt_.info() != Eigen::Success) return std::nullopt;
        ready_ = true;
      }
    }
    if (!ready_) return std::nullopt;

    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    for (Eigen::Index p = 0; p < n; ++p) {
      if (fixed[p]) y[p] = phi[p];
    }
    if (free_.empty()) return y;
    // rhs = b_F - H_{F,A} phi_A
    const Eigen::VectorXd coupling = qf_.h * y;
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(free_.size()));
    for (std::size_t k = 0; k < free_.size(); ++k) rhs[k] = qf_.b[free_[k]] - coupling[free_[k]];
    const Eigen::VectorXd yf = ldlt_.solve(rhs);
    if (ldlt_.info() != Eigen::Success || !yf.allFinite()) return std::nullopt;
    for (std::size_t k = 0; k < free_.size(); ++k) y[free_[k]] = yf[k];
    return y;
  }

 private:
  const QuadraticForm& qf_;
  std::vector<char> fixed_;
  std::vector<int> free_;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
  bool ready_ = false;
};

}  // namespace

PrimalSolution solve_primal(const ObstacleProblem& problem, const SolverOptions& opts) {
  if (!(opts.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "solver tolerance must be positive");
  const Grid& grid = problem.grid();
  const HessianOperator& op = problem.op();
  const QuadraticForm qf = assemble(problem);
  const Eigen::VectorXd phi = op.gather(problem.obstacle());
  const double eps_active = opts.eps_active > 0.0 ? opts.eps_active : default_eps_active(problem);
  const long max_iter = opts.max_iter > 0 ? opts.max_iter : (grid.dim() == 1 ? 200000 : 500000);
  const double threshold = opts.tol * (1.0 + problem.load().max_abs());
  const Eigen::Index n = qf.b.size();

  // Projection of zero onto the constraint set.
  Eigen::VectorXd x = phi.cwiseMax(0.0);

  PrimalSolution sol{ScalarField(grid), ScalarField(grid), {}, 0, false, eps_active, {}, {}};
  double energy = qf.energy(x);
  if (opts.record_energy) sol.energy_history.push_back(energy);

  const double step = opts.method == SolverMethod::ProjectedGradient
                          ? 1.0 / lipschitz_estimate(qf.h, opts.power_iterations, opts.lipschitz_safety)
                          : 0.0;
  Eigen::VectorXd diag(n);
  for (Eigen::Index p = 0; p < n; ++p) diag[p] = qf.h.coeff(p, p);

  FaceSolver face(qf);
  std::vector<char> last_rejected;

  auto sweep = [&]() {
    if (opts.method == SolverMethod::ProjectedGradient) {
      x = (x - step * (qf.h * x - qf.b)).cwiseMax(phi);
      return;
    }
    for (Eigen::Index p = 0; p < n; ++p) {
      double off = 0.0;
      for (SparseMatrix::InnerIterator it(qf.h, p); it; ++it) {
        if (it.row() != p) off += it.value() * x[it.row()];
      }
      const double gs = (qf.b[p] - off) / diag[p];
      x[p] = std::max(phi[p], (1.0 - opts.omega) * x[p] + opts.omega * gs);
    }
  };

  // Minimize on the current face, then search along the projected path;
  // accept only an energy decrease so descent is preserved.
  auto subspace_step = [&]() {
    std::vector<char> fixed(n);
    for (Eigen::Index p = 0; p < n; ++p) fixed[p] = (x[p] - phi[p] <= eps_active) ? 1 : 0;
    if (fixed == last_rejected) return;
    const auto target = face.solve(fixed, phi);
    if (!target) return;
    const Eigen::VectorXd dir = *target - x;
    double t = 1.0;
    for (int k = 0; k < 12; ++k, t *= 0.5) {
      const Eigen::VectorXd z = (x + t * dir).cwiseMax(phi);
      const double ez = qf.energy(z);
      if (ez <= energy) {
        x = z;
        energy = ez;
        last_rejected.clear();
        return;
      }
    }
    last_rejected = fixed;
  };

  long it = 0;
  bool converged = false;
  while (it < max_iter) {
    sweep();
    ++it;
    energy = qf.energy(x);
    if (opts.subspace_every > 0 && it % opts.subspace_every == 0) subspace_step();
    if (opts.record_energy) sol.energy_history.push_back(energy);
    if (it % std::max(1, opts.check_every) == 0 || it == max_iter) {
      if (kkt_satisfied(evaluate_kkt(qf, x, phi, eps_active).kkt, x, phi, threshold)) {
        converged = true;
        break;
      }
    }
  }

  const IterateKKT final_kkt = evaluate_kkt(qf, x, phi, eps_active);
  sol.u = op.scatter(x);
  sol.lambda = op.scatter(final_kkt.lambda);
  sol.partition = coincidence_set(sol.u, problem.obstacle(), eps_active);
  sol.iterations = it;
  sol.kkt = final_kkt.kkt;
  sol.converged = converged || kkt_satisfied(final_kkt.kkt, x, phi, threshold);
  return sol;
}

ScalarField multiplier(const ScalarField& u, const ObstacleProblem& problem) {
  const HessianOperator& op = problem.op();
  if (!u.is_clamped()) throw Error(ErrorCode::NotClamped, "multiplier requires a clamped field");
  const QuadraticForm qf = assemble(problem);
  return op.scatter((qf.h * op.gather(u) - qf.b).cwiseQuotient(qf.w));
}

TensorField recover_dual(const ScalarField& u, const ObstacleProblem& problem) {
  return apply_coeff(problem.op().apply(u), problem.coeff(), CoeffMode::Direct);
}

Partition coincidence_set(const ScalarField& u, const ScalarField& phi, double eps_active) {
  require_same_grid(u.grid(), phi.grid());
  if (!(eps_active > 0.0)) throw Error(ErrorCode::InvalidArgument, "activity threshold must be positive");
  Partition part;
  for (std::size_t k : u.grid().interior()) {
    if (u[k] - phi[k] <= eps_active) {
      part.active.push_back(k);
    } else {
      part.inactive.push_back(k);
    }
  }
  return part;
}

KKTReport kkt_report(const ScalarField& u, const ScalarField& lambda, const ObstacleProblem& problem,
                     double eps_active) {
  require_same_grid(u.grid(), problem.grid());
  require_same_grid(lambda.grid(), problem.grid());
  const Grid& grid = problem.grid();
  const ScalarField& phi = problem.obstacle();
  KKTReport r;
  for (std::size_t k : grid.interior()) {
    const double gap = u[k] - phi[k];
    r.feasibility = std::max(r.feasibility, -gap);
    r.complementarity += grid.weight(k) * std::abs(lambda[k] * gap);
    if (gap <= eps_active) {
      r.multiplier_sign = std::max(r.multiplier_sign, -lambda[k]);
    } else {
      r.stationarity = std::max(r.stationarity, std::abs(lambda[k]));
    }
  }
  return r;
}

}  // namespace devlab
