#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "devlab/obstacle.hpp"

namespace devlab {

/// Small dense bound-constrained QP: minimize 1/2 x^T H x - b^T x, x >= phi.
struct DenseQP {
  static constexpr int kMaxUnknowns = 16;

  Eigen::MatrixXd h;
  Eigen::VectorXd b;
  Eigen::VectorXd phi;
};

struct OracleResult {
  Eigen::VectorXd u;
  Eigen::VectorXd lambda;       // H u - b
  std::vector<bool> active;     // per unknown
  int kkt_points = 0;           // active sets that produced a KKT point
  bool degenerate = false;      // some |lambda_i| <= 1e-10 on an active constraint
};

/// Enumerates all 2^n active sets and returns the KKT point. Ties among
/// numerically identical points go to the smallest set bitmask. Throws
/// OracleFailure when no KKT point exists or two distinct ones do.
OracleResult brute_force_qp(const DenseQP& qp);

/// The discrete obstacle problem restricted to interior unknowns.
DenseQP make_dense_qp(const ObstacleProblem& problem);

/// Compares <grad J(v), w> against central differences of J evaluated by
/// quadrature. Returns the largest relative error over the step list.
double gradient_check(const ObstacleProblem& problem, const ScalarField& v, const ScalarField& w,
                      std::span<const double> steps);

}  // namespace devlab
