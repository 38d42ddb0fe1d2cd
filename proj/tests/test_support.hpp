#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>

#include "devlab/coefficient.hpp"
#include "devlab/grid.hpp"
#include "devlab/obstacle.hpp"

namespace devlab::testing {

inline ScalarField sample(const Grid& g, const std::function<double(double, double)>& fn) {
  ScalarField out(g);
  for (std::size_t k = 0; k < g.size(); ++k) out[k] = fn(g.x(k), g.y(k));
  return out;
}

inline ScalarField random_clamped(const Grid& g, std::mt19937_64& rng, double amplitude = 1.0) {
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  ScalarField out(g);
  for (std::size_t k : g.interior()) out[k] = dist(rng);
  return out;
}

inline TensorField random_tensor(const Grid& g, std::mt19937_64& rng, double amplitude = 1.0) {
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  TensorField out(g);
  for (double& v : out.values()) v = dist(rng);
  return out;
}

/// Random SPD matrix with eigenvalues in [lo, hi].
inline Eigen::MatrixXd random_spd(int n, std::mt19937_64& rng, double lo = 0.5, double hi = 3.0) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::uniform_real_distribution<double> eig(lo, hi);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = dist(rng);
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  const Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d[i] = eig(rng);
  Eigen::MatrixXd s = q * d.asDiagonal() * q.transpose();
  return 0.5 * (s + s.transpose());
}

inline CoefficientTensor random_coefficient(const Grid& g, std::mt19937_64& rng, int kind) {
  switch (kind % 3) {
    case 0:
      return CoefficientTensor::identity(g);
    case 1: {
      std::uniform_real_distribution<double> dist(0.5, 2.0);
      ScalarField c(g);
      for (double& v : c.values()) v = dist(rng);
      return CoefficientTensor::scalar_field(std::move(c));
    }
    default:
      return CoefficientTensor::matrix(g, random_spd(g.tensor_components(), rng));
  }
}

inline Grid unit_line(int n) { return make_grid_1d({0.0, 1.0}, n); }
inline Grid unit_square(int n) { return make_grid_2d({0.0, 1.0}, {0.0, 1.0}, n, n); }

/// Flat obstacle below a uniformly loaded clamped beam or plate.
inline ObstacleProblem flat_contact(const Grid& g, double load, double level) {
  ScalarField f = sample(g, [&](double, double) { return load; });
  ScalarField phi = sample(g, [&](double, double) { return level; });
  return ObstacleProblem(std::move(f), std::move(phi), CoefficientTensor::identity(g));
}

}  // namespace devlab::testing
