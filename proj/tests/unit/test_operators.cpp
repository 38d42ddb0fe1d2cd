#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "devlab/error.hpp"
#include "devlab/operators.hpp"
#include "test_support.hpp"

namespace devlab {
namespace {

using testing::random_clamped;
using testing::random_tensor;
using testing::sample;
using testing::unit_line;
using testing::unit_square;

TEST(Hessian, ZeroField) {
  const Grid g = unit_square(6);
  EXPECT_EQ(hessian(ScalarField(g)).max_abs(), 0.0);
}

TEST(Hessian, QuarticAtMidpoint) {
  const Grid g = unit_line(5);
  const ScalarField v = sample(g, [](double x, double) { return x * x * (1 - x) * (1 - x); });
  EXPECT_NEAR(hessian(v)(2, 0), -0.875, 1e-14);
}

TEST(Hessian, QuadraticInterior2D) {
  const Grid g = unit_square(9);
  // x^2 + y^2 restricted to nodes at least 2h inside, zero elsewhere.
  ScalarField v(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.ix(k) >= 1 && g.ix(k) <= 7 && g.iy(k) >= 1 && g.iy(k) <= 7) v[k] = g.x(k) * g.x(k) + g.y(k) * g.y(k);
  }
  const TensorField q = hessian(v);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.ix(k) < 2 || g.ix(k) > 6 || g.iy(k) < 2 || g.iy(k) > 6) continue;
    EXPECT_NEAR(q(k, 0), 2.0, 1e-11);
    EXPECT_NEAR(q(k, 1), 2.0, 1e-11);
    EXPECT_NEAR(q(k, 2), 0.0, 1e-11);
  }
}

TEST(Hessian, CrossStencil) {
  const Grid g = make_grid_2d({0.0, 1.0}, {0.0, 2.0}, 7, 9);
  ScalarField v(g);
  v[g.index(3, 4)] = 1.0;
  const TensorField q = hessian(v);
  const double hx = g.spacing(0);
  const double hy = g.spacing(1);
  EXPECT_NEAR(q(g.index(2, 3), 2), 1.0 / (4 * hx * hy), 1e-9);
  EXPECT_NEAR(q(g.index(4, 5), 2), 1.0 / (4 * hx * hy), 1e-9);
  EXPECT_NEAR(q(g.index(2, 5), 2), -1.0 / (4 * hx * hy), 1e-9);
  EXPECT_NEAR(q(g.index(3, 4), 0), -2.0 / (hx * hx), 1e-9);
  EXPECT_NEAR(q(g.index(3, 5), 1), 1.0 / (hy * hy), 1e-9);
}

TEST(Hessian, GhostReflectionAtBoundary) {
  const Grid g = unit_line(7);
  ScalarField v(g);
  v[1] = 1.0;
  const double h2 = g.spacing(0) * g.spacing(0);
  // v_{-1} = v_1, so the boundary node sees 2 v_1 / h^2.
  EXPECT_DOUBLE_EQ(hessian(v)(0, 0), 2.0 / h2);
}

TEST(Hessian, RejectsUnclamped) {
  ScalarField v(unit_line(6));
  v[5] = 1.0;
  EXPECT_THROW(hessian(v), Error);
}

TEST(Hessian, Linear) {
  std::mt19937_64 rng(21);
  const Grid g = unit_square(8);
  const ScalarField a = random_clamped(g, rng);
  const ScalarField b = random_clamped(g, rng);
  const TensorField lhs = hessian(0.3 * a + (-1.7) * b);
  const TensorField rhs = 0.3 * hessian(a) + (-1.7) * hessian(b);
  const double scale = lhs.max_abs();
  for (std::size_t i = 0; i < lhs.values().size(); ++i) {
    EXPECT_NEAR(lhs.values()[i], rhs.values()[i], 1e-14 * scale);
  }
}

TEST(DivDiv, ZeroField) {
  const Grid g = unit_square(5);
  EXPECT_EQ(div_div(TensorField(g)).max_abs(), 0.0);
}

class Adjointness : public ::testing::TestWithParam<int> {};

TEST_P(Adjointness, RandomPairs) {
  const int id = GetParam();
  const Grid g = id == 0   ? unit_line(21)
                 : id == 1 ? make_grid_1d({-1.0, 2.0}, 37)
                 : id == 2 ? unit_square(11)
                           : make_grid_2d({0.0, 2.0}, {-0.5, 0.5}, 13, 7);
  std::mt19937_64 rng(100 + id);
  for (int trial = 0; trial < 100; ++trial) {
    const ScalarField v = random_clamped(g, rng);
    const TensorField q = random_tensor(g, rng);
    const TensorField lv = hessian(v);
    const double lhs = inner(lv, q);
    const double rhs = integrate(hadamard(v, div_div(q)));
    const double scale = std::sqrt(inner(lv, lv) * inner(q, q)) + 1.0;
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * scale);
  }
}

INSTANTIATE_TEST_SUITE_P(Grids, Adjointness, ::testing::Values(0, 1, 2, 3));

TEST(DivDiv, ParabolaAwayFromBoundary) {
  const Grid g = unit_line(201);
  TensorField q(g);
  for (std::size_t k = 0; k < g.size(); ++k) q(k, 0) = g.x(k) * (1 - g.x(k));
  const ScalarField d = div_div(q);
  double dev = 0.0;
  for (int i = 3; i <= 197; ++i) dev = std::max(dev, std::abs(d[i] + 2.0));
  EXPECT_LE(dev, 0.01);
}

TEST(Bilaplacian, InteriorRowIsFivePointStencil) {
  const Grid g = unit_line(17);
  const HessianOperator op(g);
  const SparseMatrix h = op.weighted_bilaplacian(CoefficientTensor::identity(g));
  const Eigen::MatrixXd dense = Eigen::MatrixXd(h);
  const double h4 = std::pow(g.spacing(0), 4);
  const int row = 7;
  const double w = op.interior_weights()[row];
  const double stencil[] = {1, -4, 6, -4, 1};
  for (int c = 0; c < dense.cols(); ++c) {
    const int off = c - row;
    const double expected = (off >= -2 && off <= 2) ? stencil[off + 2] / h4 : 0.0;
    EXPECT_NEAR(dense(row, c) / w, expected, 1e-9 * 6 / h4);
  }
}

TEST(Bilaplacian, SymmetricPositiveDefinite) {
  std::mt19937_64 rng(4);
  for (int kind = 0; kind < 3; ++kind) {
    const Grid g = unit_square(9);
    const auto a = testing::random_coefficient(g, rng, kind);
    const Eigen::MatrixXd h = Eigen::MatrixXd(HessianOperator(g).weighted_bilaplacian(a));
    EXPECT_LE((h - h.transpose()).cwiseAbs().maxCoeff(), 1e-13 * h.cwiseAbs().maxCoeff());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(Coercivity, PositiveOnVariousGrids) {
  for (const Grid& g : {unit_line(5), unit_line(30), unit_square(5), make_grid_2d({0, 2}, {0, 1}, 11, 6)}) {
    EXPECT_GT(coercivity_constant(g, ClampedBC{}, CoefficientTensor::identity(g)), 0.0);
  }
}

TEST(Coercivity, ScalesWithCoefficient) {
  const Grid g = unit_square(9);
  const double k1 = coercivity_constant(g, ClampedBC{}, CoefficientTensor::identity(g));
  const double k4 = coercivity_constant(g, ClampedBC{}, CoefficientTensor::scaled_identity(g, 4.0));
  EXPECT_NEAR(k4 / k1, 2.0, 2e-10);
}

TEST(Coercivity, IterativeMatchesDense) {
  const Grid g = unit_line(61);
  const auto a = CoefficientTensor::identity(g);
  const auto dense = coercivity(g, a, EigenMethod::Dense);
  const auto iter = coercivity(g, a, EigenMethod::Iterative);
  EXPECT_NEAR(iter.lambda_min, dense.lambda_min, 1e-8 * dense.lambda_min);
}

TEST(Coercivity, RefinementConverges) {
  double prev = 0.0;
  for (int n : {41, 81, 161}) {
    const Grid g = unit_line(n);
    const double k2 = coercivity(g, CoefficientTensor::identity(g)).lambda_min;
    if (prev > 0.0) EXPECT_LT(std::abs(k2 - prev) / prev, 0.02);
    prev = k2;
  }
  // First clamped-clamped beam eigenvalue (4.730040745^4).
  EXPECT_NEAR(prev, 500.5639, 0.02 * 500.5639);
}

TEST(Eigenmodes, ClampedAndNormalized) {
  const Grid g = unit_line(31);
  const auto modes = clamped_eigenmodes(g, 4);
  ASSERT_EQ(modes.size(), 4u);
  for (const ScalarField& m : modes) {
    EXPECT_TRUE(m.is_clamped());
    EXPECT_NEAR(m.max_abs(), 1.0, 1e-14);
  }
}

}  // namespace
}  // namespace devlab
