#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "devlab/coefficient.hpp"
#include "devlab/error.hpp"
#include "devlab/grid.hpp"
#include "test_support.hpp"

namespace devlab {
namespace {

using testing::sample;
using testing::unit_line;
using testing::unit_square;

TEST(Grid, SpacingAndNodes1D) {
  const Grid g = unit_line(5);
  EXPECT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g.spacing(0), 0.25);
  const double expected[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (std::size_t k = 0; k < 5; ++k) EXPECT_DOUBLE_EQ(g.x(k), expected[k]);
  EXPECT_EQ(g.interior().size(), 3u);
  EXPECT_TRUE(g.is_boundary(0));
  EXPECT_TRUE(g.is_boundary(4));
  EXPECT_EQ(g.interior_position(0), -1);
  EXPECT_EQ(g.interior_position(1), 0);
}

TEST(Grid, SpacingAndNodes2D) {
  const Grid g = make_grid_2d({0.0, 1.0}, {0.0, 2.0}, 5, 9);
  EXPECT_EQ(g.size(), 45u);
  EXPECT_DOUBLE_EQ(g.spacing(0), 0.25);
  EXPECT_DOUBLE_EQ(g.spacing(1), 0.25);
  EXPECT_EQ(g.interior().size(), 3u * 7u);
  EXPECT_EQ(g.index(2, 3), 2u + 5u * 3u);
  EXPECT_EQ(g.ix(g.index(2, 3)), 2);
  EXPECT_EQ(g.iy(g.index(2, 3)), 3);
  EXPECT_DOUBLE_EQ(g.y(g.index(0, 8)), 2.0);
}

TEST(Grid, RejectsBadShapes) {
  EXPECT_THROW(make_grid_1d({0.0, 1.0}, 3), Error);
  EXPECT_THROW(make_grid_1d({1.0, 1.0}, 9), Error);
  const Interval b[] = {{0.0, 1.0}};
  const int n[] = {9};
  EXPECT_THROW(make_grid(3, b, n), Error);
}

TEST(Grid, WeightsSumToMeasure) {
  const Grid g = make_grid_2d({0.0, 2.0}, {-1.0, 0.5}, 7, 6);
  double total = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) total += g.weight(k);
  EXPECT_NEAR(total, 3.0, 1e-14);
}

TEST(Integrate, Constant) {
  EXPECT_NEAR(integrate(sample(unit_line(9), [](double, double) { return 1.0; })), 1.0, 1e-15);
}

TEST(Integrate, LinearExact) {
  for (int n : {5, 6, 17, 40}) {
    EXPECT_NEAR(integrate(sample(unit_line(n), [](double x, double) { return x; })), 0.5, 1e-15);
  }
}

TEST(Integrate, BilinearExact) {
  EXPECT_NEAR(integrate(sample(unit_square(5), [](double x, double y) { return x * y; })), 0.25, 1e-15);
}

TEST(Inner, IdentityTensor) {
  const Grid g = unit_square(6);
  TensorField q(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    q(k, 0) = 1.0;
    q(k, 1) = 1.0;
  }
  EXPECT_NEAR(inner(q, q), 2.0, 1e-14);
}

TEST(Inner, OffDiagonalCountsTwice) {
  const Grid g = unit_square(5);
  TensorField q(g);
  for (std::size_t k = 0; k < g.size(); ++k) q(k, 2) = 1.0;
  EXPECT_NEAR(inner(q, q), 2.0, 1e-14);
}

TEST(Inner, SymmetricAndNonnegative) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Grid g = trial % 2 ? unit_square(5 + trial % 4) : unit_line(5 + trial);
    const TensorField q = testing::random_tensor(g, rng);
    const TensorField r = testing::random_tensor(g, rng);
    EXPECT_NEAR(inner(q, r), inner(r, q), 1e-14);
    EXPECT_GE(inner(q, q), 0.0);
  }
}

TEST(Inner, GridMismatchThrows) {
  TensorField a(unit_line(5));
  TensorField b(unit_line(6));
  EXPECT_THROW(inner(a, b), Error);
}

TEST(Fields, ClampedDetection) {
  const Grid g = unit_line(6);
  ScalarField v(g);
  EXPECT_TRUE(v.is_clamped());
  v[0] = 1e-300;
  EXPECT_FALSE(v.is_clamped());
}

TEST(Fields, Arithmetic) {
  const Grid g = unit_line(5);
  ScalarField a(g, {0, 1, 2, 3, 0});
  ScalarField b(g, {0, 2, 2, 2, 0});
  const ScalarField c = 2.0 * (a - b) + b;
  EXPECT_DOUBLE_EQ(c[1], 0.0);
  EXPECT_DOUBLE_EQ(c[3], 4.0);
  EXPECT_DOUBLE_EQ(hadamard(a, b)[2], 4.0);
  EXPECT_DOUBLE_EQ(a.max_abs(), 3.0);
}

TEST(NormWeighted, IdentityIsL2) {
  std::mt19937_64 rng(3);
  const Grid g = unit_square(7);
  const TensorField q = testing::random_tensor(g, rng);
  const auto id = CoefficientTensor::identity(g);
  EXPECT_NEAR(norm_weighted(q, id, CoeffMode::Direct), std::sqrt(inner(q, q)), 1e-14);
  EXPECT_NEAR(norm_weighted(q, id, CoeffMode::Inverse), std::sqrt(inner(q, q)), 1e-14);
}

TEST(NormWeighted, ScaledIdentity) {
  const Grid g = unit_square(5);
  TensorField q(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    q(k, 0) = 1.0;
    q(k, 1) = 1.0;
    q(k, 2) = std::sqrt(0.5);
  }
  ASSERT_NEAR(inner(q, q), 3.0, 1e-14);
  const auto a = CoefficientTensor::scaled_identity(g, 2.0);
  EXPECT_NEAR(std::pow(norm_weighted(q, a, CoeffMode::Direct), 2), 6.0, 1e-13);
  EXPECT_NEAR(std::pow(norm_weighted(q, a, CoeffMode::Inverse), 2), 1.5, 1e-13);
}

// Direct nodal summation of w * sum_c m_c d_c q_c^2 for a diagonal matrix.
TEST(NormWeighted, DiagonalMatrixAgainstSummation) {
  std::mt19937_64 rng(11);
  const Grid g = make_grid_2d({0.0, 1.0}, {0.0, 1.5}, 8, 9);
  const TensorField q = testing::random_tensor(g, rng);
  Eigen::MatrixXd m = Eigen::Vector3d(1.0, 4.0, 2.5).asDiagonal();
  const auto a = CoefficientTensor::matrix(g, m);
  double direct = 0.0;
  double inverse = 0.0;
  const double d[] = {1.0, 4.0, 2.5};
  for (std::size_t k = 0; k < g.size(); ++k) {
    for (int c = 0; c < 3; ++c) {
      const double mult = c == 2 ? 2.0 : 1.0;
      direct += g.weight(k) * mult * d[c] * q(k, c) * q(k, c);
      inverse += g.weight(k) * mult * q(k, c) * q(k, c) / d[c];
    }
  }
  EXPECT_NEAR(std::pow(norm_weighted(q, a, CoeffMode::Direct), 2), direct, 1e-14 * direct);
  EXPECT_NEAR(std::pow(norm_weighted(q, a, CoeffMode::Inverse), 2), inverse, 1e-14 * inverse);
}

TEST(NormWeighted, SpectralBounds) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const Grid g = trial % 2 ? unit_square(6) : unit_line(9);
    const auto a = testing::random_coefficient(g, rng, trial);
    const TensorField q = testing::random_tensor(g, rng);
    const double plain = std::sqrt(inner(q, q));
    const double weighted = norm_weighted(q, a, CoeffMode::Direct);
    EXPECT_LE(std::sqrt(a.kappa1()) * plain, weighted * (1 + 1e-13));
    EXPECT_LE(weighted, std::sqrt(a.kappa2()) * plain * (1 + 1e-13));
  }
}

TEST(ApplyCoeff, IdentityAndInverseRoundTrip) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 15; ++trial) {
    const Grid g = trial % 2 ? unit_square(5) : unit_line(7);
    const auto a = testing::random_coefficient(g, rng, trial);
    const TensorField q = testing::random_tensor(g, rng);
    const TensorField back = apply_coeff(apply_coeff(q, a, CoeffMode::Direct), a, CoeffMode::Inverse);
    for (std::size_t i = 0; i < q.values().size(); ++i) EXPECT_NEAR(back.values()[i], q.values()[i], 1e-13);
    // Self-adjointness for the contraction.
    const TensorField r = testing::random_tensor(g, rng);
    EXPECT_NEAR(inner(apply_coeff(q, a, CoeffMode::Direct), r), inner(q, apply_coeff(r, a, CoeffMode::Direct)),
                1e-13);
  }
  const Grid g = unit_square(5);
  const TensorField q = testing::random_tensor(g, rng);
  const TensorField half = apply_coeff(q, CoefficientTensor::scaled_identity(g, 2.0), CoeffMode::Inverse);
  for (std::size_t i = 0; i < q.values().size(); ++i) EXPECT_DOUBLE_EQ(half.values()[i], q.values()[i] / 2);
  const TensorField same = apply_coeff(q, CoefficientTensor::identity(g), CoeffMode::Direct);
  for (std::size_t i = 0; i < q.values().size(); ++i) EXPECT_EQ(same.values()[i], q.values()[i]);
}

TEST(Coefficient, RejectsNonSpd) {
  const Grid g = unit_square(5);
  Eigen::MatrixXd m = Eigen::Vector3d(1.0, 1.0, -1.0).asDiagonal();
  EXPECT_THROW(CoefficientTensor::matrix(g, m), Error);
  Eigen::MatrixXd ns = Eigen::Matrix3d::Identity();
  ns(0, 1) = 0.5;
  EXPECT_THROW(CoefficientTensor::matrix(g, ns), Error);
  EXPECT_THROW(CoefficientTensor::matrix(g, Eigen::MatrixXd::Identity(2, 2)), Error);
  ScalarField c(g);
  EXPECT_THROW(CoefficientTensor::scalar_field(c), Error);
}

}  // namespace
}  // namespace devlab
