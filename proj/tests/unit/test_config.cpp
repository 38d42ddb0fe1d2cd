#include <gtest/gtest.h>

#include <cmath>

#include "devlab/config.hpp"
#include "devlab/error.hpp"
#include "devlab/expression.hpp"

namespace devlab {
namespace {

ProblemConfig from_text(const std::string& text) { return config_from_json(parse_config_text(text)); }

TEST(Config, ParsesTextForm) {
  const ProblemConfig c = from_text(R"(# comment
dim = 1
bounds = [0, 2]
nodes = 21
f = "-50 * x"
phi = -0.01
seed = 7

[solver]
method = "psor"
tol = 1e-10

[primal.p1]
kind = "perturb"
eps = 1e-2
mode = rough

[dual.fix]
kind = "feasible"
)");
  EXPECT_EQ(c.dim, 1);
  EXPECT_DOUBLE_EQ(c.bounds[0].hi, 2.0);
  EXPECT_EQ(c.nodes[0], 21);
  EXPECT_EQ(c.f_expr, "-50 * x");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.solver.method, SolverMethod::PSOR);
  EXPECT_DOUBLE_EQ(c.solver.tol, 1e-10);
  ASSERT_EQ(c.primal.size(), 1u);
  EXPECT_EQ(c.primal[0].name, "p1");
  EXPECT_EQ(c.primal[0].mode, PrimalRecipe::Mode::Rough);
  ASSERT_EQ(c.dual.size(), 1u);
  EXPECT_EQ(c.dual[0].kind, DualRecipe::Kind::Feasible);
}

TEST(Config, JsonRoundTrip) {
  const ProblemConfig c = from_text("dim = 2\nnodes = [7, 9]\nbounds = [[0, 1], [0, 2]]\nf = \"x*y\"\n");
  const Json j = config_to_json(c);
  const ProblemConfig back = config_from_json(j);
  EXPECT_EQ(config_to_json(back), j);
  EXPECT_EQ(make_config_grid(back).nodes(1), 9);
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_THROW(from_text("nodes = 9\ncolour = 3\n"), Error);
  EXPECT_THROW(from_text("nodes = 9\n[solver]\nspeed = 1\n"), Error);
  EXPECT_THROW(from_text("nodes = 9\n[primal.a]\nkind = \"perturb\"\n"), Error);
}

TEST(Config, RejectsPositiveBoundaryObstacle) {
  try {
    build_problem(from_text("nodes = 11\nphi = \"0.1\"\n"));
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Infeasible);
  }
}

TEST(Config, RejectsIndefiniteMatrix) {
  try {
    build_problem(from_text("dim = 2\nnodes = 7\n[A]\nmatrix = [[1,0,0],[0,1,0],[0,0,-1]]\n"));
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSPD);
  }
}

TEST(Config, NodalSamplingMatchesExpressions) {
  const ProblemConfig c = from_text("nodes = 23\nbounds = [-1, 2]\nf = \"sin(3*x) - x^2\"\nphi = \"-0.1 - x^2\"\n");
  const ObstacleProblem p = build_problem(c);
  const Expression f = parse_expr(c.f_expr, 1);
  const Expression phi = parse_expr(c.phi_expr, 1);
  for (std::size_t k = 0; k < p.grid().size(); ++k) {
    const double x = -1.0 + static_cast<double>(k) * (3.0 / 22.0);
    EXPECT_NEAR(p.load()[k], f.eval(x), 1e-15);
    EXPECT_NEAR(p.obstacle()[k], phi.eval(x), 1e-15);
  }
}

TEST(Config, NodesOverride) {
  const ProblemConfig c = from_text("nodes = 41\nf = \"-50\"\nphi = \"-0.01\"\n");
  EXPECT_EQ(build_problem(c, 11).grid().nodes(0), 11);
}

TEST(Config, BadExpressionIsReported) {
  EXPECT_THROW(build_problem(from_text("nodes = 9\nf = \"2 + * 3\"\n")), Error);
}

}  // namespace
}  // namespace devlab
