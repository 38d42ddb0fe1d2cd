#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>

#include "devlab/expression.hpp"

namespace devlab {
namespace {

TEST(Expression, Examples) {
  EXPECT_EQ(parse_expr("sin(x)*2").eval(0.0), 0.0);
  EXPECT_DOUBLE_EQ(parse_expr("x^2 - 2*x^3 + x^4").eval(0.5), 0.0625);
  EXPECT_DOUBLE_EQ(parse_expr("max(x, y) - min(x, y)").eval(1.0, 3.5), 2.5);
  EXPECT_DOUBLE_EQ(parse_expr("abs(-3) + exp(0) + cos(0)").eval(0.0), 5.0);
  EXPECT_DOUBLE_EQ(parse_expr("1e-2 * 3.5E1").eval(0.0), 0.35);
}

TEST(Expression, Precedence) {
  EXPECT_DOUBLE_EQ(parse_expr("2^3^2").eval(0), 512.0);
  EXPECT_DOUBLE_EQ(parse_expr("-2^2").eval(0), -4.0);
  EXPECT_DOUBLE_EQ(parse_expr("2^-1").eval(0), 0.5);
  EXPECT_DOUBLE_EQ(parse_expr("1 - 2 - 3").eval(0), -4.0);
  EXPECT_DOUBLE_EQ(parse_expr("8 / 4 / 2").eval(0), 1.0);
  EXPECT_DOUBLE_EQ(parse_expr("2 + 3 * 4").eval(0), 14.0);
  EXPECT_DOUBLE_EQ(parse_expr("(2 + 3) * 4").eval(0), 20.0);
}

TEST(Expression, ErrorOffset) {
  try {
    parse_expr("2 + * 3");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 4u);
    EXPECT_FALSE(e.expected().empty());
  }
}

TEST(Expression, Rejections) {
  EXPECT_THROW(parse_expr("y + 1", 1), ParseError);
  EXPECT_NO_THROW(parse_expr("y + 1", 2));
  EXPECT_THROW(parse_expr("foo(x)"), ParseError);
  EXPECT_THROW(parse_expr("sin(x, y)"), ParseError);
  EXPECT_THROW(parse_expr("max(x)"), ParseError);
  EXPECT_THROW(parse_expr("(x + 1"), ParseError);
  EXPECT_THROW(parse_expr("x 1"), ParseError);
  EXPECT_THROW(parse_expr(""), ParseError);
}

TEST(Expression, EvalErrors) {
  EXPECT_THROW(parse_expr("1 / x").eval(0.0), Error);
  EXPECT_THROW(parse_expr("x ^ -1").eval(0.0), Error);
  EXPECT_NO_THROW(parse_expr("1 / x").eval(2.0));
}

// Random expression trees: printing and re-parsing is a fixed point and
// preserves the value.
std::string random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
  std::uniform_real_distribution<double> num(0.1, 3.0);
  switch (pick(rng)) {
    case 0: return std::to_string(num(rng));
    case 1: return "x";
    case 2: return "y";
    case 3: return random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1);
    case 4: return random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1);
    case 5: return random_expr(rng, depth - 1) + " * " + random_expr(rng, depth - 1);
    case 6: return "-" + random_expr(rng, depth - 1);
    case 7: return "sin(" + random_expr(rng, depth - 1) + ")";
    case 8: return "max(" + random_expr(rng, depth - 1) + ", " + random_expr(rng, depth - 1) + ")";
    default: return "(" + random_expr(rng, depth - 1) + ")^2";
  }
}

TEST(Expression, PrintParseFixedPoint) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::string src = random_expr(rng, 4);
    const Expression e = parse_expr(src);
    const std::string printed = e.to_string();
    const Expression again = parse_expr(printed);
    EXPECT_EQ(again.to_string(), printed) << src;
    const double a = e.eval(0.3, -0.7);
    const double b = again.eval(0.3, -0.7);
    EXPECT_EQ(a, b) << src;
  }
}

}  // namespace
}  // namespace devlab
