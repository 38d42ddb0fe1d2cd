#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "devlab/error.hpp"

namespace devlab {

/// Parse failure with the byte offset into the source and the set of tokens
/// that would have been accepted there.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& what)
      : Error(ErrorCode::ParseError, what), offset_(offset), expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

/// Arithmetic expression in x (and y in 2D).
///
/// Grammar, loosest binding first:
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?          right-associative
///   primary := number | x | y | func '(' args ')' | '(' expr ')'
/// with func one of sin cos exp abs (one argument) or min max (two).
class Expression {
 public:
  struct Node;

  /// Throws EvalError on division by zero or zero raised to a negative power.
  double eval(double x, double y = 0.0) const;

  /// Fully parenthesized form; parsing it again yields the same tree.
  std::string to_string() const;

  const Node& root() const noexcept { return *root_; }

 private:
  friend class ExpressionParser;
  explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

  std::shared_ptr<const Node> root_;
};

/// `dim` controls which variables are known: x only in 1D, x and y in 2D.
Expression parse_expr(std::string_view src, int dim = 2);

}  // namespace devlab
