#include "devlab/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <variant>

namespace devlab {

enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Func { Sin, Cos, Exp, Abs, Min, Max };

struct Expression::Node {
  struct Number { double value; };
  struct Var { int axis; };
  struct Neg { std::shared_ptr<const Node> arg; };
  struct Binary {
    BinaryOp op;
    std::shared_ptr<const Node> lhs, rhs;
  };
  struct Call {
    Func fn;
    std::vector<std::shared_ptr<const Node>> args;
  };

  std::variant<Number, Var, Neg, Binary, Call> data;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

struct FuncInfo {
  const char* name;
  Func fn;
  int arity;
};

constexpr FuncInfo kFuncs[] = {
    {"sin", Func::Sin, 1}, {"cos", Func::Cos, 1}, {"exp", Func::Exp, 1},
    {"abs", Func::Abs, 1}, {"min", Func::Min, 2}, {"max", Func::Max, 2},
};

const char* func_name(Func fn) {
  for (const FuncInfo& f : kFuncs) {
    if (f.fn == fn) return f.name;
  }
  return "?";
}

char op_char(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return '+';
    case BinaryOp::Sub: return '-';
    case BinaryOp::Mul: return '*';
    case BinaryOp::Div: return '/';
    case BinaryOp::Pow: return '^';
  }
  return '?';
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double eval_node(const Expression::Node& node, double x, double y) {
  using N = Expression::Node;
  return std::visit(
      Overloaded{
          [](const N::Number& n) { return n.value; },
          [&](const N::Var& v) { return v.axis == 0 ? x : y; },
          [&](const N::Neg& n) { return -eval_node(*n.arg, x, y); },
          [&](const N::Binary& b) {
            const double l = eval_node(*b.lhs, x, y);
            const double r = eval_node(*b.rhs, x, y);
            switch (b.op) {
              case BinaryOp::Add: return l + r;
              case BinaryOp::Sub: return l - r;
              case BinaryOp::Mul: return l * r;
              case BinaryOp::Div:
                if (r == 0.0) throw Error(ErrorCode::EvalError, "division by zero");
                return l / r;
              case BinaryOp::Pow:
                if (l == 0.0 && r < 0.0) throw Error(ErrorCode::EvalError, "zero raised to a negative power");
                return std::pow(l, r);
            }
            return 0.0;
          },
          [&](const N::Call& c) {
            const double a = eval_node(*c.args[0], x, y);
            switch (c.fn) {
              case Func::Sin: return std::sin(a);
              case Func::Cos: return std::cos(a);
              case Func::Exp: return std::exp(a);
              case Func::Abs: return std::abs(a);
              case Func::Min: return std::min(a, eval_node(*c.args[1], x, y));
              case Func::Max: return std::max(a, eval_node(*c.args[1], x, y));
            }
            return 0.0;
          },
      },
      node.data);
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string print_node(const Expression::Node& node) {
  using N = Expression::Node;
  return std::visit(Overloaded{
                        [](const N::Number& n) { return format_number(n.value); },
                        [](const N::Var& v) { return std::string(v.axis == 0 ? "x" : "y"); },
                        [](const N::Neg& n) { return "(-" + print_node(*n.arg) + ")"; },
                        [](const N::Binary& b) {
                          return "(" + print_node(*b.lhs) + " " + op_char(b.op) + " " + print_node(*b.rhs) + ")";
                        },
                        [](const N::Call& c) {
                          std::string s = std::string(func_name(c.fn)) + "(";
                          for (std::size_t i = 0; i < c.args.size(); ++i) {
                            if (i > 0) s += ", ";
                            s += print_node(*c.args[i]);
                          }
                          return s + ")";
                        },
                    },
                    node.data);
}

}  // namespace

class ExpressionParser {
 public:
  ExpressionParser(std::string_view src, int dim) : src_(src), dim_(dim) {}

  Expression parse() {
    NodePtr root = expr();
    skip_ws();
    if (pos_ < src_.size()) fail({"operator", "end of input"}, "trailing input");
    return Expression(std::move(root));
  }

 private:
  using N = Expression::Node;

  static NodePtr make(N::Number n) { return std::make_shared<const N>(N{n}); }
  static NodePtr make(N::Var v) { return std::make_shared<const N>(N{v}); }
  static NodePtr make(N::Neg n) { return std::make_shared<const N>(N{std::move(n)}); }
  static NodePtr make(N::Binary b) { return std::make_shared<const N>(N{std::move(b)}); }
  static NodePtr make(N::Call c) { return std::make_shared<const N>(N{std::move(c)}); }

  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& what) const {
    std::string msg = what + " at offset " + std::to_string(pos_) + "; expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i > 0) msg += i + 1 == expected.size() ? " or " : ", ";
      msg += expected[i];
    }
    throw ParseError(pos_, std::move(expected), msg);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail({std::string("'") + c + "'"}, "unexpected input");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(N::Binary{BinaryOp::Add, lhs, term()});
      } else if (accept('-')) {
        lhs = make(N::Binary{BinaryOp::Sub, lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(N::Binary{BinaryOp::Mul, lhs, unary()});
      } else if (accept('/')) {
        lhs = make(N::Binary{BinaryOp::Div, lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(N::Neg{unary()});
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(N::Binary{BinaryOp::Pow, base, unary()});
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail({"number", "identifier", "'('", "'-'"}, "unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail({"number", "identifier", "'('", "'-'"}, "unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        digits();
      } else {
        pos_ = save;
      }
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec != std::errc() || ptr != src_.data() + pos_) {
      pos_ = start;
      fail({"number"}, "malformed number");
    }
    return make(N::Number{value});
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = src_.substr(start, pos_ - start);
    if (name == "x") return make(N::Var{0});
    if (name == "y" && dim_ == 2) return make(N::Var{1});
    for (const FuncInfo& f : kFuncs) {
      if (name == f.name) {
        expect('(');
        N::Call call{f.fn, {}};
        call.args.push_back(expr());
        for (int a = 1; a < f.arity; ++a) {
          expect(',');
          call.args.push_back(expr());
        }
        expect(')');
        return make(std::move(call));
      }
    }
    pos_ = start;
    std::vector<std::string> known{"x"};
    if (dim_ == 2) known.emplace_back("y");
    for (const FuncInfo& f : kFuncs) known.emplace_back(f.name);
    fail(known, "unknown identifier '" + std::string(name) + "'");
  }

  std::string_view src_;
  int dim_;
  std::size_t pos_ = 0;
};

double Expression::eval(double x, double y) const { return eval_node(*root_, x, y); }

std::string Expression::to_string() const { return print_node(*root_); }

Expression parse_expr(std::string_view src, int dim) { return ExpressionParser(src, dim).parse(); }

}  // namespace devlab
