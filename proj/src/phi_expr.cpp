#include "curvimg/phi_expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <string>
#include <utility>

#include "curvimg/errors.hpp"

namespace curvimg {

namespace {

// Variable slots: theta on S^1, normal components on S^2.
enum Slot { kTheta = 0, kX = 1, kY = 2, kZ = 3 };

struct Node {
  enum class Op { kConst, kVar, kAdd, kSub, kMul, kDiv, kPow, kNeg, kCos, kSin, kExp };

  Op op;
  double value = 0;
  int slot = 0;
  std::unique_ptr<Node> a, b;

  double eval(const double* vars) const {
    switch (op) {
      case Op::kConst: return value;
      case Op::kVar: return vars[slot];
      case Op::kAdd: return a->eval(vars) + b->eval(vars);
      case Op::kSub: return a->eval(vars) - b->eval(vars);
      case Op::kMul: return a->eval(vars) * b->eval(vars);
      case Op::kDiv: return a->eval(vars) / b->eval(vars);
      case Op::kPow: return std::pow(a->eval(vars), b->eval(vars));
      case Op::kNeg: return -a->eval(vars);
      case Op::kCos: return std::cos(a->eval(vars));
      case Op::kSin: return std::sin(a->eval(vars));
      case Op::kExp: return std::exp(a->eval(vars));
    }
    return 0;  // unreachable
  }
};

using NodePtr = std::unique_ptr<Node>;

NodePtr leaf(Node::Op op, double value, int slot = 0) {
  auto n = std::make_unique<Node>();
  n->op = op;
  n->value = value;
  n->slot = slot;
  return n;
}

NodePtr unary(Node::Op op, NodePtr a) {
  auto n = std::make_unique<Node>();
  n->op = op;
  n->a = std::move(a);
  return n;
}

NodePtr binary(Node::Op op, NodePtr a, NodePtr b) {
  auto n = std::make_unique<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

// Recursive descent over the raw string; columns are 1-based for messages.
//
//   expression -> term (('+'|'-') term)*
//   term       -> unary (('*'|'/') unary)*
//   unary      -> '-' unary | power
//   power      -> primary ('^' unary)?
//   primary    -> number | name | name '(' expression ')' | '(' expression ')'
//
// '^' binds tighter than unary minus, so -x^2 means -(x^2).
struct Parser {
  const std::string& text;
  int dim;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg, size_t at) const {
    throw ConfigError("phi: " + msg + " at column " + std::to_string(at + 1));
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  NodePtr parse() {
    NodePtr e = expression();
    skip_ws();
    if (pos != text.size()) fail("unexpected trailing input", pos);
    return e;
  }

  NodePtr expression() {
    NodePtr e = term();
    for (;;) {
      if (eat('+'))
        e = binary(Node::Op::kAdd, std::move(e), term());
      else if (eat('-'))
        e = binary(Node::Op::kSub, std::move(e), term());
      else
        return e;
    }
  }

  NodePtr term() {
    NodePtr e = unary_expr();
    for (;;) {
      if (eat('*'))
        e = binary(Node::Op::kMul, std::move(e), unary_expr());
      else if (eat('/'))
        e = binary(Node::Op::kDiv, std::move(e), unary_expr());
      else
        return e;
    }
  }

  NodePtr unary_expr() {
    if (eat('-')) return unary(Node::Op::kNeg, unary_expr());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (eat('^')) return binary(Node::Op::kPow, std::move(base), unary_expr());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos == text.size()) fail("expression ends unexpectedly", pos);
    const char c = text[pos];
    if (c == '(') {
      ++pos;
      NodePtr e = expression();
      if (!eat(')')) fail("missing ')'", pos);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return name();
    fail(std::string("unexpected character '") + c + "'", pos);
  }

  NodePtr number() {
    const char* begin = text.c_str() + pos;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("bad number", pos);
    pos += static_cast<size_t>(end - begin);
    return leaf(Node::Op::kConst, v);
  }

  NodePtr name() {
    const size_t start = pos;
    while (pos < text.size() && std::isalpha(static_cast<unsigned char>(text[pos]))) ++pos;
    const std::string id = text.substr(start, pos - start);
    if (id == "cos" || id == "sin" || id == "exp") {
      if (!eat('(')) fail(id + " needs a parenthesized argument", pos);
      NodePtr arg = expression();
      if (!eat(')')) fail("missing ')'", pos);
      const Node::Op op = id == "cos"  ? Node::Op::kCos
                          : id == "sin" ? Node::Op::kSin
                                        : Node::Op::kExp;
      return unary(op, std::move(arg));
    }
    if (id == "pi") return leaf(Node::Op::kConst, M_PI);
    if (id == "theta") {
      if (dim != 2) fail("variable theta needs a 2d grid", start);
      return leaf(Node::Op::kVar, 0, kTheta);
    }
    if (id == "x" || id == "y" || id == "z") {
      if (dim != 3) fail("variable " + id + " needs a 3d grid", start);
      return leaf(Node::Op::kVar, 0, id == "x" ? kX : id == "y" ? kY : kZ);
    }
    fail("unknown name '" + id + "'", start);
  }
};

}  // namespace

Density phi_from_expression(GridPtr grid, const std::string& expr) {
  if (!grid) throw ConfigError("phi: null grid");
  Parser parser{expr, grid->dim};
  NodePtr root = parser.parse();

  Eigen::VectorXd v(grid->count());
  double vars[4] = {0, 0, 0, 0};
  for (int i = 0; i < grid->count(); ++i) {
    if (grid->dim == 2) {
      vars[kTheta] = grid->theta[i];
    } else {
      vars[kX] = grid->nodes(i, 0);
      vars[kY] = grid->nodes(i, 1);
      vars[kZ] = grid->nodes(i, 2);
    }
    v[i] = root->eval(vars);
    if (!std::isfinite(v[i]))
      throw ConfigError("phi: expression is not finite on the grid");
    if (v[i] <= 0)
      throw ConfigError("phi: expression must be positive on the grid");
  }
  return make_density_from_samples(std::move(grid), std::move(v));
}

}  // namespace curvimg
