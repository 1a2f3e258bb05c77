#include "oscimax/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

#include "oscimax/error.hpp"

namespace oscimax {

struct Expr::Node {
  enum class Op { constant, variable, add, sub, mul, div, pow, neg, sin, cos, exp, log, abs, sqrt, clamp };
  Op op = Op::constant;
  double value = 0.0;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Op = Expr::Node::Op;

NodePtr make(Op op, std::vector<NodePtr> args = {}, double value = 0.0) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->args = std::move(args);
  n->value = value;
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, char variable) : text_(text), variable_(variable) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression '" + std::string(text_) + "': " + what + " at offset " +
                      std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Op::add, {lhs, term()});
      } else if (accept('-')) {
        lhs = make(Op::sub, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Op::mul, {lhs, unary()});
      } else if (accept('/')) {
        lhs = make(Op::div, {lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::neg, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Op::pow, {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      expect(')');
      return inner;
    }
    if (c == '|') {
      ++pos_;
      NodePtr inner = expr();
      expect('|');
      return make(Op::abs, {inner});
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    const std::string rest(text_.substr(pos_));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    pos_ += used;
    return make(Op::constant, {}, v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(text_.substr(start, pos_ - start));
    if (name.size() == 1 && name[0] == variable_) return make(Op::variable);
    if (name == "pi") return make(Op::constant, {}, std::numbers::pi);
    if (name == "e") return make(Op::constant, {}, std::numbers::e);

    static const std::pair<const char*, Op> unary_funcs[] = {
        {"sin", Op::sin}, {"cos", Op::cos}, {"exp", Op::exp},
        {"log", Op::log}, {"abs", Op::abs}, {"sqrt", Op::sqrt},
    };
    for (const auto& [fname, op] : unary_funcs) {
      if (name == fname) {
        expect('(');
        NodePtr arg = expr();
        expect(')');
        return make(op, {arg});
      }
    }
    if (name == "clamp") {
      expect('(');
      NodePtr v = expr();
      expect(',');
      NodePtr lo = expr();
      expect(',');
      NodePtr hi = expr();
      expect(')');
      return make(Op::clamp, {v, lo, hi});
    }
    fail("unknown identifier '" + name + "'");
  }

  std::string_view text_;
  char variable_;
  std::size_t pos_ = 0;
};

Dual eval(const Expr::Node& n, double v) {
  switch (n.op) {
    case Op::constant:
      return {n.value, 0.0};
    case Op::variable:
      return {v, 1.0};
    case Op::add: {
      const Dual a = eval(*n.args[0], v), b = eval(*n.args[1], v);
      return {a.value + b.value, a.deriv + b.deriv};
    }
    case Op::sub: {
      const Dual a = eval(*n.args[0], v), b = eval(*n.args[1], v);
      return {a.value - b.value, a.deriv - b.deriv};
    }
    case Op::mul: {
      const Dual a = eval(*n.args[0], v), b = eval(*n.args[1], v);
      return {a.value * b.value, a.deriv * b.value + a.value * b.deriv};
    }
    case Op::div: {
      const Dual a = eval(*n.args[0], v), b = eval(*n.args[1], v);
      return {a.value / b.value, (a.deriv * b.value - a.value * b.deriv) / (b.value * b.value)};
    }
    case Op::pow: {
      const Dual a = eval(*n.args[0], v), b = eval(*n.args[1], v);
      const double p = std::pow(a.value, b.value);
      double d = 0.0;
      if (a.deriv != 0.0) d += b.value * std::pow(a.value, b.value - 1.0) * a.deriv;
      if (b.deriv != 0.0) d += p * std::log(a.value) * b.deriv;
      return {p, d};
    }
    case Op::neg: {
      const Dual a = eval(*n.args[0], v);
      return {-a.value, -a.deriv};
    }
    case Op::sin: {
      const Dual a = eval(*n.args[0], v);
      return {std::sin(a.value), std::cos(a.value) * a.deriv};
    }
    case Op::cos: {
      const Dual a = eval(*n.args[0], v);
      return {std::cos(a.value), -std::sin(a.value) * a.deriv};
    }
    case Op::exp: {
      const Dual a = eval(*n.args[0], v);
      const double e = std::exp(a.value);
      return {e, e * a.deriv};
    }
    case Op::log: {
      const Dual a = eval(*n.args[0], v);
      return {std::log(a.value), a.deriv / a.value};
    }
    case Op::abs: {
      const Dual a = eval(*n.args[0], v);
      const double s = a.value > 0.0 ? 1.0 : (a.value < 0.0 ? -1.0 : 0.0);
      return {std::abs(a.value), s * a.deriv};
    }
    case Op::sqrt: {
      const Dual a = eval(*n.args[0], v);
      const double r = std::sqrt(a.value);
      return {r, a.deriv / (2.0 * r)};
    }
    case Op::clamp: {
      const Dual a = eval(*n.args[0], v), lo = eval(*n.args[1], v), hi = eval(*n.args[2], v);
      if (a.value < lo.value) return lo;
      if (a.value > hi.value) return hi;
      return a;
    }
  }
  return {};
}

bool depends_on_variable(const Expr::Node& n) {
  if (n.op == Op::variable) return true;
  for (const auto& a : n.args) {
    if (depends_on_variable(*a)) return true;
  }
  return false;
}

}  // namespace

Expr::Expr(std::shared_ptr<const Node> root, std::string text, char variable)
    : root_(std::move(root)), text_(std::move(text)), variable_(variable) {}

Expr Expr::parse(std::string_view text, char variable) {
  Parser p(text, variable);
  return Expr(p.parse(), std::string(text), variable);
}

double Expr::operator()(double v) const { return eval(*root_, v).value; }

Dual Expr::eval_dual(double v) const { return eval(*root_, v); }

bool Expr::is_constant() const { return !depends_on_variable(*root_); }

}  // namespace oscimax
