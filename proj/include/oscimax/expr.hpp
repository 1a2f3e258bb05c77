#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace oscimax {

// Value together with its derivative with respect to the expression variable.
struct Dual {
  double value = 0.0;
  double deriv = 0.0;
};

// Small single-variable expression language used for x-dependent phase
// coefficients and for the β(t) factor of separable phases.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | <variable> | 'pi' | 'e' | func '(' args ')'
//            | '(' expr ')' | '|' expr '|'
//   func    := sin | cos | exp | log | abs | sqrt | clamp(e, lo, hi)
//
// Derivatives are exact (forward-mode dual numbers), not finite differences.
class Expr {
 public:
  static Expr parse(std::string_view text, char variable);

  double operator()(double v) const;
  Dual eval_dual(double v) const;

  const std::string& text() const { return text_; }
  char variable() const { return variable_; }
  bool is_constant() const;

  struct Node;

 private:
  Expr(std::shared_ptr<const Node> root, std::string text, char variable);

  std::shared_ptr<const Node> root_;
  std::string text_;
  char variable_ = 'x';
};

}  // namespace oscimax
