#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hjn {

// Small arithmetic expression: + - * / ^, unary minus, sin cos tan exp log sqrt abs tanh,
// min max pow atan2, constants pi and e. Variables are bound by position at parse time.
class Expr {
 public:
  Expr();  // the constant 0
  static Expr constant(double v);
  static Expr parse(const std::string& text, const std::vector<std::string>& vars);

  double eval(std::span<const double> vars) const;
  double operator()(double x, double y = 0.0) const {
    const double v[2] = {x, y};
    return eval(v);
  }

  bool is_constant() const;
  double constant_value() const;  // valid when is_constant()
  const std::string& text() const { return text_; }
  std::size_t arity() const { return arity_; }

  // expression plus a constant, keeps the source text readable
  Expr plus(double c) const;
  Expr negated() const;

  struct Node;

 private:
  std::shared_ptr<const std::vector<Node>> prog_;
  std::string text_;
  std::size_t arity_ = 0;
};

}  // namespace hjn
