#include "hjn/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "hjn/core.hpp"

namespace hjn {

struct Expr::Node {
  enum Op { num, var, add, sub, mul, div, pow, neg, fn1, fn2 } op;
  double value = 0.0;
  int a = -1, b = -1;
  int index = 0;  // variable slot or function id
};

namespace {

enum Fn1 { f_sin, f_cos, f_tan, f_exp, f_log, f_sqrt, f_abs, f_tanh };
enum Fn2 { f_min, f_max, f_pow, f_atan2 };

class Parser {
 public:
  Parser(const std::string& s, const std::vector<std::string>& vars) : s_(s), vars_(vars) {}

  std::vector<Expr::Node> run() {
    int root = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    // root is always the last node pushed
    if (root != static_cast<int>(nodes_.size()) - 1) fail("internal ordering");
    return std::move(nodes_);
  }

 private:
  using N = Expr::Node;

  [[noreturn]] void fail(const std::string& msg) {
    throw ConfigError("expression '" + s_ + "': " + msg + " at position " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  int push(N n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  int expr() {
    int lhs = term();
    for (;;) {
      if (eat('+')) {
        int rhs = term();
        lhs = push({N::add, 0, lhs, rhs});
      } else if (eat('-')) {
        int rhs = term();
        lhs = push({N::sub, 0, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }
  int term() {
    int lhs = unary();
    for (;;) {
      if (eat('*')) {
        int rhs = unary();
        lhs = push({N::mul, 0, lhs, rhs});
      } else if (eat('/')) {
        int rhs = unary();
        lhs = push({N::div, 0, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }
  int unary() {
    if (eat('-')) {
      int a = unary();
      return push({N::neg, 0, a});
    }
    if (eat('+')) return unary();
    return power();
  }
  int power() {
    int base = primary();
    if (eat('^')) {
      int e = unary();  // right associative
      return push({N::pow, 0, base, e});
    }
    return base;
  }
  int primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      int e = expr();
      if (!eat(')')) fail("missing ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      auto [p, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
      if (ec != std::errc()) fail("bad number");
      pos_ = static_cast<std::size_t>(p - s_.data());
      return push({N::num, v});
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      if (eat('(')) return call(id);
      for (std::size_t k = 0; k < vars_.size(); ++k)
        if (vars_[k] == id) return push({N::var, 0, -1, -1, static_cast<int>(k)});
      if (id == "pi") return push({N::num, std::numbers::pi});
      if (id == "e") return push({N::num, std::numbers::e});
      fail("unknown identifier '" + id + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }
  int call(const std::string& id) {
    static const char* one[] = {"sin", "cos", "tan", "exp", "log", "sqrt", "abs", "tanh"};
    static const char* two[] = {"min", "max", "pow", "atan2"};
    for (int k = 0; k < 8; ++k)
      if (id == one[k]) {
        int a = expr();
        if (!eat(')')) fail("missing ')' after argument of " + id);
        return push({N::fn1, 0, a, -1, k});
      }
    for (int k = 0; k < 4; ++k)
      if (id == two[k]) {
        int a = expr();
        if (!eat(',')) fail(id + " takes two arguments");
        int b = expr();
        if (!eat(')')) fail("missing ')' after arguments of " + id);
        return push({N::fn2, 0, a, b, k});
      }
    fail("unknown function '" + id + "'");
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
  std::vector<N> nodes_;
};

// nodes are in postfix order, so one forward pass with a value stack per node index works
double run(const std::vector<Expr::Node>& prog, std::span<const double> vars) {
  double stack_buf[64];
  std::vector<double> heap;
  double* val = stack_buf;
  if (prog.size() > 64) {
    heap.resize(prog.size());
    val = heap.data();
  }
  for (std::size_t i = 0; i < prog.size(); ++i) {
    const auto& n = prog[i];
    switch (n.op) {
      case Expr::Node::num: val[i] = n.value; break;
      case Expr::Node::var: val[i] = n.index < static_cast<int>(vars.size()) ? vars[n.index] : 0.0; break;
      case Expr::Node::add: val[i] = val[n.a] + val[n.b]; break;
      case Expr::Node::sub: val[i] = val[n.a] - val[n.b]; break;
      case Expr::Node::mul: val[i] = val[n.a] * val[n.b]; break;
      case Expr::Node::div: val[i] = val[n.a] / val[n.b]; break;
      case Expr::Node::pow: val[i] = std::pow(val[n.a], val[n.b]); break;
      case Expr::Node::neg: val[i] = -val[n.a]; break;
      case Expr::Node::fn1: {
        double a = val[n.a];
        switch (n.index) {
          case f_sin: val[i] = std::sin(a); break;
          case f_cos: val[i] = std::cos(a); break;
          case f_tan: val[i] = std::tan(a); break;
          case f_exp: val[i] = std::exp(a); break;
          case f_log: val[i] = std::log(a); break;
          case f_sqrt: val[i] = std::sqrt(a); break;
          case f_abs: val[i] = std::abs(a); break;
          default: val[i] = std::tanh(a); break;
        }
        break;
      }
      case Expr::Node::fn2: {
        double a = val[n.a], b = val[n.b];
        switch (n.index) {
          case f_min: val[i] = std::min(a, b); break;
          case f_max: val[i] = std::max(a, b); break;
          case f_pow: val[i] = std::pow(a, b); break;
          default: val[i] = std::atan2(a, b); break;
        }
        break;
      }
    }
  }
  return val[prog.size() - 1];
}

}  // namespace

Expr::Expr()
    : prog_(std::make_shared<const std::vector<Node>>(std::vector<Node>{{Node::num, 0.0}})), text_("0") {}

Expr Expr::constant(double v) {
  Expr e;
  e.prog_ = std::make_shared<const std::vector<Node>>(std::vector<Node>{{Node::num, v}});
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  e.text_.assign(buf, p);
  return e;
}

Expr Expr::parse(const std::string& text, const std::vector<std::string>& vars) {
  Expr e;
  e.prog_ = std::make_shared<const std::vector<Node>>(Parser(text, vars).run());
  e.text_ = text;
  e.arity_ = vars.size();
  // fold a pure constant so is_constant() sees it
  bool pure = true;
  for (const auto& n : *e.prog_)
    if (n.op == Node::var) pure = false;
  if (pure) {
    Expr c = constant(run(*e.prog_, {}));
    c.text_ = text;
    c.arity_ = vars.size();
    return c;
  }
  return e;
}

double Expr::eval(std::span<const double> vars) const { return run(*prog_, vars); }

bool Expr::is_constant() const { return prog_->size() == 1 && (*prog_)[0].op == Node::num; }

double Expr::constant_value() const { return (*prog_)[0].value; }

Expr Expr::plus(double c) const {
  if (c == 0.0) return *this;
  if (is_constant()) return constant(constant_value() + c);
  auto prog = *prog_;
  int root = static_cast<int>(prog.size()) - 1;
  prog.push_back({Node::num, c});
  prog.push_back({Node::add, 0, root, root + 1});
  Expr e;
  e.prog_ = std::make_shared<const std::vector<Node>>(std::move(prog));
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, c);
  e.text_ = "(" + text_ + ") + " + std::string(buf, p);
  e.arity_ = arity_;
  return e;
}

Expr Expr::negated() const {
  if (is_constant()) {
    Expr c = constant(-constant_value());
    c.arity_ = arity_;
    return c;
  }
  auto prog = *prog_;
  int root = static_cast<int>(prog.size()) - 1;
  prog.push_back({Node::neg, 0, root});
  Expr e;
  e.prog_ = std::make_shared<const std::vector<Node>>(std::move(prog));
  e.text_ = "-(" + text_ + ")";
  e.arity_ = arity_;
  return e;
}

}  // namespace hjn
