#include "matsg/bound.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "matsg/error.hpp"

namespace matsg {

struct Expression::Node {
  enum Kind { number, variable, add, sub, mul, div, pow, neg, call } kind;
  double value = 0;
  std::string func;
  std::shared_ptr<const Node> a, b;

  double eval(double x) const {
    switch (kind) {
      case number: return value;
      case variable: return x;
      case add: return a->eval(x) + b->eval(x);
      case sub: return a->eval(x) - b->eval(x);
      case mul: return a->eval(x) * b->eval(x);
      case div: return a->eval(x) / b->eval(x);
      case pow: return std::pow(a->eval(x), b->eval(x));
      case neg: return -a->eval(x);
      case call: {
        double v = a->eval(x);
        if (func == "exp") return std::exp(v);
        if (func == "sqrt") return std::sqrt(v);
        if (func == "abs") return std::fabs(v);
        return std::log(v);
      }
    }
    return 0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("bound expression '" + s_ + "' at column " + std::to_string(pos_ + 1) + ": " +
                     why);
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
  static NodePtr make(Expression::Node::Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }
  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (eat('+')) n = make(Expression::Node::add, n, term());
      else if (eat('-')) n = make(Expression::Node::sub, n, term());
      else return n;
    }
  }
  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (eat('*')) n = make(Expression::Node::mul, n, unary());
      else if (eat('/')) n = make(Expression::Node::div, n, unary());
      else if (juxtaposed()) n = make(Expression::Node::mul, n, power());
      else return n;
    }
  }
  // "2x", "3(x+1)", "2 exp(x)": a name or '(' right after an operand.
  bool juxtaposed() {
    skip();
    if (pos_ >= s_.size()) return false;
    char c = s_[pos_];
    return c == '(' || std::isalpha(static_cast<unsigned char>(c));
  }
  NodePtr unary() {
    if (eat('-')) return make(Expression::Node::neg, unary());
    if (eat('+')) return unary();
    return power();
  }
  NodePtr power() {
    NodePtr n = primary();
    if (eat('^')) n = make(Expression::Node::pow, n, unary());
    return n;
  }
  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (eat('(')) {
      NodePtr n = expr();
      if (!eat(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      double v = 0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      auto n = std::make_shared<Expression::Node>();
      n->kind = Expression::Node::number;
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string word = s_.substr(start, pos_ - start);
      auto n = std::make_shared<Expression::Node>();
      if (word == "x") {
        n->kind = Expression::Node::variable;
        return n;
      }
      if (word == "pi" || word == "e") {
        n->kind = Expression::Node::number;
        n->value = word == "pi" ? M_PI : M_E;
        return n;
      }
      if (word == "exp" || word == "sqrt" || word == "abs" || word == "log") {
        if (!eat('(')) fail("expected '(' after " + word);
        n->kind = Expression::Node::call;
        n->func = word;
        n->a = expr();
        if (!eat(')')) fail("expected ')'");
        return n;
      }
      pos_ = start;
      fail("unknown name '" + word + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.text_ = text;
  e.root_ = Parser(e.text_).parse();
  return e;
}

double Expression::operator()(double x) const { return root_->eval(x); }

BoundFunction BoundFunction::from_expression(const std::string& text) {
  BoundFunction f;
  Expression e = Expression::parse(text);
  f.text_ = text;
  f.eval_ = [e](double x) { return e(x); };
  return f;
}

BoundFunction BoundFunction::from_table(std::vector<std::pair<double, double>> table) {
  if (table.empty()) throw DomainError("empty bound table");
  std::sort(table.begin(), table.end());
  for (size_t i = 1; i < table.size(); ++i)
    if (table[i].first == table[i - 1].first) throw DomainError("duplicate abscissa in bound table");
  BoundFunction f;
  f.text_ = "table";
  f.table_ = std::move(table);
  const auto& t = f.table_;
  f.eval_ = [t](double x) {
    if (x < t.front().first || x > t.back().first) return std::numeric_limits<double>::infinity();
    auto it = std::lower_bound(t.begin(), t.end(), std::make_pair(x, -std::numeric_limits<double>::infinity()));
    if (it->first == x) return it->second;
    auto lo = it - 1;
    double w = (x - lo->first) / (it->first - lo->first);
    return lo->second + w * (it->second - lo->second);
  };
  return f;
}

BoundFunction BoundFunction::unit() { return from_expression("1"); }

double BoundFunction::operator()(double x) const { return eval_(x); }

bool BoundFunction::one_at_zero() const { return std::fabs(eval_(0.0) - 1.0) <= 1e-12; }

bool BoundFunction::locally_bounded(double upto) const {
  for (int k = 0; k <= 256; ++k) {
    double v = eval_(upto * k / 256.0);
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool BoundFunction::right_continuous_at_zero() const {
  double f0 = eval_(0.0);
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 3; k <= 12; ++k) {
    double gap = std::fabs(eval_(std::pow(10.0, -k)) - f0);
    if (!std::isfinite(gap)) return false;
    prev = gap;
  }
  return prev <= 1e-6;
}

}  // namespace matsg
