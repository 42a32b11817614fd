#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace matsg {

// Parsed expression in one variable x. Grammar:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary | power)*   (juxtaposition multiplies: 2x)
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | 'x' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//   func    := exp | sqrt | abs | log
class Expression {
 public:
  static Expression parse(const std::string& text);
  double operator()(double x) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

// Bound f of the growth assumption ||g(x)|| <= f(x). Either a closed form or a
// table of (x, f(x)) pairs, linearly interpolated.
class BoundFunction {
 public:
  static BoundFunction from_expression(const std::string& text);
  static BoundFunction from_table(std::vector<std::pair<double, double>> table);
  // Identity bound f == 1.
  static BoundFunction unit();

  double operator()(double x) const;
  const std::string& text() const { return text_; }
  bool tabulated() const { return !table_.empty(); }
  const std::vector<std::pair<double, double>>& table() const { return table_; }

  // Flags checked numerically: f(0) = 1, f finite on [0, upto], f(h) -> 1 as h -> 0+.
  bool one_at_zero() const;
  bool locally_bounded(double upto) const;
  bool right_continuous_at_zero() const;

 private:
  std::string text_;
  std::function<double(double)> eval_;
  std::vector<std::pair<double, double>> table_;
};

}  // namespace matsg
