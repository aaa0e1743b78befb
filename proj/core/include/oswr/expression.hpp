#ifndef OSWR_EXPRESSION_HPP_
#define OSWR_EXPRESSION_HPP_

#include <memory>
#include <string>
#include <string_view>

namespace oswr {

/// Evaluation point. Unused coordinates are ignored by the expression.
struct Point {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
};

enum class Variable { x, y, t };

/// Immutable arithmetic expression tree over the variables x, y, t.
///
/// Grammar (precedence low to high):
///   sum     := product (('+' | '-') product)*
///   product := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := atom ('^' unary)?          (right associative)
///   atom    := number | x | y | t | func '(' sum ')' | '(' sum ')'
///   func    := sin | cos | sqrt | exp | abs
///
/// Copies share the tree; evaluation is pure and thread-safe.
class Expression {
 public:
  struct Node;

  /// The constant zero.
  Expression();

  static Expression parse(std::string_view text);
  static Expression constant(double value);
  static Expression variable(Variable v);

  /// Throws DomainError (with the offending point) on sqrt of a negative
  /// number, division by zero and similar.
  double operator()(const Point &p) const;
  double operator()(double x, double y = 0.0, double t = 0.0) const {
    return (*this)(Point{x, y, t});
  }

  /// Symbolic partial derivative, lightly simplified.
  Expression derivative(Variable v) const;

  bool is_constant() const;
  bool depends_on(Variable v) const;

  /// Fully parenthesised text that parses back to the same tree.
  std::string to_string() const;

  friend Expression operator+(const Expression &a, const Expression &b);
  friend Expression operator-(const Expression &a, const Expression &b);
  friend Expression operator*(const Expression &a, const Expression &b);
  friend Expression operator/(const Expression &a, const Expression &b);
  friend Expression operator-(const Expression &a);

  friend bool operator==(const Expression &a, const Expression &b);

 private:
  explicit Expression(std::shared_ptr<const Node> root);
  std::shared_ptr<const Node> root_;
};

}  // namespace oswr

#endif  // OSWR_EXPRESSION_HPP_
