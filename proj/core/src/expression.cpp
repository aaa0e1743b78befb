#include "oswr/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <utility>

#include "oswr/error.hpp"

namespace oswr {

enum class Op { number, variable, add, sub, mul, div, pow, neg, func };
enum class Func { sin, cos, sqrt, exp, abs, log, sign };

struct Expression::Node {
  Op op = Op::number;
  double value = 0.0;
  Variable var = Variable::x;
  Func func = Func::sin;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make_number(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::number;
  n->value = v;
  return n;
}

NodePtr make_variable(Variable v) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::variable;
  n->var = v;
  return n;
}

NodePtr make_func(Func f, NodePtr arg) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::func;
  n->func = f;
  n->lhs = std::move(arg);
  return n;
}

NodePtr make_raw(Op op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

bool is_number(const NodePtr &n, double v) {
  return n->op == Op::number && n->value == v;
}

bool is_number(const NodePtr &n) { return n->op == Op::number; }

// Builders used by differentiation and the arithmetic operators. They fold
// the trivial identities so derivative trees stay small.
NodePtr add(NodePtr a, NodePtr b) {
  if (is_number(a, 0.0)) return b;
  if (is_number(b, 0.0)) return a;
  if (is_number(a) && is_number(b)) return make_number(a->value + b->value);
  return make_raw(Op::add, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_number(b, 0.0)) return a;
  if (is_number(a) && is_number(b)) return make_number(a->value - b->value);
  if (is_number(a, 0.0)) {
    return make_raw(Op::neg, std::move(b), nullptr);
  }
  return make_raw(Op::sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (is_number(a, 0.0) || is_number(b, 0.0)) return make_number(0.0);
  if (is_number(a, 1.0)) return b;
  if (is_number(b, 1.0)) return a;
  if (is_number(a) && is_number(b)) return make_number(a->value * b->value);
  return make_raw(Op::mul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
  if (is_number(a, 0.0)) return make_number(0.0);
  if (is_number(b, 1.0)) return a;
  return make_raw(Op::div, std::move(a), std::move(b));
}

NodePtr neg(NodePtr a) {
  if (is_number(a)) return make_number(-a->value);
  return make_raw(Op::neg, std::move(a), nullptr);
}

NodePtr pow_node(NodePtr a, NodePtr b) {
  if (is_number(b, 1.0)) return a;
  if (is_number(b, 0.0)) return make_number(1.0);
  return make_raw(Op::pow, std::move(a), std::move(b));
}

const char *func_name(Func f) {
  switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::sqrt: return "sqrt";
    case Func::exp: return "exp";
    case Func::abs: return "abs";
    case Func::log: return "log";
    case Func::sign: return "sign";
  }
  return "?";
}

std::string point_string(const Point &p) {
  std::ostringstream os;
  os.precision(17);
  os << "(x=" << p.x << ", y=" << p.y << ", t=" << p.t << ")";
  return os.str();
}

double eval(const Expression::Node &n, const Point &p) {
  switch (n.op) {
    case Op::number:
      return n.value;
    case Op::variable:
      return n.var == Variable::x ? p.x : (n.var == Variable::y ? p.y : p.t);
    case Op::add:
      return eval(*n.lhs, p) + eval(*n.rhs, p);
    case Op::sub:
      return eval(*n.lhs, p) - eval(*n.rhs, p);
    case Op::mul:
      return eval(*n.lhs, p) * eval(*n.rhs, p);
    case Op::div: {
      const double num = eval(*n.lhs, p);
      const double den = eval(*n.rhs, p);
      if (den == 0.0) {
        throw DomainError("division by zero at " + point_string(p));
      }
      return num / den;
    }
    case Op::pow: {
      const double base = eval(*n.lhs, p);
      const double expo = eval(*n.rhs, p);
      if (base < 0.0 && expo != std::floor(expo)) {
        throw DomainError("negative base with non-integer exponent at " +
                          point_string(p));
      }
      if (base == 0.0 && expo < 0.0) {
        throw DomainError("zero raised to a negative power at " +
                          point_string(p));
      }
      return std::pow(base, expo);
    }
    case Op::neg:
      return -eval(*n.lhs, p);
    case Op::func: {
      const double a = eval(*n.lhs, p);
      switch (n.func) {
        case Func::sin: return std::sin(a);
        case Func::cos: return std::cos(a);
        case Func::sqrt:
          if (a < 0.0) {
            throw DomainError("sqrt of negative value at " + point_string(p));
          }
          return std::sqrt(a);
        case Func::exp: return std::exp(a);
        case Func::abs: return std::abs(a);
        case Func::log:
          if (a <= 0.0) {
            throw DomainError("log of non-positive value at " +
                              point_string(p));
          }
          return std::log(a);
        case Func::sign: return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
      }
    }
  }
  return 0.0;
}

NodePtr differentiate(const NodePtr &n, Variable v) {
  switch (n->op) {
    case Op::number:
      return make_number(0.0);
    case Op::variable:
      return make_number(n->var == v ? 1.0 : 0.0);
    case Op::add:
      return add(differentiate(n->lhs, v), differentiate(n->rhs, v));
    case Op::sub:
      return sub(differentiate(n->lhs, v), differentiate(n->rhs, v));
    case Op::mul:
      return add(mul(differentiate(n->lhs, v), n->rhs),
                 mul(n->lhs, differentiate(n->rhs, v)));
    case Op::div: {
      auto da = differentiate(n->lhs, v);
      auto db = differentiate(n->rhs, v);
      if (is_number(db, 0.0)) return div(da, n->rhs);
      return div(sub(mul(da, n->rhs), mul(n->lhs, db)),
                 mul(n->rhs, n->rhs));
    }
    case Op::neg:
      return neg(differentiate(n->lhs, v));
    case Op::pow: {
      auto da = differentiate(n->lhs, v);
      auto db = differentiate(n->rhs, v);
      if (is_number(db, 0.0)) {
        // d(a^c) = c a^(c-1) a'
        if (is_number(n->rhs)) {
          return mul(mul(n->rhs, pow_node(n->lhs, make_number(n->rhs->value - 1.0))),
                     da);
        }
        return mul(mul(n->rhs, pow_node(n->lhs, sub(n->rhs, make_number(1.0)))),
                   da);
      }
      // d(a^b) = a^b (b' log a + b a'/a)
      return mul(n, add(mul(db, make_func(Func::log, n->lhs)),
                        div(mul(n->rhs, da), n->lhs)));
    }
    case Op::func: {
      const NodePtr &a = n->lhs;
      auto da = differentiate(a, v);
      if (is_number(da, 0.0)) return make_number(0.0);
      switch (n->func) {
        case Func::sin: return mul(make_func(Func::cos, a), da);
        case Func::cos: return neg(mul(make_func(Func::sin, a), da));
        case Func::sqrt:
          return div(da, mul(make_number(2.0), make_func(Func::sqrt, a)));
        case Func::exp: return mul(make_func(Func::exp, a), da);
        case Func::abs: return mul(make_func(Func::sign, a), da);
        case Func::log: return div(da, a);
        case Func::sign: return make_number(0.0);
      }
    }
  }
  return make_number(0.0);
}

bool depends(const Expression::Node &n, Variable v) {
  switch (n.op) {
    case Op::number: return false;
    case Op::variable: return n.var == v;
    case Op::neg:
    case Op::func: return depends(*n.lhs, v);
    default: return depends(*n.lhs, v) || depends(*n.rhs, v);
  }
}

bool equal(const Expression::Node &a, const Expression::Node &b) {
  if (a.op != b.op) return false;
  switch (a.op) {
    case Op::number: return a.value == b.value;
    case Op::variable: return a.var == b.var;
    case Op::neg: return equal(*a.lhs, *b.lhs);
    case Op::func: return a.func == b.func && equal(*a.lhs, *b.lhs);
    default: return equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
  }
}

std::string number_string(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, end);
  if (v < 0.0) return "(" + s + ")";
  return s;
}

void print(const Expression::Node &n, std::string &out) {
  switch (n.op) {
    case Op::number:
      out += number_string(n.value);
      return;
    case Op::variable:
      out += n.var == Variable::x ? "x" : (n.var == Variable::y ? "y" : "t");
      return;
    case Op::neg:
      out += "(-";
      print(*n.lhs, out);
      out += ")";
      return;
    case Op::func:
      out += func_name(n.func);
      out += "(";
      print(*n.lhs, out);
      out += ")";
      return;
    default: {
      const char *sym = n.op == Op::add   ? "+"
                        : n.op == Op::sub ? "-"
                        : n.op == Op::mul ? "*"
                        : n.op == Op::div ? "/"
                                          : "^";
      out += "(";
      print(*n.lhs, out);
      out += sym;
      print(*n.rhs, out);
      out += ")";
      return;
    }
  }
}

// Recursive-descent parser. Positions are reported 1-based within the text.
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    auto n = sum();
    skip_space();
    if (pos_ < text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string &msg) const {
    throw ParseError(msg, 0, static_cast<int>(pos_) + 1);
  }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr sum() {
    auto lhs = product();
    for (;;) {
      if (accept('+')) {
        lhs = make_raw(Op::add, lhs, product());
      } else if (accept('-')) {
        lhs = make_raw(Op::sub, lhs, product());
      } else {
        return lhs;
      }
    }
  }

  NodePtr product() {
    auto lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_raw(Op::mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make_raw(Op::div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      auto operand = unary();
      // A negated literal is stored as a negative literal so that printed
      // trees parse back identically.
      if (operand->op == Op::number) return make_number(-operand->value);
      return make_raw(Op::neg, operand, nullptr);
    }
    return power();
  }

  NodePtr power() {
    auto base = atom();
    if (accept('^')) return make_raw(Op::pow, base, unary());
    return base;
  }

  NodePtr atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = sum();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isalnum(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      }
      const std::string_view name = text_.substr(start, pos_ - start);
      if (name == "x") return make_variable(Variable::x);
      if (name == "y") return make_variable(Variable::y);
      if (name == "t") return make_variable(Variable::t);
      Func f;
      if (name == "sin") {
        f = Func::sin;
      } else if (name == "cos") {
        f = Func::cos;
      } else if (name == "sqrt") {
        f = Func::sqrt;
      } else if (name == "exp") {
        f = Func::exp;
      } else if (name == "abs") {
        f = Func::abs;
      } else {
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
      }
      if (!accept('(')) fail("expected '(' after function name");
      auto arg = sum();
      if (!accept(')')) fail("expected ')'");
      return make_func(f, arg);
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
        digits();
      } else {
        pos_ = save;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return make_number(v);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression() : root_(make_number(0.0)) {}

Expression::Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

Expression Expression::parse(std::string_view text) {
  return Expression(Parser(text).parse());
}

Expression Expression::constant(double value) {
  return Expression(make_number(value));
}

Expression Expression::variable(Variable v) {
  return Expression(make_variable(v));
}

double Expression::operator()(const Point &p) const { return eval(*root_, p); }

Expression Expression::derivative(Variable v) const {
  return Expression(differentiate(root_, v));
}

bool Expression::is_constant() const {
  return !depends_on(Variable::x) && !depends_on(Variable::y) &&
         !depends_on(Variable::t);
}

bool Expression::depends_on(Variable v) const { return depends(*root_, v); }

std::string Expression::to_string() const {
  std::string out;
  print(*root_, out);
  return out;
}

Expression operator+(const Expression &a, const Expression &b) {
  return Expression(add(a.root_, b.root_));
}
Expression operator-(const Expression &a, const Expression &b) {
  return Expression(sub(a.root_, b.root_));
}
Expression operator*(const Expression &a, const Expression &b) {
  return Expression(mul(a.root_, b.root_));
}
Expression operator/(const Expression &a, const Expression &b) {
  return Expression(div(a.root_, b.root_));
}
Expression operator-(const Expression &a) { return Expression(neg(a.root_)); }

bool operator==(const Expression &a, const Expression &b) {
  return equal(*a.root_, *b.root_);
}

}  // namespace oswr
