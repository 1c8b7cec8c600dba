#include "ddebound/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>
#include <utility>

#include "ddebound/format.hpp"

namespace ddebound {

struct Expr::Node {
  Kind kind = Kind::Constant;
  double value = 0.0;
  UnaryOp uop = UnaryOp::Neg;
  BinaryOp bop = BinaryOp::Add;
  Expr a{nullptr};
  Expr b{nullptr};
};

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable() {
  static const Expr var = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Variable;
    return Expr(std::move(n));
  }();
  return var;
}

Expr Expr::pi() {
  static const Expr p = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Pi;
    return Expr(std::move(n));
  }();
  return p;
}

Expr Expr::unary(UnaryOp op, Expr operand) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Unary;
  n->uop = op;
  n->a = std::move(operand);
  return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Binary;
  n->bop = op;
  n->a = std::move(lhs);
  n->b = std::move(rhs);
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::constant_value() const { return node_->value; }
UnaryOp Expr::unary_op() const { return node_->uop; }
BinaryOp Expr::binary_op() const { return node_->bop; }
const Expr& Expr::operand() const { return node_->a; }
const Expr& Expr::rhs() const { return node_->b; }

namespace {

const char* function_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::Sin: return "sin";
    case UnaryOp::Cos: return "cos";
    case UnaryOp::Exp: return "exp";
    case UnaryOp::Ln: return "ln";
    case UnaryOp::Abs: return "abs";
    case UnaryOp::Floor: return "floor";
    case UnaryOp::Neg: return "-";
  }
  return "?";
}

char operator_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return '+';
    case BinaryOp::Sub: return '-';
    case BinaryOp::Mul: return '*';
    case BinaryOp::Div: return '/';
    case BinaryOp::Pow: return '^';
  }
  return '?';
}

// Binding strength used by the printer; mirrors the parser levels.
int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return std::signbit(e.constant_value()) ? 3 : 5;
    case Expr::Kind::Variable:
    case Expr::Kind::Pi:
      return 5;
    case Expr::Kind::Unary:
      return e.unary_op() == UnaryOp::Neg ? 3 : 5;
    case Expr::Kind::Binary:
      switch (e.binary_op()) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return 1;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 2;
        case BinaryOp::Pow: return 4;
      }
  }
  return 0;
}

void print(const Expr& e, std::string& out);

void print_child(const Expr& child, bool parens, std::string& out) {
  if (parens) out += '(';
  print(child, out);
  if (parens) out += ')';
}

void print(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      out += format_number(e.constant_value());
      return;
    case Expr::Kind::Variable:
      out += 't';
      return;
    case Expr::Kind::Pi:
      out += "pi";
      return;
    case Expr::Kind::Unary:
      if (e.unary_op() == UnaryOp::Neg) {
        out += '-';
        // A bare literal after '-' would read back as a negative constant.
        print_child(e.operand(),
                    precedence(e.operand()) < 3 || e.operand().kind() == Expr::Kind::Constant, out);
      } else {
        out += function_name(e.unary_op());
        print_child(e.operand(), true, out);
      }
      return;
    case Expr::Kind::Binary: {
      const int p = precedence(e);
      if (e.binary_op() == BinaryOp::Pow) {
        print_child(e.operand(), precedence(e.operand()) < 5, out);
        out += '^';
        print_child(e.rhs(), precedence(e.rhs()) < 3, out);
      } else {
        print_child(e.operand(), precedence(e.operand()) < p, out);
        out += operator_symbol(e.binary_op());
        print_child(e.rhs(), precedence(e.rhs()) <= p, out);
      }
      return;
    }
  }
}

[[noreturn]] void domain_failure(const char* what, const Expr& subtree, double t) {
  throw DomainError(what, subtree.str(), t);
}

}  // namespace

double Expr::eval(double t) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Constant: return n.value;
    case Kind::Variable: return t;
    case Kind::Pi: return std::numbers::pi;
    case Kind::Unary: {
      const double x = n.a.eval(t);
      switch (n.uop) {
        case UnaryOp::Neg: return -x;
        case UnaryOp::Sin: return std::sin(x);
        case UnaryOp::Cos: return std::cos(x);
        case UnaryOp::Exp: return std::exp(x);
        case UnaryOp::Abs: return std::fabs(x);
        case UnaryOp::Floor: return std::floor(x);
        case UnaryOp::Ln:
          if (!(x > 0.0)) domain_failure("ln of a non-positive value", *this, t);
          return std::log(x);
      }
      break;
    }
    case Kind::Binary: {
      const double x = n.a.eval(t);
      const double y = n.b.eval(t);
      switch (n.bop) {
        case BinaryOp::Add: return x + y;
        case BinaryOp::Sub: return x - y;
        case BinaryOp::Mul: return x * y;
        case BinaryOp::Div:
          if (y == 0.0) domain_failure("division by zero", *this, t);
          return x / y;
        case BinaryOp::Pow: {
          const double r = std::pow(x, y);
          if (std::isnan(r) && !std::isnan(x) && !std::isnan(y))
            domain_failure("power has no real value", *this, t);
          return r;
        }
      }
      break;
    }
  }
  return 0.0;
}

std::string Expr::str() const {
  std::string out;
  print(*this, out);
  return out;
}

bool Expr::depends_on_time() const {
  switch (node_->kind) {
    case Kind::Variable: return true;
    case Kind::Constant:
    case Kind::Pi: return false;
    case Kind::Unary: return node_->a.depends_on_time();
    case Kind::Binary: return node_->a.depends_on_time() || node_->b.depends_on_time();
  }
  return false;
}

bool Expr::uses_trig() const {
  switch (node_->kind) {
    case Kind::Unary:
      return node_->uop == UnaryOp::Sin || node_->uop == UnaryOp::Cos ||
             node_->a.uses_trig();
    case Kind::Binary: return node_->a.uses_trig() || node_->b.uses_trig();
    default: return false;
  }
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Expr::Kind::Constant:
      return std::memcmp(&x.value, &y.value, sizeof(double)) == 0;
    case Expr::Kind::Variable:
    case Expr::Kind::Pi: return true;
    case Expr::Kind::Unary: return x.uop == y.uop && x.a == y.a;
    case Expr::Kind::Binary: return x.bop == y.bop && x.a == y.a && x.b == y.b;
  }
  return false;
}

ParseError::ParseError(const std::string& message, std::size_t offset,
                       std::vector<std::string> expected)
    : std::runtime_error(message), offset_(offset), expected_(std::move(expected)) {}

UnknownIdentifierError::UnknownIdentifierError(std::string identifier, std::size_t offset)
    : ParseError("unknown identifier '" + identifier + "' at offset " +
                     std::to_string(offset),
                 offset, {"t", "pi", "sin", "cos", "exp", "ln", "abs", "floor"}),
      identifier_(std::move(identifier)) {}

DomainError::DomainError(const std::string& what, std::string subtree, double t)
    : std::runtime_error(what + " in '" + subtree + "' at t=" + format_number(t)),
      subtree_(std::move(subtree)),
      t_(t) {}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_space();
    if (pos_ != src_.size()) fail({"+", "-", "*", "/", "^", "end of input"});
    return e;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) {
    std::ostringstream msg;
    msg << "syntax error at offset " << pos_;
    if (pos_ < src_.size())
      msg << " near '" << src_.substr(pos_, 8) << "'";
    else
      msg << " (end of input)";
    msg << ", expected one of:";
    for (const auto& e : expected) msg << ' ' << e;
    throw ParseError(msg.str(), pos_, std::move(expected));
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+'))
        lhs = Expr::binary(BinaryOp::Add, lhs, parse_term());
      else if (accept('-'))
        lhs = Expr::binary(BinaryOp::Sub, lhs, parse_term());
      else
        return lhs;
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*'))
        lhs = Expr::binary(BinaryOp::Mul, lhs, parse_unary());
      else if (accept('/'))
        lhs = Expr::binary(BinaryOp::Div, lhs, parse_unary());
      else
        return lhs;
    }
  }

  // A minus sign directly before a literal folds into a negative constant
  // unless the literal is the base of a power, keeping -2^2 == -(2^2).
  Expr parse_unary() {
    if (!accept('-')) return parse_power();
    skip_space();
    if (pos_ < src_.size() &&
        (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
      const Expr literal = parse_number();
      if (accept('^')) return Expr::unary(UnaryOp::Neg, Expr::binary(BinaryOp::Pow, literal, parse_unary()));
      return Expr::constant(-literal.constant_value());
    }
    return Expr::unary(UnaryOp::Neg, parse_unary());
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (accept('^')) return Expr::binary(BinaryOp::Pow, base, parse_unary());
    return base;
  }

  Expr parse_atom() {
    skip_space();
    if (pos_ >= src_.size()) fail({"number", "t", "pi", "function", "(", "-"});
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    if (accept('(')) {
      Expr inner = parse_expr();
      if (!accept(')')) fail({")"});
      return inner;
    }
    fail({"number", "t", "pi", "function", "(", "-"});
  }

  Expr parse_number() {
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
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        digits();
      }
    }
    double value = 0.0;
    auto res = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != src_.data() + pos_) {
      pos_ = start;
      fail({"number"});
    }
    return Expr::constant(value);
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    if (name == "t") return Expr::variable();
    if (name == "pi") return Expr::pi();

    static constexpr std::pair<std::string_view, UnaryOp> kFunctions[] = {
        {"sin", UnaryOp::Sin}, {"cos", UnaryOp::Cos},   {"exp", UnaryOp::Exp},
        {"ln", UnaryOp::Ln},   {"abs", UnaryOp::Abs},   {"floor", UnaryOp::Floor},
    };
    for (const auto& [fname, op] : kFunctions) {
      if (name == fname) {
        if (!accept('(')) fail({"("});
        Expr arg = parse_expr();
        if (!accept(')')) fail({")"});
        return Expr::unary(op, arg);
      }
    }
    throw UnknownIdentifierError(std::string(name), start);
  }
};

}  // namespace

Expr parse(std::string_view source) { return Parser(source).parse_all(); }

double parse_constant(std::string_view source) {
  Expr e = parse(source);
  if (e.depends_on_time())
    throw ParseError("expected a constant expression, got '" + std::string(source) + "'", 0,
                     {"constant"});
  return e.eval(0.0);
}

}  // namespace ddebound
