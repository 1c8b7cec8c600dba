#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ddebound {

enum class UnaryOp { Neg, Sin, Cos, Exp, Ln, Abs, Floor };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

/// Immutable expression tree for a real function of time `t`.
///
/// Nodes are shared between copies, so an Expr is cheap to copy and safe to
/// evaluate concurrently.
class Expr {
 public:
  enum class Kind { Constant, Variable, Pi, Unary, Binary };

  /// The constant 0.
  Expr();

  static Expr constant(double value);
  static Expr variable();
  static Expr pi();
  static Expr unary(UnaryOp op, Expr operand);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);

  Kind kind() const;
  double constant_value() const;  // only for Kind::Constant
  UnaryOp unary_op() const;       // only for Kind::Unary
  BinaryOp binary_op() const;     // only for Kind::Binary
  const Expr& operand() const;    // first child of Unary/Binary
  const Expr& rhs() const;        // second child of Binary

  /// Throws DomainError on division by zero, ln of a non-positive value, or a
  /// power without a real result.
  double eval(double t) const;

  /// Text that parses back to a structurally identical tree, using the
  /// minimum number of parentheses.
  std::string str() const;

  bool depends_on_time() const;
  bool uses_trig() const;

  /// Structural equality, constants compared bitwise.
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t offset,
             std::vector<std::string> expected);
  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class UnknownIdentifierError : public ParseError {
 public:
  UnknownIdentifierError(std::string identifier, std::size_t offset);
  const std::string& identifier() const { return identifier_; }

 private:
  std::string identifier_;
};

class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& what, std::string subtree, double t);
  const std::string& subtree() const { return subtree_; }
  double t() const { return t_; }

 private:
  std::string subtree_;
  double t_;
};

/// Parses the expression grammar
///
///   expr   := term (('+'|'-') term)*
///   term   := unary (('*'|'/') unary)*
///   unary  := '-' unary | power
///   power  := atom ('^' unary)?
///   atom   := number | 't' | 'pi' | func '(' expr ')' | '(' expr ')'
///   func   := 'sin' | 'cos' | 'exp' | 'ln' | 'abs' | 'floor'
///
/// so `^` binds tighter than unary minus (-2^2 == -4) and is right
/// associative. A minus directly before a literal that is not a power base
/// produces a negative constant rather than a negation node.
Expr parse(std::string_view source);

/// Parses and evaluates an expression that must not depend on `t`.
double parse_constant(std::string_view source);

}  // namespace ddebound
