#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wacs {

/// Error raised while parsing an expression string. `position` is the
/// 0-based offset into the input where the problem was detected.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string msg, std::size_t position)
      : std::runtime_error(std::move(msg)), position(position) {}
  std::size_t position;
};

/// Error raised when evaluation leaves the mathematical domain
/// (log of a non-positive value, sqrt of a negative value, division by
/// zero, fractional power of a negative base).
class DomainError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Error raised when a coordinate or parameter has no bound value.
class UnboundSymbolError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExprOp : std::uint8_t {
  Const,
  Coord,
  Param,
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Pow,  // exponent is a real constant, stored in `value`
  Exp,
  Log,
  Sin,
  Cos,
  Sqrt,
};

class Expr;

/// One immutable node of an expression DAG. Subtrees are shared, never
/// copied; identical pointers make per-point evaluation memoizable.
class ExprNode {
 public:
  ExprOp op;
  double value = 0.0;    // Const: the constant; Pow: the exponent
  std::string name;      // Coord / Param: symbol name
  std::shared_ptr<const ExprNode> a;  // first child
  std::shared_ptr<const ExprNode> b;  // second child (binary ops)
};

using ExprPtr = std::shared_ptr<const ExprNode>;

/// Scalar symbolic expression over named coordinates and parameters.
/// Values are immutable; all algebra goes through the free functions
/// and operators below, which apply constant folding and the identity
/// eliminations x+0, x*1, x*0.
class Expr {
 public:
  /// Default-constructs the constant 0.
  Expr();

  static Expr constant(double v);
  static Expr coordinate(std::string name);
  static Expr parameter(std::string name);

  bool is_constant() const;
  /// Value of a constant node; throws std::logic_error otherwise.
  double constant_value() const;

  const ExprNode& node() const { return *node_; }
  const ExprPtr& ptr() const { return node_; }

  explicit Expr(ExprPtr p) : node_(std::move(p)) {}

 private:
  ExprPtr node_;
};

Expr operator+(const Expr& x, const Expr& y);
Expr operator-(const Expr& x, const Expr& y);
Expr operator*(const Expr& x, const Expr& y);
Expr operator/(const Expr& x, const Expr& y);
Expr operator-(const Expr& x);

Expr pow(const Expr& base, double exponent);
Expr exp(const Expr& x);
Expr log(const Expr& x);
Expr sin(const Expr& x);
Expr cos(const Expr& x);
Expr sqrt(const Expr& x);

/// Exact partial derivative with respect to a coordinate name.
/// Parameters and other coordinates differentiate to zero.
Expr diff(const Expr& e, std::string_view coord);

/// Renders the expression in the grammar accepted by parse_expr, so
/// that parse_expr(to_string(e)) reproduces an evaluation-equal tree.
std::string to_string(const Expr& e);

/// Node-by-node tree equality (same ops, names, constants).
bool structurally_equal(const Expr& x, const Expr& y);

/// True if any Coord node with this name appears in the expression.
bool depends_on(const Expr& e, std::string_view coord);

/// A point of a chart: coordinate name -> value.
struct Point {
  std::map<std::string, double> values;

  double at(const std::string& name) const;
};

using ParamMap = std::map<std::string, double>;

/// Evaluates expressions at one fixed point with one shared memo table,
/// so DAG nodes reused across many tensor components are computed once.
/// Not thread-safe; use one Evaluator per thread.
class Evaluator {
 public:
  explicit Evaluator(const Point& point, const ParamMap& params = {});

  double value(const Expr& e);

 private:
  double visit(const ExprNode* n);

  Point point_;
  ParamMap params_;
  std::unordered_map<const ExprNode*, double> memo_;
};

/// One-shot evaluation convenience.
double eval(const Expr& e, const Point& p, const ParamMap& params = {});

/// Parses the documented grammar:
///   identifiers  [a-zA-Z][a-zA-Z0-9_]*
///   literals     digits, optional fraction, optional e/E exponent
///   operators    + - * / ^   (with ^ binding tighter than *, right-assoc)
///   functions    exp log sin cos sqrt
///   parentheses
/// Exponents of ^ must fold to a constant. Identifiers must appear in
/// `coords` or `params`; anything else is an error with its position.
Expr parse_expr(std::string_view text, const std::vector<std::string>& coords,
                const std::vector<std::string>& params = {});

}  // namespace wacs
