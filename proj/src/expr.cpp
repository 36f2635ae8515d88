#include "wacs/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <unordered_set>
#include <utility>

namespace wacs {

namespace {

ExprPtr make_node(ExprOp op, double value, std::string name, ExprPtr a,
                  ExprPtr b) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->value = value;
  n->name = std::move(name);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

ExprPtr make_const(double v) { return make_node(ExprOp::Const, v, {}, nullptr, nullptr); }

bool is_const(const ExprPtr& p, double v) {
  return p->op == ExprOp::Const && p->value == v;
}

bool is_const(const ExprPtr& p) { return p->op == ExprOp::Const; }

}  // namespace

Expr::Expr() : node_(make_const(0.0)) {}

Expr Expr::constant(double v) { return Expr(make_const(v)); }

Expr Expr::coordinate(std::string name) {
  return Expr(make_node(ExprOp::Coord, 0.0, std::move(name), nullptr, nullptr));
}

Expr Expr::parameter(std::string name) {
  return Expr(make_node(ExprOp::Param, 0.0, std::move(name), nullptr, nullptr));
}

bool Expr::is_constant() const { return node_->op == ExprOp::Const; }

double Expr::constant_value() const {
  if (!is_constant()) throw std::logic_error("constant_value on non-constant expression");
  return node_->value;
}

// Folding below only replaces a node when the folded value is finite,
// so overflow and domain problems stay visible to the evaluator.

Expr operator+(const Expr& x, const Expr& y) {
  const ExprPtr& a = x.ptr();
  const ExprPtr& b = y.ptr();
  if (is_const(a) && is_const(b)) {
    double v = a->value + b->value;
    if (std::isfinite(v)) return Expr::constant(v);
  }
  if (is_const(a, 0.0)) return y;
  if (is_const(b, 0.0)) return x;
  return Expr(make_node(ExprOp::Add, 0.0, {}, a, b));
}

Expr operator-(const Expr& x, const Expr& y) {
  const ExprPtr& a = x.ptr();
  const ExprPtr& b = y.ptr();
  if (is_const(a) && is_const(b)) {
    double v = a->value - b->value;
    if (std::isfinite(v)) return Expr::constant(v);
  }
  if (is_const(b, 0.0)) return x;
  if (is_const(a, 0.0)) return -y;
  return Expr(make_node(ExprOp::Sub, 0.0, {}, a, b));
}

Expr operator*(const Expr& x, const Expr& y) {
  const ExprPtr& a = x.ptr();
  const ExprPtr& b = y.ptr();
  if (is_const(a) && is_const(b)) {
    double v = a->value * b->value;
    if (std::isfinite(v)) return Expr::constant(v);
  }
  if (is_const(a, 0.0) || is_const(b, 0.0)) return Expr::constant(0.0);
  if (is_const(a, 1.0)) return y;
  if (is_const(b, 1.0)) return x;
  return Expr(make_node(ExprOp::Mul, 0.0, {}, a, b));
}

Expr operator/(const Expr& x, const Expr& y) {
  const ExprPtr& a = x.ptr();
  const ExprPtr& b = y.ptr();
  if (is_const(a) && is_const(b) && b->value != 0.0) {
    double v = a->value / b->value;
    if (std::isfinite(v)) return Expr::constant(v);
  }
  if (is_const(b, 1.0)) return x;
  if (is_const(a, 0.0) && !is_const(b, 0.0)) return Expr::constant(0.0);
  return Expr(make_node(ExprOp::Div, 0.0, {}, a, b));
}

Expr operator-(const Expr& x) {
  const ExprPtr& a = x.ptr();
  if (is_const(a)) return Expr::constant(-a->value);
  if (a->op == ExprOp::Neg) return Expr(a->a);
  return Expr(make_node(ExprOp::Neg, 0.0, {}, a, nullptr));
}

Expr pow(const Expr& base, double exponent) {
  const ExprPtr& a = base.ptr();
  if (exponent == 0.0) return Expr::constant(1.0);
  if (exponent == 1.0) return base;
  if (is_const(a)) {
    double v = std::pow(a->value, exponent);
    if (std::isfinite(v)) return Expr::constant(v);
  }
  return Expr(make_node(ExprOp::Pow, exponent, {}, a, nullptr));
}

namespace {

Expr fold_unary(ExprOp op, const Expr& x, double (*fn)(double)) {
  const ExprPtr& a = x.ptr();
  if (is_const(a)) {
    double v = fn(a->value);
    if (std::isfinite(v)) return Expr::constant(v);
  }
  return Expr(make_node(op, 0.0, {}, a, nullptr));
}

}  // namespace

Expr exp(const Expr& x) { return fold_unary(ExprOp::Exp, x, std::exp); }
Expr log(const Expr& x) { return fold_unary(ExprOp::Log, x, std::log); }
Expr sin(const Expr& x) { return fold_unary(ExprOp::Sin, x, std::sin); }
Expr cos(const Expr& x) { return fold_unary(ExprOp::Cos, x, std::cos); }
Expr sqrt(const Expr& x) { return fold_unary(ExprOp::Sqrt, x, std::sqrt); }

// ---------------------------------------------------------------------------
// differentiation

namespace {

class Differ {
 public:
  explicit Differ(std::string_view coord) : coord_(coord) {}

  Expr d(const ExprPtr& n) {
    auto it = memo_.find(n.get());
    if (it != memo_.end()) return Expr(it->second);
    Expr r = compute(n);
    memo_.emplace(n.get(), r.ptr());
    return r;
  }

 private:
  Expr compute(const ExprPtr& n) {
    switch (n->op) {
      case ExprOp::Const:
      case ExprOp::Param:
        return Expr::constant(0.0);
      case ExprOp::Coord:
        return Expr::constant(n->name == coord_ ? 1.0 : 0.0);
      case ExprOp::Neg:
        return -d(n->a);
      case ExprOp::Add:
        return d(n->a) + d(n->b);
      case ExprOp::Sub:
        return d(n->a) - d(n->b);
      case ExprOp::Mul:
        return d(n->a) * Expr(n->b) + Expr(n->a) * d(n->b);
      case ExprOp::Div:
        return (d(n->a) * Expr(n->b) - Expr(n->a) * d(n->b)) /
               (Expr(n->b) * Expr(n->b));
      case ExprOp::Pow:
        return Expr::constant(n->value) * pow(Expr(n->a), n->value - 1.0) *
               d(n->a);
      case ExprOp::Exp:
        return exp(Expr(n->a)) * d(n->a);
      case ExprOp::Log:
        return d(n->a) / Expr(n->a);
      case ExprOp::Sin:
        return cos(Expr(n->a)) * d(n->a);
      case ExprOp::Cos:
        return -(sin(Expr(n->a)) * d(n->a));
      case ExprOp::Sqrt:
        return d(n->a) / (Expr::constant(2.0) * sqrt(Expr(n->a)));
    }
    throw std::logic_error("unhandled expression op");
  }

  std::string_view coord_;
  std::unordered_map<const ExprNode*, ExprPtr> memo_;
};

}  // namespace

Expr diff(const Expr& e, std::string_view coord) {
  Differ dif(coord);
  return dif.d(e.ptr());
}

bool structurally_equal(const Expr& x, const Expr& y) {
  const ExprNode* a = x.ptr().get();
  const ExprNode* b = y.ptr().get();
  if (a == b) return true;
  if (a->op != b->op || a->value != b->value || a->name != b->name) return false;
  if (!!a->a != !!b->a || !!a->b != !!b->b) return false;
  if (a->a && !structurally_equal(Expr(a->a), Expr(b->a))) return false;
  if (a->b && !structurally_equal(Expr(a->b), Expr(b->b))) return false;
  return true;
}

namespace {

bool depends_on_impl(const ExprNode* n, std::string_view coord,
                     std::unordered_set<const ExprNode*>& seen) {
  if (!seen.insert(n).second) return false;  // already visited, was false
  if (n->op == ExprOp::Coord) return n->name == coord;
  if (n->a && depends_on_impl(n->a.get(), coord, seen)) return true;
  if (n->b && depends_on_impl(n->b.get(), coord, seen)) return true;
  return false;
}

}  // namespace

bool depends_on(const Expr& e, std::string_view coord) {
  std::unordered_set<const ExprNode*> seen;
  return depends_on_impl(e.ptr().get(), coord, seen);
}

// ---------------------------------------------------------------------------
// printing

namespace {

// precedence: add/sub 1, mul/div 2, unary minus 2, pow 3, atoms 4
int precedence(const ExprNode* n) {
  switch (n->op) {
    case ExprOp::Add:
    case ExprOp::Sub:
      return 1;
    case ExprOp::Mul:
    case ExprOp::Div:
      return 2;
    case ExprOp::Neg:
      return 2;
    case ExprOp::Pow:
      return 3;
    default:
      return 4;
  }
}

void print_double(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void print_node(std::string& out, const ExprNode* n, int parent_prec);

void print_paren(std::string& out, const ExprNode* n, int required) {
  bool parens = precedence(n) < required ||
                (n->op == ExprOp::Const && n->value < 0.0);
  if (parens) out.push_back('(');
  print_node(out, n, 0);
  if (parens) out.push_back(')');
}

void print_node(std::string& out, const ExprNode* n, int) {
  switch (n->op) {
    case ExprOp::Const:
      print_double(out, n->value);
      return;
    case ExprOp::Coord:
    case ExprOp::Param:
      out += n->name;
      return;
    case ExprOp::Neg:
      out.push_back('-');
      print_paren(out, n->a.get(), 3);
      return;
    case ExprOp::Add:
      print_paren(out, n->a.get(), 1);
      out.push_back('+');
      print_paren(out, n->b.get(), 2);
      return;
    case ExprOp::Sub:
      print_paren(out, n->a.get(), 1);
      out.push_back('-');
      print_paren(out, n->b.get(), 2);
      return;
    case ExprOp::Mul:
      print_paren(out, n->a.get(), 2);
      out.push_back('*');
      print_paren(out, n->b.get(), 3);
      return;
    case ExprOp::Div:
      print_paren(out, n->a.get(), 2);
      out.push_back('/');
      print_paren(out, n->b.get(), 3);
      return;
    case ExprOp::Pow: {
      print_paren(out, n->a.get(), 4);
      out.push_back('^');
      if (n->value < 0.0) {
        out.push_back('(');
        print_double(out, n->value);
        out.push_back(')');
      } else {
        print_double(out, n->value);
      }
      return;
    }
    case ExprOp::Exp:
    case ExprOp::Log:
    case ExprOp::Sin:
    case ExprOp::Cos:
    case ExprOp::Sqrt: {
      switch (n->op) {
        case ExprOp::Exp: out += "exp"; break;
        case ExprOp::Log: out += "log"; break;
        case ExprOp::Sin: out += "sin"; break;
        case ExprOp::Cos: out += "cos"; break;
        default: out += "sqrt"; break;
      }
      out.push_back('(');
      print_node(out, n->a.get(), 0);
      out.push_back(')');
      return;
    }
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print_node(out, e.ptr().get(), 0);
  return out;
}

// ---------------------------------------------------------------------------
// evaluation

double Point::at(const std::string& name) const {
  auto it = values.find(name);
  if (it == values.end())
    throw UnboundSymbolError("point has no coordinate '" + name + "'");
  return it->second;
}

Evaluator::Evaluator(const Point& point, const ParamMap& params)
    : point_(point), params_(params) {}

double Evaluator::value(const Expr& e) { return visit(e.ptr().get()); }

double Evaluator::visit(const ExprNode* n) {
  auto it = memo_.find(n);
  if (it != memo_.end()) return it->second;

  double v = 0.0;
  switch (n->op) {
    case ExprOp::Const:
      v = n->value;
      break;
    case ExprOp::Coord: {
      auto p = point_.values.find(n->name);
      if (p == point_.values.end())
        throw UnboundSymbolError("unbound coordinate '" + n->name + "'");
      v = p->second;
      break;
    }
    case ExprOp::Param: {
      auto p = params_.find(n->name);
      if (p == params_.end())
        throw UnboundSymbolError("unbound parameter '" + n->name + "'");
      v = p->second;
      break;
    }
    case ExprOp::Neg:
      v = -visit(n->a.get());
      break;
    case ExprOp::Add:
      v = visit(n->a.get()) + visit(n->b.get());
      break;
    case ExprOp::Sub:
      v = visit(n->a.get()) - visit(n->b.get());
      break;
    case ExprOp::Mul:
      v = visit(n->a.get()) * visit(n->b.get());
      break;
    case ExprOp::Div: {
      double den = visit(n->b.get());
      if (den == 0.0) throw DomainError("division by zero");
      v = visit(n->a.get()) / den;
      break;
    }
    case ExprOp::Pow: {
      double base = visit(n->a.get());
      if (base < 0.0 && n->value != std::trunc(n->value))
        throw DomainError("fractional power of negative base");
      v = std::pow(base, n->value);
      break;
    }
    case ExprOp::Exp:
      v = std::exp(visit(n->a.get()));
      break;
    case ExprOp::Log: {
      double arg = visit(n->a.get());
      if (arg <= 0.0) throw DomainError("log of non-positive value");
      v = std::log(arg);
      break;
    }
    case ExprOp::Sin:
      v = std::sin(visit(n->a.get()));
      break;
    case ExprOp::Cos:
      v = std::cos(visit(n->a.get()));
      break;
    case ExprOp::Sqrt: {
      double arg = visit(n->a.get());
      if (arg < 0.0) throw DomainError("sqrt of negative value");
      v = std::sqrt(arg);
      break;
    }
  }
  memo_.emplace(n, v);
  return v;
}

double eval(const Expr& e, const Point& p, const ParamMap& params) {
  Evaluator ev(p, params);
  return ev.value(e);
}

// ---------------------------------------------------------------------------
// parsing

namespace {

struct Token {
  enum Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
  Kind kind;
  std::size_t pos;
  double number = 0.0;
  std::string text;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < src_.size() && (src_[i_] == ' ' || src_[i_] == '\t')) ++i_;
    tok_.pos = i_;
    tok_.text.clear();
    if (i_ >= src_.size()) {
      tok_.kind = Token::End;
      return;
    }
    char c = src_[i_];
    switch (c) {
      case '+': tok_.kind = Token::Plus; ++i_; return;
      case '-': tok_.kind = Token::Minus; ++i_; return;
      case '*': tok_.kind = Token::Star; ++i_; return;
      case '/': tok_.kind = Token::Slash; ++i_; return;
      case '^': tok_.kind = Token::Caret; ++i_; return;
      case '(': tok_.kind = Token::LParen; ++i_; return;
      case ')': tok_.kind = Token::RParen; ++i_; return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const char* begin = src_.data() + i_;
      const char* end = src_.data() + src_.size();
      double v = 0.0;
      auto res = std::from_chars(begin, end, v);
      if (res.ec != std::errc{})
        throw ParseError("malformed number", i_);
      tok_.kind = Token::Number;
      tok_.number = v;
      i_ = static_cast<std::size_t>(res.ptr - src_.data());
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i_;
      while (j < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_'))
        ++j;
      tok_.kind = Token::Ident;
      tok_.text.assign(src_.substr(i_, j - i_));
      i_ = j;
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", i_);
  }

  std::string_view src_;
  std::size_t i_ = 0;
  Token tok_;
};

class Parser {
 public:
  Parser(std::string_view src, const std::vector<std::string>& coords,
         const std::vector<std::string>& params)
      : lex_(src), coords_(coords), params_(params) {}

  Expr run() {
    Expr e = expression();
    if (lex_.peek().kind != Token::End)
      throw ParseError("unexpected trailing input", lex_.peek().pos);
    return e;
  }

 private:
  Expr expression() {
    Expr e = term();
    for (;;) {
      Token::Kind k = lex_.peek().kind;
      if (k == Token::Plus) {
        lex_.take();
        e = e + term();
      } else if (k == Token::Minus) {
        lex_.take();
        e = e - term();
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = factor();
    for (;;) {
      Token::Kind k = lex_.peek().kind;
      if (k == Token::Star) {
        lex_.take();
        e = e * factor();
      } else if (k == Token::Slash) {
        lex_.take();
        e = e / factor();
      } else {
        return e;
      }
    }
  }

  Expr factor() {
    if (lex_.peek().kind == Token::Minus) {
      lex_.take();
      return -factor();
    }
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (lex_.peek().kind == Token::Caret) {
      Token caret = lex_.take();
      Expr exponent = factor();
      if (!exponent.is_constant())
        throw ParseError("exponent of '^' must be a constant", caret.pos);
      return pow(base, exponent.constant_value());
    }
    return base;
  }

  Expr atom() {
    Token t = lex_.take();
    switch (t.kind) {
      case Token::Number:
        return Expr::constant(t.number);
      case Token::LParen: {
        Expr e = expression();
        if (lex_.peek().kind != Token::RParen)
          throw ParseError("expected ')'", lex_.peek().pos);
        lex_.take();
        return e;
      }
      case Token::Ident: {
        if (lex_.peek().kind == Token::LParen) {
          lex_.take();
          Expr arg = expression();
          if (lex_.peek().kind != Token::RParen)
            throw ParseError("expected ')'", lex_.peek().pos);
          lex_.take();
          if (t.text == "exp") return exp(arg);
          if (t.text == "log") return log(arg);
          if (t.text == "sin") return sin(arg);
          if (t.text == "cos") return cos(arg);
          if (t.text == "sqrt") return sqrt(arg);
          throw ParseError("unknown function '" + t.text + "'", t.pos);
        }
        for (const auto& c : coords_)
          if (c == t.text) return Expr::coordinate(t.text);
        for (const auto& p : params_)
          if (p == t.text) return Expr::parameter(t.text);
        throw ParseError("unknown identifier '" + t.text + "'", t.pos);
      }
      default:
        throw ParseError("expected a value", t.pos);
    }
  }

  Lexer lex_;
  const std::vector<std::string>& coords_;
  const std::vector<std::string>& params_;
};

}  // namespace

Expr parse_expr(std::string_view text, const std::vector<std::string>& coords,
                const std::vector<std::string>& params) {
  Parser p(text, coords, params);
  return p.run();
}

}  // namespace wacs
