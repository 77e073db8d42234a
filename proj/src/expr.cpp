#include "gkdv/expr.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "gkdv/error.hpp"

namespace gkdv {
namespace detail {

enum class Op { Const, X, T, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Tanh, Sech, Sin, Cos, Softplus, Logistic };

struct Node {
  Op op;
  double value = 0.0;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
  bool has_t = false;
  bool has_x = false;
  bool poles = false;
  std::size_t count = 1;
};

struct DerivativeCache {
  std::mutex mutex;
  std::array<std::array<std::shared_ptr<const Node>, CoefficientExpr::max_dx_order + 1>,
             CoefficientExpr::max_dt_order + 1>
      table;
};

}  // namespace detail

namespace {

using detail::Node;
using detail::Op;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double value = 0.0) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->value = value;
  n->has_t = op == Op::T;
  n->has_x = op == Op::X;
  for (const auto& child : {a, b}) {
    if (!child) continue;
    n->has_t = n->has_t || child->has_t;
    n->has_x = n->has_x || child->has_x;
    n->poles = n->poles || child->poles;
    n->count += child->count;
  }
  if (op == Op::Div || op == Op::Log) n->poles = true;
  if (op == Op::Pow && b && (b->op != Op::Const || b->value < 0.0)) n->poles = true;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr cnst(double v) { return make(Op::Const, nullptr, nullptr, v); }
bool is_const(const NodePtr& n) { return n->op == Op::Const; }
bool is_value(const NodePtr& n, double v) { return is_const(n) && n->value == v; }

double apply(Op op, double a, double b) {
  switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div: return a / b;
    case Op::Pow: return std::pow(a, b);
    case Op::Neg: return -a;
    case Op::Exp: return std::exp(a);
    case Op::Log: return std::log(a);
    case Op::Tanh: return std::tanh(a);
    case Op::Sech: return 1.0 / std::cosh(a);
    case Op::Sin: return std::sin(a);
    case Op::Cos: return std::cos(a);
    case Op::Softplus: return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
    case Op::Logistic: return a >= 0.0 ? 1.0 / (1.0 + std::exp(-a)) : std::exp(a) / (1.0 + std::exp(a));
    default: return 0.0;
  }
}

// Smart constructors fold constants and drop neutral elements.
NodePtr add(NodePtr a, NodePtr b) {
  if (is_value(a, 0.0)) return b;
  if (is_value(b, 0.0)) return a;
  if (is_const(a) && is_const(b)) return cnst(a->value + b->value);
  return make(Op::Add, std::move(a), std::move(b));
}

NodePtr neg(NodePtr a) {
  if (is_const(a)) return cnst(-a->value);
  if (a->op == Op::Neg) return a->a;
  return make(Op::Neg, std::move(a));
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_value(b, 0.0)) return a;
  if (is_value(a, 0.0)) return neg(std::move(b));
  if (is_const(a) && is_const(b)) return cnst(a->value - b->value);
  return make(Op::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (is_value(a, 0.0) || is_value(b, 0.0)) return cnst(0.0);
  if (is_value(a, 1.0)) return b;
  if (is_value(b, 1.0)) return a;
  if (is_value(a, -1.0)) return neg(std::move(b));
  if (is_value(b, -1.0)) return neg(std::move(a));
  if (is_const(a) && is_const(b)) return cnst(a->value * b->value);
  return make(Op::Mul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
  if (is_value(a, 0.0)) return cnst(0.0);
  if (is_value(b, 1.0)) return a;
  if (is_const(a) && is_const(b)) return cnst(a->value / b->value);
  return make(Op::Div, std::move(a), std::move(b));
}

NodePtr powr(NodePtr a, NodePtr b) {
  if (is_value(b, 0.0)) return cnst(1.0);
  if (is_value(b, 1.0)) return a;
  if (is_const(a) && is_const(b)) return cnst(std::pow(a->value, b->value));
  return make(Op::Pow, std::move(a), std::move(b));
}

NodePtr unary(Op op, NodePtr a) {
  if (is_const(a)) return cnst(apply(op, a->value, 0.0));
  return make(op, std::move(a));
}

enum class Var { X, T };

NodePtr diff(const NodePtr& n, Var v) {
  switch (n->op) {
    case Op::Const: return cnst(0.0);
    case Op::X: return cnst(v == Var::X ? 1.0 : 0.0);
    case Op::T: return cnst(v == Var::T ? 1.0 : 0.0);
    default: break;
  }
  if ((v == Var::X && !n->has_x) || (v == Var::T && !n->has_t)) return cnst(0.0);
  const NodePtr& a = n->a;
  const NodePtr& b = n->b;
  switch (n->op) {
    case Op::Add: return add(diff(a, v), diff(b, v));
    case Op::Sub: return sub(diff(a, v), diff(b, v));
    case Op::Neg: return neg(diff(a, v));
    case Op::Mul: return add(mul(diff(a, v), b), mul(a, diff(b, v)));
    case Op::Div:
      return sub(div(diff(a, v), b), div(mul(a, diff(b, v)), mul(b, b)));
    case Op::Pow: {
      if (is_const(b)) {
        return mul(mul(cnst(b->value), powr(a, cnst(b->value - 1.0))), diff(a, v));
      }
      // a^b (b' log a + b a'/a)
      return mul(n, add(mul(diff(b, v), unary(Op::Log, a)), div(mul(b, diff(a, v)), a)));
    }
    case Op::Exp: return mul(n, diff(a, v));
    case Op::Log: return div(diff(a, v), a);
    case Op::Tanh: {
      const auto s = unary(Op::Sech, a);
      return mul(mul(s, s), diff(a, v));
    }
    case Op::Sech: return neg(mul(mul(n, unary(Op::Tanh, a)), diff(a, v)));
    case Op::Sin: return mul(unary(Op::Cos, a), diff(a, v));
    case Op::Cos: return neg(mul(unary(Op::Sin, a), diff(a, v)));
    case Op::Softplus: return mul(unary(Op::Logistic, a), diff(a, v));
    case Op::Logistic: return mul(mul(n, sub(cnst(1.0), n)), diff(a, v));
    default: return cnst(0.0);
  }
}

double evaluate(const Node& n, double t, double x) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::X: return x;
    case Op::T: return t;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Pow: return apply(n.op, evaluate(*n.a, t, x), evaluate(*n.b, t, x));
    default: return apply(n.op, evaluate(*n.a, t, x), 0.0);
  }
}

NodePtr substitute_x(const NodePtr& n, double x0) {
  if (!n->has_x) return n;
  switch (n.get()->op) {
    case Op::X: return cnst(x0);
    case Op::Add: return add(substitute_x(n->a, x0), substitute_x(n->b, x0));
    case Op::Sub: return sub(substitute_x(n->a, x0), substitute_x(n->b, x0));
    case Op::Mul: return mul(substitute_x(n->a, x0), substitute_x(n->b, x0));
    case Op::Div: return div(substitute_x(n->a, x0), substitute_x(n->b, x0));
    case Op::Pow: return powr(substitute_x(n->a, x0), substitute_x(n->b, x0));
    case Op::Neg: return neg(substitute_x(n->a, x0));
    default: return unary(n->op, substitute_x(n->a, x0));
  }
}

const char* op_name(Op op) {
  switch (op) {
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Tanh: return "tanh";
    case Op::Sech: return "sech";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Softplus: return "softplus";
    case Op::Logistic: return "logistic";
    default: return "?";
  }
}

void render(const Node& n, std::ostringstream& os) {
  switch (n.op) {
    case Op::Const: os << n.value; return;
    case Op::X: os << "x"; return;
    case Op::T: os << "t"; return;
    case Op::Neg: os << "(-"; render(*n.a, os); os << ")"; return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Pow: {
      const char sym = n.op == Op::Add ? '+' : n.op == Op::Sub ? '-' : n.op == Op::Mul ? '*'
                       : n.op == Op::Div ? '/' : '^';
      os << "(";
      render(*n.a, os);
      os << sym;
      render(*n.b, os);
      os << ")";
      return;
    }
    default:
      os << op_name(n.op) << "(";
      render(*n.a, os);
      os << ")";
  }
}

// ---------------------------------------------------------------------------
// Recursive-descent parser. Columns are 1-based.

class Parser {
public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty expression", 1);
    auto n = expr();
    skip_ws();
    if (pos_ < text_.size()) {
      if (text_[pos_] == ')') throw ParseError("unmatched ')'", pos_ + 1);
      throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_ + 1);
    }
    return n;
  }

private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail_at_end(const std::string& what) {
    // An expression cut short inside a group is reported at the unclosed delimiter.
    if (!open_.empty()) throw ParseError(what + " (unclosed '(')", open_.back() + 1);
    throw ParseError(what, pos_ + 1);
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+')) lhs = add(lhs, term());
      else if (accept('-')) lhs = sub(lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    auto lhs = unary_expr();
    for (;;) {
      if (accept('*')) lhs = mul(lhs, unary_expr());
      else if (accept('/')) lhs = make(Op::Div, lhs, unary_expr());
      else return lhs;
    }
  }

  NodePtr unary_expr() {
    if (accept('-')) return neg(unary_expr());
    if (accept('+')) return unary_expr();
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (accept('^')) return powr(base, unary_expr());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail_at_end("unexpected end of expression");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (c == '(') {
      open_.push_back(pos_);
      ++pos_;
      auto inner = expr();
      if (!accept(')')) {
        if (pos_ >= text_.size()) fail_at_end("missing ')'");
        throw ParseError("expected ')'", pos_ + 1);
      }
      open_.pop_back();
      return inner;
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_ + 1);
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    const std::string tok(text_.substr(start, pos_ - start));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ParseError("malformed number '" + tok + "'", start + 1);
    }
    if (used != tok.size()) throw ParseError("malformed number '" + tok + "'", start + 1);
    return cnst(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(text_.substr(start, pos_ - start));
    if (name == "x") return make(Op::X);
    if (name == "t") return make(Op::T);
    if (name == "pi") return cnst(std::numbers::pi);
    static const std::array<std::pair<const char*, Op>, 6> funcs{{{"exp", Op::Exp},
                                                                  {"log", Op::Log},
                                                                  {"tanh", Op::Tanh},
                                                                  {"sech", Op::Sech},
                                                                  {"sin", Op::Sin},
                                                                  {"cos", Op::Cos}}};
    for (const auto& [fname, op] : funcs) {
      if (name != fname) continue;
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != '(') {
        if (pos_ >= text_.size()) fail_at_end("expected '(' after " + name);
        throw ParseError("expected '(' after " + name, pos_ + 1);
      }
      open_.push_back(pos_);
      ++pos_;
      auto arg = expr();
      if (!accept(')')) {
        if (pos_ >= text_.size()) fail_at_end("missing ')'");
        throw ParseError("expected ')'", pos_ + 1);
      }
      open_.pop_back();
      return op == Op::Log ? make(Op::Log, arg) : unary(op, arg);
    }
    throw ParseError("unknown identifier '" + name + "'", start + 1);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<std::size_t> open_;
};

}  // namespace

// ---------------------------------------------------------------------------

CoefficientExpr::CoefficientExpr(NodePtr root, std::string source)
    : root_(std::move(root)), cache_(std::make_shared<detail::DerivativeCache>()),
      source_(std::move(source)) {
  if (source_.empty()) source_ = to_string();
  cache_->table[0][0] = root_;
}

CoefficientExpr CoefficientExpr::parse(std::string_view text) {
  Parser p(text);
  return CoefficientExpr(p.parse(), std::string(text));
}

CoefficientExpr CoefficientExpr::constant(double value) { return CoefficientExpr(cnst(value)); }
CoefficientExpr CoefficientExpr::variable_x() { return CoefficientExpr(make(Op::X)); }
CoefficientExpr CoefficientExpr::variable_t() { return CoefficientExpr(make(Op::T)); }

double CoefficientExpr::eval(double t, double x, int dt_order, int dx_order) const {
  if (dt_order < 0 || dt_order > max_dt_order || dx_order < 0 || dx_order > max_dx_order) {
    throw OrderError("derivative order (dt=" + std::to_string(dt_order) +
                     ", dx=" + std::to_string(dx_order) + ") outside cached range");
  }
  NodePtr node;
  {
    std::lock_guard lock(cache_->mutex);
    auto& table = cache_->table;
    if (!table[dt_order][dx_order]) {
      if (!table[dt_order][0]) table[dt_order][0] = diff(table[0][0], Var::T);
      for (int k = 1; k <= dx_order; ++k) {
        if (!table[dt_order][k]) table[dt_order][k] = diff(table[dt_order][k - 1], Var::X);
      }
    }
    node = table[dt_order][dx_order];
  }
  return evaluate(*node, t, x);
}

std::vector<double> CoefficientExpr::sample(double t, std::span<const double> xs, int dt_order,
                                            int dx_order) const {
  std::vector<double> out(xs.size());
  if (xs.empty()) return out;
  out[0] = eval(t, xs[0], dt_order, dx_order);
  NodePtr node;
  {
    std::lock_guard lock(cache_->mutex);
    node = cache_->table[dt_order][dx_order];
  }
  for (std::size_t i = 1; i < xs.size(); ++i) out[i] = evaluate(*node, t, xs[i]);
  return out;
}

CoefficientExpr CoefficientExpr::dx() const { return CoefficientExpr(diff(root_, Var::X)); }
CoefficientExpr CoefficientExpr::dt() const { return CoefficientExpr(diff(root_, Var::T)); }

std::string CoefficientExpr::to_string() const {
  std::ostringstream os;
  os.precision(17);
  render(*root_, os);
  return os.str();
}

bool CoefficientExpr::depends_on_t() const noexcept { return root_->has_t; }
bool CoefficientExpr::depends_on_x() const noexcept { return root_->has_x; }
bool CoefficientExpr::may_have_poles() const noexcept { return root_->poles; }
std::size_t CoefficientExpr::node_count() const noexcept { return root_->count; }

CoefficientExpr CoefficientExpr::at_x(double x0) const {
  return CoefficientExpr(substitute_x(root_, x0));
}

CoefficientExpr operator+(const CoefficientExpr& a, const CoefficientExpr& b) {
  return CoefficientExpr(add(a.root_, b.root_));
}
CoefficientExpr operator-(const CoefficientExpr& a, const CoefficientExpr& b) {
  return CoefficientExpr(sub(a.root_, b.root_));
}
CoefficientExpr operator*(const CoefficientExpr& a, const CoefficientExpr& b) {
  return CoefficientExpr(mul(a.root_, b.root_));
}
CoefficientExpr operator/(const CoefficientExpr& a, const CoefficientExpr& b) {
  return CoefficientExpr(div(a.root_, b.root_));
}
CoefficientExpr operator-(const CoefficientExpr& a) { return CoefficientExpr(neg(a.root_)); }
CoefficientExpr pow(const CoefficientExpr& a, const CoefficientExpr& b) {
  return CoefficientExpr(powr(a.root_, b.root_));
}
CoefficientExpr pow(const CoefficientExpr& a, double exponent) {
  return CoefficientExpr(powr(a.root_, cnst(exponent)));
}
CoefficientExpr exp(const CoefficientExpr& a) { return CoefficientExpr(unary(Op::Exp, a.root_)); }
CoefficientExpr log(const CoefficientExpr& a) { return CoefficientExpr(make(Op::Log, a.root_)); }
CoefficientExpr softplus(const CoefficientExpr& a) {
  return CoefficientExpr(unary(Op::Softplus, a.root_));
}

CoefficientExpr operator+(const CoefficientExpr& a, double b) {
  return a + CoefficientExpr::constant(b);
}
CoefficientExpr operator*(double a, const CoefficientExpr& b) {
  return CoefficientExpr::constant(a) * b;
}

}  // namespace gkdv
