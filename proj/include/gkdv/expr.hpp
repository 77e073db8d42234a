#pragma once

// Closed-form scalar fields of (t, x) with exact symbolic derivatives.
//
// Grammar (whitespace ignored):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?            right-associative, binds tighter than unary minus
//   primary := number | 'x' | 't' | 'pi' | func '(' expr ')' | '(' expr ')'
//   func    := exp | log | tanh | sech | sin | cos
// Numbers accept an optional fraction and exponent (1, 0.5, 2e-3).

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gkdv {

namespace detail {
struct Node;
struct DerivativeCache;
}  // namespace detail

class CoefficientExpr {
public:
  static constexpr int max_dx_order = 4;
  static constexpr int max_dt_order = 1;

  /// Throws ParseError (with 1-based column) on malformed text or unknown identifiers.
  static CoefficientExpr parse(std::string_view text);
  static CoefficientExpr constant(double value);
  static CoefficientExpr variable_x();
  static CoefficientExpr variable_t();

  /// Value of d^{dt_order}_t d^{dx_order}_x at (t, x). Throws OrderError outside the cached range.
  double eval(double t, double x, int dt_order = 0, int dx_order = 0) const;
  /// eval at every point of `xs`.
  std::vector<double> sample(double t, std::span<const double> xs, int dt_order = 0,
                             int dx_order = 0) const;

  /// Symbolic derivative as a new expression (no order limit).
  CoefficientExpr dx() const;
  CoefficientExpr dt() const;

  /// Original text for parsed expressions, a rendering otherwise.
  const std::string& source() const noexcept { return source_; }
  std::string to_string() const;

  bool depends_on_t() const noexcept;
  bool depends_on_x() const noexcept;
  bool is_constant() const noexcept { return !depends_on_t() && !depends_on_x(); }
  /// True when the tree contains a division, log or negative/non-constant power.
  bool may_have_poles() const noexcept;
  std::size_t node_count() const noexcept;

  friend CoefficientExpr operator+(const CoefficientExpr& a, const CoefficientExpr& b);
  friend CoefficientExpr operator-(const CoefficientExpr& a, const CoefficientExpr& b);
  friend CoefficientExpr operator*(const CoefficientExpr& a, const CoefficientExpr& b);
  friend CoefficientExpr operator/(const CoefficientExpr& a, const CoefficientExpr& b);
  friend CoefficientExpr operator-(const CoefficientExpr& a);
  friend CoefficientExpr pow(const CoefficientExpr& a, const CoefficientExpr& b);
  friend CoefficientExpr pow(const CoefficientExpr& a, double exponent);
  friend CoefficientExpr exp(const CoefficientExpr& a);
  friend CoefficientExpr log(const CoefficientExpr& a);
  /// log(1 + e^a), evaluated without overflow. Not part of the text grammar.
  friend CoefficientExpr softplus(const CoefficientExpr& a);

  /// f(t, x0) as an expression of t alone (x replaced by a constant).
  CoefficientExpr at_x(double x0) const;

private:
  using NodePtr = std::shared_ptr<const detail::Node>;
  explicit CoefficientExpr(NodePtr root, std::string source = {});

  NodePtr root_;
  std::shared_ptr<detail::DerivativeCache> cache_;
  std::string source_;
};

CoefficientExpr operator+(const CoefficientExpr& a, double b);
CoefficientExpr operator*(double a, const CoefficientExpr& b);

}  // namespace gkdv
