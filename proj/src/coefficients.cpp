#include "gkdv/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "gkdv/error.hpp"

namespace gkdv {

CoefficientExpr parse_coefficient(std::string_view text) { return CoefficientExpr::parse(text); }

BetaSplit split_beta(const CoefficientExpr& beta, const SplitStrategy& strategy) {
  if (strategy.kind == SplitKind::softplus) {
    if (!(strategy.kappa > 0.0) || !std::isfinite(strategy.kappa)) {
      throw InvalidArgument("softplus split needs kappa > 0");
    }
    const auto k = CoefficientExpr::constant(strategy.kappa);
    auto beta1 = softplus(k * beta) / k;
    auto beta2 = beta - beta1;
    return {std::move(beta1), std::move(beta2)};
  }
  if (strategy.beta1) return {*strategy.beta1, beta - *strategy.beta1};
  return {beta, CoefficientExpr::constant(0.0)};
}

void apply_split(CoefficientSet& set, const SplitStrategy& strategy) {
  auto split = split_beta(set.beta, strategy);
  set.beta1 = std::move(split.beta1);
  set.beta2 = std::move(split.beta2);
}

std::vector<double> sample_times(double T, int t_samples) {
  if (t_samples <= 1 || T <= 0.0) return {0.0};
  std::vector<double> ts(static_cast<std::size_t>(t_samples));
  for (int i = 0; i < t_samples; ++i) ts[i] = T * static_cast<double>(i) / (t_samples - 1);
  return ts;
}

namespace {

std::vector<double> nodes_with_edge(const Grid& grid) {
  auto xs = grid.nodes();
  xs.push_back(grid.half_width());
  return xs;
}

std::string at_string(double t, double x) {
  std::ostringstream os;
  os << "(t=" << t << ", x=" << x << ")";
  return os.str();
}

}  // namespace

void screen_domain(const CoefficientSet& set, const Grid& grid, double T, int t_samples) {
  struct Item {
    const char* name;
    const CoefficientExpr* expr;
    int max_dx;
  };
  const Item items[] = {{"alpha", &set.alpha, 3},  {"beta", &set.beta, 1},
                        {"gamma", &set.gamma, 1},  {"delta", &set.delta, 0},
                        {"epsilon", &set.epsilon, 1}, {"beta1", &set.beta1, 2},
                        {"beta2", &set.beta2, 2}};
  const auto xs = nodes_with_edge(grid);
  for (double t : sample_times(T, t_samples)) {
    for (const auto& item : items) {
      for (int dt = 0; dt <= 1; ++dt) {
        for (int dx = 0; dx <= (dt == 0 ? item.max_dx : 1); ++dx) {
          for (double x : xs) {
            const double v = item.expr->eval(t, x, dt, dx);
            if (!std::isfinite(v)) {
              throw DomainError(std::string(item.name) + " (dt=" + std::to_string(dt) +
                                ", dx=" + std::to_string(dx) + ") is not finite at " +
                                at_string(t, x));
            }
          }
        }
      }
    }
  }
}

void require_coercive(const CoefficientSet& set, const Grid& grid, double t) {
  if (!(set.alpha0 > 0.0)) throw CoercivityError("alpha0 must be positive");
  for (double x : nodes_with_edge(grid)) {
    const double a = set.alpha.eval(t, x);
    if (!(a >= set.alpha0)) {
      std::ostringstream os;
      os << "alpha = " << a << " below alpha0 = " << set.alpha0 << " at " << at_string(t, x);
      throw CoercivityError(os.str());
    }
  }
}

// ---------------------------------------------------------------------------

double gauss_legendre8(const std::function<double(double)>& g, double a, double b) {
  return boost::math::quadrature::gauss<double, 8>::integrate(g, a, b);
}

AnchoredIntegral::AnchoredIntegral(const Grid& grid, std::function<double(double)> integrand)
    : grid_(grid), g_(std::move(integrand)), table_(grid.size() + 1) {
  const std::size_t n = grid.size();
  const std::size_t o = grid.origin_index();
  const double L = grid.half_width();
  auto edge = [&](std::size_t j) { return j == n ? L : grid.node(j); };
  table_[o] = 0.0;
  for (std::size_t j = o; j < n; ++j) table_[j + 1] = table_[j] + cell(edge(j), edge(j + 1));
  for (std::size_t j = o; j > 0; --j) table_[j - 1] = table_[j] - cell(edge(j - 1), edge(j));
}

double AnchoredIntegral::cell(double a, double b) const { return gauss_legendre8(g_, a, b); }

double AnchoredIntegral::operator()(double x) const {
  const std::size_t n = grid_.size();
  const double L = grid_.half_width();
  const double dx = grid_.dx();
  if (x >= L) {
    double acc = table_[n];
    double a = L;
    while (x - a > dx) {
      acc += cell(a, a + dx);
      a += dx;
    }
    return acc + cell(a, x);
  }
  if (x < -L) {
    double acc = table_[0];
    double b = -L;
    while (b - x > dx) {
      acc -= cell(b - dx, b);
      b -= dx;
    }
    return acc - cell(x, b);
  }
  auto j = static_cast<std::size_t>(std::floor((x + L) / dx));
  j = std::min(j, n - 1);
  const double xj = grid_.node(j);
  const double xr = j + 1 == n ? L : grid_.node(j + 1);
  // Integrate from the nearer end of the cell.
  if (x - xj <= xr - x) return table_[j] + cell(xj, x);
  return table_[j + 1] - cell(x, xr);
}

// ---------------------------------------------------------------------------

namespace {

enum class SupKind { absolute, negated };

// Extremal value and edge trend of |F| or -F over the sampled (t, x) table.
HypothesisEntry sup_quantity(int hyp, std::string quantity, const Grid& grid,
                             const std::vector<double>& times,
                             const std::function<std::function<double(double)>(double)>& integrand_at,
                             SupKind kind, bool fail_on_trend) {
  HypothesisEntry e;
  e.hypothesis = hyp;
  e.quantity = std::move(quantity);
  e.extremal_value = -std::numeric_limits<double>::infinity();
  e.identically_zero = true;
  const auto xs = nodes_with_edge(grid);
  const std::size_t last = xs.size() - 1;
  std::vector<std::vector<double>> rows;
  for (double t : times) {
    const auto g = integrand_at(t);
    for (double x : xs) {
      if (g(x) != 0.0) e.identically_zero = false;
    }
    const AnchoredIntegral F(grid, g);
    std::vector<double> q(F.table());
    for (auto& v : q) v = kind == SupKind::absolute ? std::abs(v) : -v;
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (!std::isfinite(q[j])) {
        e.passed = false;
        e.note = "non-finite integral";
      }
      if (q[j] > e.extremal_value) {
        e.extremal_value = q[j];
        e.t_at = t;
        e.x_at = xs[j];
      }
    }
    rows.push_back(std::move(q));
  }
  const double tol = 1e-9 * std::max(1.0, std::abs(e.extremal_value));
  for (const auto& q : rows) {
    if (q[0] - q[1] > tol || q[last] - q[last - 1] > tol) e.boundary_trend = true;
  }
  if (e.boundary_trend && fail_on_trend) {
    e.passed = false;
    e.note = "still growing at the box edge: inconclusive at infinity";
  }
  return e;
}

}  // namespace

HypothesisReport check_hypotheses(const CoefficientSet& set, const Grid& grid, double T,
                                  int t_samples) {
  HypothesisReport report;
  const auto times = sample_times(T, t_samples);
  const auto xs = nodes_with_edge(grid);
  const std::size_t last = xs.size() - 1;

  {
    // alpha0 <= alpha <= 1/alpha0  <=>  min(alpha, 1/alpha) >= alpha0
    HypothesisEntry e;
    e.hypothesis = 1;
    e.quantity = "coercivity";
    e.extremal_value = std::numeric_limits<double>::infinity();
    for (double t : times) {
      std::vector<double> m(xs.size());
      for (std::size_t j = 0; j < xs.size(); ++j) {
        const double a = set.alpha.eval(t, xs[j]);
        m[j] = a > 0.0 ? std::min(a, 1.0 / a) : a;
        if (!(m[j] >= e.extremal_value)) {
          e.extremal_value = m[j];
          e.t_at = t;
          e.x_at = xs[j];
        }
      }
      const double tol = 1e-12;
      if (m[1] - m[0] > tol || m[last - 1] - m[last] > tol) e.boundary_trend = true;
    }
    e.passed = std::isfinite(e.extremal_value) && e.extremal_value >= set.alpha0;
    e.note = "min of min(alpha, 1/alpha) against alpha0";
    if (e.boundary_trend) e.note += "; still decreasing at the box edge";
    report.entries.push_back(std::move(e));
  }

  const auto a13_t = pow(set.alpha, -1.0 / 3.0).dt();
  auto h2 = sup_quantity(
      2, "sup|int_0^x d_t(alpha^(-1/3))|", grid, times,
      [&](double t) { return [&a13_t, t](double x) { return a13_t.eval(t, x); }; },
      SupKind::absolute, true);
  h2.note += std::string(h2.note.empty() ? "" : "; ") +
             "equals -1/3 of int_0^x alpha^(-4/3) alpha_t";
  report.entries.push_back(std::move(h2));

  {
    HypothesisEntry e;
    e.hypothesis = 3;
    e.quantity = "split";
    e.extremal_value = -std::numeric_limits<double>::infinity();
    double defect = 0.0;
    for (double t : times) {
      for (double x : xs) {
        const double b2 = set.beta2.eval(t, x);
        defect = std::max(defect, std::abs(set.beta1.eval(t, x) + b2 - set.beta.eval(t, x)));
        if (b2 > e.extremal_value) {
          e.extremal_value = b2;
          e.t_at = t;
          e.x_at = x;
        }
      }
    }
    e.passed = e.extremal_value <= 0.0 && defect <= 1e-10;
    std::ostringstream os;
    os << "max beta2 (must be <= 0); |beta1 + beta2 - beta| <= " << defect;
    e.note = os.str();
    report.entries.push_back(std::move(e));
  }

  const auto r1 = set.beta1 / set.alpha;
  const auto r1_t = r1.dt();
  report.entries.push_back(sup_quantity(
      3, "sup|int_0^x d_t(beta1/alpha)|", grid, times,
      [&](double t) { return [&r1_t, t](double x) { return r1_t.eval(t, x); }; },
      SupKind::absolute, true));
  report.entries.push_back(sup_quantity(
      3, "sup -int_0^x beta1/alpha", grid, times,
      [&](double t) { return [&r1, t](double x) { return r1.eval(t, x); }; }, SupKind::negated,
      true));

  auto h4 = sup_quantity(
      4, "sup|int_0^x beta1/alpha|", grid, times,
      [&](double t) { return [&r1, t](double x) { return r1.eval(t, x); }; }, SupKind::absolute,
      true);
  h4.note += std::string(h4.note.empty() ? "" : "; ") + "informational (bounded gauge weight)";
  report.entries.push_back(std::move(h4));
  return report;
}

bool HypothesisReport::passed(int h) const {
  return std::all_of(entries.begin(), entries.end(),
                     [h](const HypothesisEntry& e) { return e.hypothesis != h || e.passed; });
}

const HypothesisEntry& HypothesisReport::entry(std::string_view quantity) const {
  for (const auto& e : entries) {
    if (e.quantity == quantity) return e;
  }
  throw InvalidArgument("no hypothesis entry named " + std::string(quantity));
}

std::string HypothesisReport::to_text() const {
  std::ostringstream os;
  os.precision(6);
  for (const auto& e : entries) {
    os << "H" << e.hypothesis << "  " << (e.passed ? "pass" : "FAIL") << "  " << e.quantity
       << " = " << e.extremal_value << " at " << at_string(e.t_at, e.x_at);
    if (e.boundary_trend) os << "  [edge trend]";
    if (e.identically_zero) os << "  [integrand identically 0]";
    if (!e.note.empty()) os << "  (" << e.note << ")";
    os << "\n";
  }
  return os.str();
}

}  // namespace gkdv
