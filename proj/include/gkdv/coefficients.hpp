#pragma once

// Coefficient fields of
//   u_t + alpha u_xxx + beta u_xx + gamma u_x + delta u = epsilon u u_x
// together with the split beta = beta1 + beta2 (beta2 <= 0) and numerical
// screening of the well-posedness hypotheses on a truncated box.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gkdv/expr.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv {

struct CoefficientSet {
  CoefficientExpr alpha = CoefficientExpr::constant(1.0);
  CoefficientExpr beta = CoefficientExpr::constant(0.0);
  CoefficientExpr gamma = CoefficientExpr::constant(0.0);
  CoefficientExpr delta = CoefficientExpr::constant(0.0);
  CoefficientExpr epsilon = CoefficientExpr::constant(0.0);
  CoefficientExpr beta1 = CoefficientExpr::constant(0.0);
  CoefficientExpr beta2 = CoefficientExpr::constant(0.0);
  /// Claimed coercivity constant: alpha0 <= alpha <= 1/alpha0.
  double alpha0 = 1.0;
};

CoefficientExpr parse_coefficient(std::string_view text);

enum class SplitKind { user_provided, softplus };

struct SplitStrategy {
  SplitKind kind = SplitKind::user_provided;
  double kappa = 10.0;
  /// beta1 for user_provided; when absent beta1 = beta and beta2 = 0.
  std::optional<CoefficientExpr> beta1;
};

struct BetaSplit {
  CoefficientExpr beta1;
  CoefficientExpr beta2;
};

/// softplus: beta1 = log(1 + exp(kappa beta)) / kappa, beta2 = beta - beta1.
BetaSplit split_beta(const CoefficientExpr& beta, const SplitStrategy& strategy);

/// Fills beta1/beta2 of `set` from its beta.
void apply_split(CoefficientSet& set, const SplitStrategy& strategy);

/// Sample times 0 = t_0 < ... < t_{m-1} = T (a single t = 0 when m <= 1).
std::vector<double> sample_times(double T, int t_samples);

/// Throws DomainError if any coefficient (or a derivative the gauge needs) is
/// non-finite on the grid nodes and box edges at the sampled times.
void screen_domain(const CoefficientSet& set, const Grid& grid, double T, int t_samples);

/// Throws CoercivityError unless alpha >= alpha0 > 0 on the grid at time t.
void require_coercive(const CoefficientSet& set, const Grid& grid, double t);

/// Cumulative integral int_0^x g(y) dy for a closed-form integrand, accurate to
/// round-off for smooth g: each grid cell uses 8-point Gauss-Legendre, and the
/// table is anchored at node n/2 (x = 0).
class AnchoredIntegral {
public:
  AnchoredIntegral(const Grid& grid, std::function<double(double)> integrand);

  /// Values at the n nodes followed by the right edge x = L.
  const std::vector<double>& table() const noexcept { return table_; }
  double at_node(std::size_t j) const { return table_.at(j); }
  /// Any x; points beyond the box are integrated cell by cell from the edge.
  double operator()(double x) const;

private:
  double cell(double a, double b) const;

  Grid grid_;
  std::function<double(double)> g_;
  std::vector<double> table_;
};

/// int_a^b g by 8-point Gauss-Legendre on one interval.
double gauss_legendre8(const std::function<double(double)>& g, double a, double b);

struct HypothesisEntry {
  int hypothesis = 0;
  std::string quantity;
  bool passed = true;
  /// Extremal sampled value of the quantity.
  double extremal_value = 0.0;
  double t_at = 0.0;
  double x_at = 0.0;
  /// Still growing at |x| = half_width: "inconclusive at infinity".
  bool boundary_trend = false;
  /// Integrand vanished at every sample.
  bool identically_zero = false;
  std::string note;
};

struct HypothesisReport {
  std::vector<HypothesisEntry> entries;

  /// True when every entry of hypothesis `h` passed.
  bool passed(int h) const;
  /// Gate used before runs: hypotheses 1 to 3.
  bool gate_passed() const { return passed(1) && passed(2) && passed(3); }
  const HypothesisEntry& entry(std::string_view quantity) const;
  std::string to_text() const;
};

HypothesisReport check_hypotheses(const CoefficientSet& set, const Grid& grid, double T,
                                  int t_samples);

}  // namespace gkdv
