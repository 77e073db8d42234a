#pragma once

// Time integration.
//   original form:     u_t + alpha u_xxx + beta u_xx + gamma u_x + delta u = eps u u_x
//                      classical RK4, dt <= 1 / (max|alpha| k^3 + ...).
//   transformed form:  v_t + v_yyy - b v_yy + c v_y + d v = e v v_y + f v^2
//                      integrating-factor RK4; e^{i k^3 t} is applied exactly and
//                      N(v) = b v_yy - c v_y - d v + e v v_y + f v^2 advances explicitly.
// Coefficients are re-sampled at the stage times t, t + dt/2, t + dt.

#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "gkdv/coefficients.hpp"
#include "gkdv/gauge.hpp"
#include "gkdv/spectral.hpp"
#include "gkdv/trajectory.hpp"

namespace gkdv {

struct SolverConfig {
  EquationForm form = EquationForm::transformed;
  /// nullopt selects the stability rule.
  std::optional<double> dt;
  double t_final = 1.0;
  /// Sobolev index of the monitored norm.
  double s = 1.0;
  bool dealias = true;
  /// Blow-up when sup|u| exceeds this multiple of the initial sup-norm.
  double blowup_factor = 1e6;
  int monitor_stride = 1;
};

/// Coefficients of the transformed equation as a function of time.
class TransformedProblem {
public:
  /// Time-independent coefficients.
  explicit TransformedProblem(TransformedCoefficients frozen);
  /// Gauge-generated coefficients, rebuilt per time slice (cached).
  TransformedProblem(std::shared_ptr<const GaugeFields> fields, const Grid& source,
                     const Grid& image);

  const Grid& grid() const noexcept { return grid_; }
  bool time_dependent() const noexcept { return time_dependent_; }
  std::shared_ptr<const TransformedCoefficients> at(double t) const;
  /// The gauge map at time t (gauge-generated problems only).
  std::shared_ptr<const GaugeMap> map_at(double t) const;

private:
  struct Slice {
    std::shared_ptr<const GaugeMap> map;
    std::shared_ptr<const TransformedCoefficients> coeffs;
  };
  const Slice& slice(double t) const;

  Grid grid_;
  bool time_dependent_ = false;
  std::shared_ptr<const GaugeFields> fields_;
  std::optional<Grid> source_;
  mutable std::mutex mutex_;
  mutable std::map<double, Slice> cache_;
};

/// One integrating-factor RK4 step with coefficients frozen over the step.
SpectralState step_transformed(const SpectralState& v, const TransformedCoefficients& coeffs,
                               double t, double dt, bool dealias = true);
/// One step with coefficients sampled at the stage times.
SpectralState step_transformed(const SpectralState& v, const TransformedProblem& problem,
                               double t, double dt, bool dealias = true);

/// One explicit RK4 step of the original equation on u's grid.
SpectralState step_original(const SpectralState& u, const CoefficientSet& set, double t, double dt,
                            bool dealias = true);

/// Stability-rule time step (before the adjustment that lands on t_final).
double auto_dt(const SpectralState& u0, const CoefficientSet& set, bool dealias);
double auto_dt(const SpectralState& v0, const TransformedProblem& problem, bool dealias);

Trajectory solve(const SpectralState& u0, const SolverConfig& config, const CoefficientSet& set);
Trajectory solve(const SpectralState& v0, const SolverConfig& config,
                 const TransformedProblem& problem);

/// Space-time test function with compact support inside [0, T) x interior.
struct TestField {
  std::function<double(double t, double x)> value;
  std::function<double(double t, double x)> dt;
};

/// Left side of the integrated-by-parts weak formulation, by space-time quadrature
/// over the stored trajectory states. Throws SupportViolation if phi does not vanish
/// at t = T or near the box edge.
double weak_residual(const Trajectory& trajectory, const TestField& phi, const CoefficientSet& set);
double weak_residual(const Trajectory& trajectory, const TestField& phi,
                     const TransformedProblem& problem);

struct NormReport {
  double s = 0.0;
  std::vector<double> times;
  std::vector<double> hs_norm_sq;
  /// -sum_N <N>^{2s} int b (P_N u_x)^2 at each sample (must be <= 0 when b >= 0).
  std::vector<double> dissipation;
  /// Trapezoid integral of -dissipation up to each sample.
  std::vector<double> cumulative_seminorm;
  double max_dissipation = 0.0;
  bool dissipation_nonpositive = true;
  /// max_t (||u(t)||^2_{H^s} + seminorm(t)) / ||u_0||^2_{H^s}.
  double max_energy_ratio = 0.0;
  bool hs_nonincreasing = true;
};

inline constexpr double kWeightTolerance = 1e-10;

/// b_field(t) returns b on the trajectory grid at time t. Values in [-kWeightTolerance, 0)
/// count as round-off and are clipped; anything lower throws NegativeWeight.
NormReport energy_monitor(const Trajectory& trajectory, double s,
                          const std::function<std::vector<double>(double)>& b_field);

/// Little-endian snapshot: uint64 n, double L, double t, then n (re, im) coefficient pairs.
void write_snapshot(std::ostream& os, const SpectralState& state, double t);
std::pair<SpectralState, double> read_snapshot(std::istream& is);

}  // namespace gkdv
