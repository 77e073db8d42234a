#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gkdv/coefficients.hpp"
#include "gkdv/solver.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv {

enum class ExperimentKind {
  transform_consistency,
  bona_smith,
  wavepacket,
  continuity,
  commutator_survey,
  soliton_benchmark
};

std::string to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(const std::string& name);
const std::vector<ExperimentKind>& all_experiment_kinds();
/// One-line description for list-experiments.
std::string describe(ExperimentKind kind);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::soliton_benchmark;
  /// Absent: the kind's built-in coefficients.
  std::optional<CoefficientSet> coefficients;
  double half_width = 16.0 * 3.141592653589793;
  std::size_t num_points = 512;
  double t_final = 0.5;
  std::optional<double> dt;
  double s = 1.0;
  /// Resolution sweep (transform_consistency) or truncation levels (bona_smith).
  std::vector<std::size_t> n_values;
  std::size_t reference_n = 0;
  std::vector<double> xi0_values;
  std::vector<double> perturbation_sizes;
  /// Initial datum as an expression of x; absent: the kind's default.
  std::optional<CoefficientExpr> u0;
  std::uint64_t seed = 1;
  int draws = 100;
  /// Kind-specific knobs (kappa, R, beta_amplitude, ...).
  std::map<std::string, double> params;
  /// Set by the caller when the spec deliberately violates the hypotheses.
  bool hypothesis_violation = false;

  double param(const std::string& key, double fallback) const;
};

/// Acceptance-scale defaults for each kind.
ExperimentSpec default_spec(ExperimentKind kind);
/// Coefficients the kind uses when the spec carries none.
CoefficientSet default_coefficients(ExperimentKind kind);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Verdict {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  /// How value was judged: "<", "<=", ">", ">=", "|x-target|<=".
  std::string comparison;
  std::string note;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  /// Largest |residual| in log space.
  double max_residual = 0.0;
  std::size_t points = 0;
};

/// Least-squares fit of log(y) = slope log(x) + intercept.
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::soliton_benchmark;
  std::vector<Table> tables;
  std::map<std::string, double> scalars;
  std::vector<Verdict> verdicts;
  std::vector<std::string> notes;
  bool hypothesis_violation = false;
  std::string hypothesis_text;

  bool passed() const;
  const Verdict& verdict(const std::string& name) const;
};

ExperimentReport run_experiment(const ExperimentSpec& spec);

ExperimentReport run_transform_consistency(const ExperimentSpec& spec);
ExperimentReport run_bona_smith(const ExperimentSpec& spec);
ExperimentReport run_wavepacket(const ExperimentSpec& spec);
ExperimentReport run_continuity(const ExperimentSpec& spec);
ExperimentReport run_commutator_survey(const ExperimentSpec& spec);
ExperimentReport run_soliton_benchmark(const ExperimentSpec& spec);

// Building blocks shared with the tests.

/// Runs fn(0..count-1) on a worker pool; results come back in index order.
template <class R>
std::vector<R> parallel_map(std::size_t count, const std::function<R(std::size_t)>& fn);

/// Problem for sets whose gauge is the identity (alpha == 1, beta1 == 0, t-independent):
/// b = -beta, c = gamma, d = delta, e = epsilon, f = 0 on `grid`.
TransformedProblem identity_gauge_problem(const CoefficientSet& set, const Grid& grid);

/// 2 kappa^2 sech^2(kappa (x - x0 - 4 kappa^2 t)), which solves v_t + v_xxx + 6 v v_x = 0.
double kdv_soliton(double kappa, double x0, double t, double x);

/// Magnitude of the analytic signal of a real field.
std::vector<double> hilbert_envelope(const SpectralState& u);

/// Real field with |c_k| = amp (1 + |k|)^{-decay} for 1 <= |k| <= k_cut and seeded phases.
SpectralState random_power_law_field(const Grid& grid, double decay, double k_cut,
                                     std::uint64_t seed, double amp = 1.0);

}  // namespace gkdv

#include "gkdv/parallel.tpp"
