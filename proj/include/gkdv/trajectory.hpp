#pragma once

#include <optional>
#include <vector>

#include "gkdv/spectral.hpp"

namespace gkdv {

enum class EquationForm { original, transformed };

/// Norms recorded at one monitor sample.
struct NormRecord {
  double t = 0.0;
  double hs_norm = 0.0;
  double l2_norm = 0.0;
  double sup_norm = 0.0;
  double mass = 0.0;
  /// Cumulative weighted b-seminorm (squared) up to t; zero when no weight applies.
  double cumulative_seminorm = 0.0;
};

/// Time-indexed solution states with their monitored norms.
struct Trajectory {
  Grid grid;
  EquationForm form = EquationForm::transformed;
  double s = 0.0;
  std::vector<double> times;
  std::vector<SpectralState> states;
  std::vector<NormRecord> norms;
  /// Set when the sup-norm crossed the blow-up threshold (or went non-finite).
  std::optional<double> blowup_time;
  std::size_t steps_taken = 0;
  double dt = 0.0;

  explicit Trajectory(const Grid& g) : grid(g) {}

  std::size_t size() const noexcept { return times.size(); }
  double t_final() const { return times.empty() ? 0.0 : times.back(); }
};

}  // namespace gkdv
