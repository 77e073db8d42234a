#include "gkdv/littlewood_paley.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "gkdv/error.hpp"

namespace gkdv {
namespace {

double smooth_step_m(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

bool is_dyadic(long N) { return N >= 1 && (N & (N - 1)) == 0; }

void require_dyadic(long N) {
  if (!is_dyadic(N)) {
    throw InvalidArgument("dyadic level must be a power of two >= 1, got " + std::to_string(N));
  }
}

// Smallest dyadic K with phi_K(xi) == 0 for every larger level.
long top_level(double xi) {
  long K = 1;
  while (static_cast<double>(K) < 2.0 * std::abs(xi) + 2.0) K *= 2;
  return K;
}

double sum_levels(long lo, long hi, double xi) {
  double s = 0.0;
  for (long K = std::max(lo, 1L); K <= hi; K *= 2) s += dyadic_symbol(K, xi);
  return s;
}

SpectralState apply_symbol(const SpectralState& field, ProjectorKind kind, long N) {
  const Grid& g = field.grid();
  std::vector<cplx> out(field.coefficients().begin(), field.coefficients().end());
  for (std::size_t m = 0; m < out.size(); ++m) {
    out[m] *= DyadicProjector::symbol_at(kind, N, g.wavenumber(m));
  }
  return SpectralState(g, std::move(out), field.is_real_field());
}

void require_commutator_band(const Grid& grid, long N) {
  require_dyadic(N);
  if (N > max_commutator_level(grid)) {
    throw InvalidArgument("dyadic level " + std::to_string(N) +
                          " exceeds the commutator band of this grid (max " +
                          std::to_string(max_commutator_level(grid)) + ")");
  }
}

// C h = P_N(F h) - F P_N h, products through the 2/3-rule.
SpectralState commutator_with(const SpectralState& F, const SpectralState& h, long N) {
  const auto PNh = project(h, ProjectorKind::P_N, N);
  return project(dealiased_product(F, h), ProjectorKind::P_N, N) - dealiased_product(F, PNh);
}

SpectralState double_commutator_with(const SpectralState& F, const SpectralState& h, long N) {
  const auto PNh = project(h, ProjectorKind::P_N, N);
  return project(commutator_with(F, h, N), ProjectorKind::P_N, N) - commutator_with(F, PNh, N);
}

}  // namespace

double bump_eta(double xi) {
  const double a = std::abs(xi);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double t = a - 1.0;
  const double m1 = smooth_step_m(1.0 - t);
  return m1 / (smooth_step_m(t) + m1);
}

double dyadic_symbol(long N, double xi) {
  if (N == 1) return bump_eta(xi);
  const double n = static_cast<double>(N);
  return bump_eta(xi / n) - bump_eta(2.0 * xi / n);
}

double DyadicProjector::symbol_at(ProjectorKind kind, long N, double xi) {
  switch (kind) {
    case ProjectorKind::P_N:
      return dyadic_symbol(N, xi);
    case ProjectorKind::P_leq_N:
      return sum_levels(1, N, xi);
    case ProjectorKind::P_ll_N:
      return N >= 8 ? sum_levels(1, N / 8, xi) : 0.0;
    case ProjectorKind::P_geq_N:
      return sum_levels(N, std::max(N, top_level(xi)), xi);
    case ProjectorKind::tilde_P_N:
      return sum_levels(N / 4, 4 * N, xi);
  }
  return 0.0;
}

DyadicProjector::DyadicProjector(const Grid& grid, ProjectorKind kind, long N)
    : grid_(grid), kind_(kind), N_(N), symbol_(grid.size()) {
  require_dyadic(N);
  for (std::size_t m = 0; m < symbol_.size(); ++m) {
    symbol_[m] = symbol_at(kind, N, grid.wavenumber(m));
  }
}

std::vector<long> dyadic_levels(const Grid& grid) {
  std::vector<long> levels;
  for (long N = 1; static_cast<double>(N) / 2.0 < grid.k_max(); N *= 2) levels.push_back(N);
  return levels;
}

SpectralState project(const SpectralState& field, const DyadicProjector& projector) {
  require_same_grid(field.grid(), projector.grid(), "project");
  std::vector<cplx> out(field.coefficients().begin(), field.coefficients().end());
  const auto sym = projector.symbol();
  for (std::size_t m = 0; m < out.size(); ++m) out[m] *= sym[m];
  return SpectralState(field.grid(), std::move(out), field.is_real_field());
}

SpectralState project(const SpectralState& field, ProjectorKind kind, long N) {
  require_dyadic(N);
  return apply_symbol(field, kind, N);
}

double zygmund_norm(const SpectralState& field, double s) {
  double best = 0.0;
  for (long N : dyadic_levels(field.grid())) {
    const double sup = sup_norm(project(field, ProjectorKind::P_N, N));
    best = std::max(best, std::pow(static_cast<double>(N), s) * sup);
  }
  return best;
}

double dyadic_dissipation(const SpectralState& u, std::span<const double> b_samples, double theta) {
  const Grid& g = u.grid();
  if (b_samples.size() != g.size()) throw SizingError("weight sample count does not match grid");
  const auto ux = derivative(u, 1);
  double total = 0.0;
  for (long N : dyadic_levels(g)) {
    const auto v = project(ux, ProjectorKind::P_N, N).samples();
    double integral = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) integral += b_samples[j] * v[j] * v[j];
    total += std::pow(1.0 + static_cast<double>(N), 2.0 * theta) * integral * g.dx();
  }
  return -total;
}

double weighted_b_seminorm(const Trajectory& trajectory,
                           const std::vector<std::vector<double>>& b_samples, double theta) {
  if (b_samples.size() != trajectory.size()) {
    throw SizingError("weight needs one sample array per trajectory time");
  }
  for (const auto& row : b_samples) {
    for (double b : row) {
      if (b < 0.0) throw NegativeWeight("weighted seminorm requires b >= 0, found " +
                                        std::to_string(b));
    }
  }
  if (trajectory.size() < 2) return 0.0;
  std::vector<double> slice(trajectory.size());
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    slice[i] = -dyadic_dissipation(trajectory.states[i], b_samples[i], theta);
  }
  double total = 0.0;
  for (std::size_t i = 1; i < slice.size(); ++i) {
    total += 0.5 * (slice[i] + slice[i - 1]) * (trajectory.times[i] - trajectory.times[i - 1]);
  }
  return total;
}

long max_commutator_level(const Grid& grid) {
  // Output frequencies reach 2N + N/4; keep them inside (2/3) k_max.
  const double limit = (2.0 / 3.0) * grid.k_max() * 4.0 / 9.0;
  long N = 1;
  while (static_cast<double>(2 * N) <= limit) N *= 2;
  return N;
}

SpectralState commutator(const SpectralState& f, const SpectralState& g, long N) {
  require_same_grid(f.grid(), g.grid(), "commutator");
  require_commutator_band(f.grid(), N);
  const auto F = project(f, ProjectorKind::P_ll_N, N);
  return commutator_with(F, g, N);
}

SpectralState double_commutator(const SpectralState& f, const SpectralState& g, long N) {
  require_same_grid(f.grid(), g.grid(), "double_commutator");
  require_commutator_band(f.grid(), N);
  const auto F = project(f, ProjectorKind::P_ll_N, N);
  return double_commutator_with(F, g, N);
}

double pairing(const SpectralState& a, const SpectralState& b) {
  require_same_grid(a.grid(), b.grid(), "pairing");
  const auto ca = a.coefficients();
  const auto cb = b.coefficients();
  double sum = 0.0;
  for (std::size_t m = 0; m < ca.size(); ++m) sum += (ca[m] * std::conj(cb[m])).real();
  return sum * a.grid().length();
}

ComcomSides comcom_sides(const SpectralState& f, const SpectralState& g, long N) {
  require_same_grid(f.grid(), g.grid(), "comcom");
  require_commutator_band(f.grid(), N);
  const auto F = project(f, ProjectorKind::P_ll_N, N);
  const auto PNg = project(g, ProjectorKind::P_N, N);
  const auto Pt = project(g, ProjectorKind::tilde_P_N, N);
  ComcomSides sides;
  sides.lhs = pairing(commutator_with(F, g, N), PNg);
  sides.rhs = 0.5 * pairing(double_commutator_with(F, Pt, N), Pt);
  return sides;
}

double comcom_residual(const SpectralState& f, const SpectralState& g, long N) {
  const auto sides = comcom_sides(f, g, N);
  const double denom = std::max({std::abs(sides.lhs), std::abs(sides.rhs), DBL_MIN});
  return std::abs(sides.lhs - sides.rhs) / denom;
}

double resonance_omega3(double xi1, double xi2, double xi3, double tau1, double tau2,
                        double tau3) {
  // Extended precision keeps the cancellation between cubes below 1e-12 relative.
  using ld = long double;
  const auto sigma = [](ld tau, ld xi) { return tau - xi * xi * xi; };
  const ld t1 = tau1, t2 = tau2, t3 = tau3;
  const ld x1 = xi1, x2 = xi2, x3 = xi3;
  const ld total = sigma(-(t1 + t2 + t3), -(x1 + x2 + x3)) + sigma(t1, x1) + sigma(t2, x2) +
                   sigma(t3, x3);
  return static_cast<double>(total);
}

}  // namespace gkdv
