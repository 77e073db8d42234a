#pragma once

// Dyadic frequency projectors built from a fixed smooth even bump eta,
// the norms defined through them, and the commutator operators used by
// the energy method.
//
// Conventions: N ranges over {1, 2, 4, ...}; phi_1 = eta and
// phi_N(xi) = eta(xi/N) - eta(2 xi/N) for N >= 2, so sum_N phi_N = 1.
// P_{<<N} is P_{<=N/8}; it is the zero operator when N < 8.

#include <span>
#include <vector>

#include "gkdv/spectral.hpp"
#include "gkdv/trajectory.hpp"

namespace gkdv {

/// eta(xi): 1 on [-1,1], 0 outside [-2,2], exp-based C-infinity transition.
double bump_eta(double xi);

/// Symbol of P_N evaluated at xi (N dyadic).
double dyadic_symbol(long N, double xi);

enum class ProjectorKind { P_N, P_leq_N, P_ll_N, P_geq_N, tilde_P_N };

class DyadicProjector {
public:
  /// Throws InvalidArgument unless N is a power of two >= 1.
  DyadicProjector(const Grid& grid, ProjectorKind kind, long N);

  const Grid& grid() const noexcept { return grid_; }
  ProjectorKind kind() const noexcept { return kind_; }
  long level() const noexcept { return N_; }
  std::span<const double> symbol() const noexcept { return symbol_; }

  /// Symbol of this projector kind at an arbitrary frequency.
  static double symbol_at(ProjectorKind kind, long N, double xi);

private:
  Grid grid_;
  ProjectorKind kind_;
  long N_;
  std::vector<double> symbol_;
};

/// Dyadic levels whose bands meet the grid's resolved frequencies.
std::vector<long> dyadic_levels(const Grid& grid);

SpectralState project(const SpectralState& field, const DyadicProjector& projector);
SpectralState project(const SpectralState& field, ProjectorKind kind, long N);

/// sup_N N^s ||P_N v||_inf over the grid's dyadic levels.
double zygmund_norm(const SpectralState& field, double s);

/// -sum_N <N>^{2 theta} int b (P_N u_x)^2 dx at a single time; <N> = 1 + N.
double dyadic_dissipation(const SpectralState& u, std::span<const double> b_samples, double theta);

/// sum_N <N>^{2 theta} || sqrt(b) P_N u_x ||^2 over the trajectory (trapezoid in t).
/// `b_samples[i]` holds b on the grid at trajectory time i. Throws NegativeWeight.
double weighted_b_seminorm(const Trajectory& trajectory,
                           const std::vector<std::vector<double>>& b_samples, double theta);

/// Largest N for which commutator identities are free of truncation effects
/// (9N/4 inside the 2/3-rule band).
long max_commutator_level(const Grid& grid);

/// [P_N, P_{<<N} f] g = P_N(F g) - F P_N g with F = P_{<<N} f; products dealiased.
SpectralState commutator(const SpectralState& f, const SpectralState& g, long N);

/// [P_N, [P_N, P_{<<N} f]] g.
SpectralState double_commutator(const SpectralState& f, const SpectralState& g, long N);

/// Both sides of  int [P_N,F]g P_N g  =  1/2 int [P_N,[P_N,F]] P~_N g P~_N g.
struct ComcomSides {
  double lhs = 0.0;
  double rhs = 0.0;
};
ComcomSides comcom_sides(const SpectralState& f, const SpectralState& g, long N);

/// |lhs - rhs| / max(|lhs|, |rhs|, tiny).
double comcom_residual(const SpectralState& f, const SpectralState& g, long N);

/// sigma(-sum tau, -sum xi) + sum sigma(tau_i, xi_i) with sigma(tau, xi) = tau - xi^3.
/// Independent of the tau_i; equals (xi1+xi2+xi3)^3 - xi1^3 - xi2^3 - xi3^3.
double resonance_omega3(double xi1, double xi2, double xi3, double tau1 = 0.0, double tau2 = 0.0,
                        double tau3 = 0.0);

/// Real L^2 pairing int a b dx via Parseval.
double pairing(const SpectralState& a, const SpectralState& b);

}  // namespace gkdv
