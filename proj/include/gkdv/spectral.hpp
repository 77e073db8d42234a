#pragma once

// Uniform periodic grid and the Fourier representation of fields on it.
//
// The box is [-L, L) with n = 2^p nodes x_j = -L + j dx. Coefficients are
// stored in FFT order (m = 0, 1, ..., n/2-1, -n/2, ..., -1) and normalized
// so that u(x) = sum_m c_m exp(i k_m x) with k_m = m pi / L. Norms carry the
// box length, so they converge to the continuum values as n grows.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace gkdv {

using cplx = std::complex<double>;

class Grid {
public:
  /// Throws SizingError unless half_width > 0 and num_points is a power of two >= 16.
  Grid(double half_width, std::size_t num_points);

  double half_width() const noexcept { return half_width_; }
  double length() const noexcept { return 2.0 * half_width_; }
  std::size_t size() const noexcept { return n_; }
  double dx() const noexcept { return 2.0 * half_width_ / static_cast<double>(n_); }
  double node(std::size_t j) const noexcept {
    return -half_width_ + static_cast<double>(j) * dx();
  }
  std::vector<double> nodes() const;

  /// Wavenumber of FFT slot j; the Nyquist slot n/2 carries -n/2 * pi/L.
  double wavenumber(std::size_t j) const noexcept {
    const auto m = j < n_ / 2 ? static_cast<double>(j)
                              : static_cast<double>(j) - static_cast<double>(n_);
    return m * k_unit();
  }
  std::vector<double> wavenumbers() const;
  double k_unit() const noexcept;
  /// Largest resolved |k| (the Nyquist magnitude).
  double k_max() const noexcept { return static_cast<double>(n_ / 2) * k_unit(); }
  std::size_t nyquist_index() const noexcept { return n_ / 2; }

  /// Node index of x = 0 (always n/2).
  std::size_t origin_index() const noexcept { return n_ / 2; }

  /// Map x into [-L, L).
  double fold(double x) const noexcept;

  bool operator==(const Grid& other) const noexcept {
    return n_ == other.n_ && half_width_ == other.half_width_;
  }

private:
  double half_width_;
  std::size_t n_;
};

Grid make_grid(double half_width, std::size_t num_points);

/// Discrete Fourier representation of a (possibly complex) field on a Grid.
class SpectralState {
public:
  SpectralState(const Grid& grid, std::vector<cplx> coefficients, bool is_real_field);

  static SpectralState from_samples(const Grid& grid, std::span<const double> samples);
  static SpectralState from_complex_samples(const Grid& grid, std::span<const cplx> samples);
  static SpectralState zero(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const cplx> coefficients() const noexcept { return coeffs_; }
  std::vector<cplx>& mutable_coefficients() noexcept { return coeffs_; }
  bool is_real_field() const noexcept { return real_; }

  /// Physical samples; for real fields the imaginary round-off is dropped.
  std::vector<double> samples() const;
  std::vector<cplx> complex_samples() const;

  /// Largest |c(-k) - conj(c(k))| relative to the largest coefficient.
  double hermitian_defect() const;

  SpectralState& operator+=(const SpectralState& other);
  SpectralState& operator-=(const SpectralState& other);
  SpectralState& operator*=(double factor);

private:
  Grid grid_;
  std::vector<cplx> coeffs_;
  bool real_;
};

SpectralState operator+(SpectralState a, const SpectralState& b);
SpectralState operator-(SpectralState a, const SpectralState& b);
SpectralState operator*(double factor, SpectralState a);

/// Multiply coefficients by (i k)^order. The Nyquist mode of a real field is zeroed.
SpectralState derivative(const SpectralState& state, int order);

/// (sum_k (1 + k^2)^s |c_k|^2 * 2L)^{1/2}.
double sobolev_norm(const SpectralState& state, double s);
double l2_norm(const SpectralState& state);
/// Trapezoid L^2 norm of physical samples (Parseval-independent route).
double quadrature_l2_norm(const Grid& grid, std::span<const double> samples);
double sup_norm(const SpectralState& state);
/// integral of u over the box (2L * c_0).
double mass(const SpectralState& state);

/// Trigonometric interpolation at arbitrary points (folded into the box).
std::vector<double> interpolate(const SpectralState& state, std::span<const double> query_points);
std::vector<cplx> interpolate_complex(const SpectralState& state,
                                      std::span<const double> query_points);

/// 2/3-rule: zero every coefficient with |k| > (2/3) k_max.
SpectralState dealias(const SpectralState& state);
bool is_dealias_retained(const Grid& grid, std::size_t slot) noexcept;

/// Pointwise product in physical space followed by the 2/3-rule.
SpectralState dealiased_product(const SpectralState& a, const SpectralState& b);

/// Fraction of the L^2 mass located in the outer `edge_fraction` of the box.
double edge_mass_fraction(const SpectralState& state, double edge_fraction = 0.1);

/// Coefficients <-> physical samples in this module's normalization.
void samples_to_coefficients(const Grid& grid, std::span<const cplx> samples,
                             std::span<cplx> coefficients);
void coefficients_to_samples(const Grid& grid, std::span<const cplx> coefficients,
                             std::span<cplx> samples);

void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace gkdv
