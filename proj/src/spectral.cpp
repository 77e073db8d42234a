#include "gkdv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gkdv/error.hpp"
#include "gkdv/fft.hpp"

namespace gkdv {
namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// (-1)^slot accounts for the box starting at -L instead of 0.
double slot_sign(std::size_t slot) { return (slot % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

Grid::Grid(double half_width, std::size_t num_points) : half_width_(half_width), n_(num_points) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw SizingError("grid half_width must be positive and finite, got " +
                      std::to_string(half_width));
  }
  if (!is_power_of_two(num_points)) {
    throw SizingError("grid num_points must be a power of two, got " +
                      std::to_string(num_points));
  }
  if (num_points < 16) {
    throw SizingError("grid num_points must be at least 16, got " + std::to_string(num_points));
  }
}

double Grid::k_unit() const noexcept { return std::numbers::pi / half_width_; }

std::vector<double> Grid::nodes() const {
  std::vector<double> x(n_);
  for (std::size_t j = 0; j < n_; ++j) x[j] = node(j);
  return x;
}

std::vector<double> Grid::wavenumbers() const {
  std::vector<double> k(n_);
  for (std::size_t j = 0; j < n_; ++j) k[j] = wavenumber(j);
  return k;
}

double Grid::fold(double x) const noexcept {
  const double len = length();
  double y = std::fmod(x + half_width_, len);
  if (y < 0.0) y += len;
  return y - half_width_;
}

Grid make_grid(double half_width, std::size_t num_points) { return Grid(half_width, num_points); }

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw GridMismatch(std::string(what) + ": operands live on different grids");
}

void samples_to_coefficients(const Grid& grid, std::span<const cplx> samples,
                             std::span<cplx> coefficients) {
  fft::forward(samples, coefficients);
  const double inv_n = 1.0 / static_cast<double>(grid.size());
  for (std::size_t m = 0; m < coefficients.size(); ++m) coefficients[m] *= slot_sign(m) * inv_n;
}

void coefficients_to_samples(const Grid& /*grid*/, std::span<const cplx> coefficients,
                             std::span<cplx> samples) {
  std::vector<cplx> tmp(coefficients.begin(), coefficients.end());
  for (std::size_t m = 0; m < tmp.size(); ++m) tmp[m] *= slot_sign(m);
  fft::inverse(tmp, samples);
}

// ---------------------------------------------------------------------------

SpectralState::SpectralState(const Grid& grid, std::vector<cplx> coefficients, bool is_real_field)
    : grid_(grid), coeffs_(std::move(coefficients)), real_(is_real_field) {
  if (coeffs_.size() != grid_.size()) {
    throw SizingError("coefficient count does not match grid size");
  }
}

SpectralState SpectralState::from_samples(const Grid& grid, std::span<const double> samples) {
  if (samples.size() != grid.size()) throw SizingError("sample count does not match grid size");
  std::vector<cplx> values(samples.begin(), samples.end());
  std::vector<cplx> coeffs(grid.size());
  samples_to_coefficients(grid, values, coeffs);
  // Enforce exact conjugate symmetry; the Nyquist coefficient of a real field is real.
  const std::size_t n = grid.size();
  for (std::size_t m = 1; m < n / 2; ++m) {
    const cplx avg = 0.5 * (coeffs[m] + std::conj(coeffs[n - m]));
    coeffs[m] = avg;
    coeffs[n - m] = std::conj(avg);
  }
  coeffs[0] = coeffs[0].real();
  coeffs[n / 2] = coeffs[n / 2].real();
  return SpectralState(grid, std::move(coeffs), true);
}

SpectralState SpectralState::from_complex_samples(const Grid& grid, std::span<const cplx> samples) {
  if (samples.size() != grid.size()) throw SizingError("sample count does not match grid size");
  std::vector<cplx> coeffs(grid.size());
  samples_to_coefficients(grid, samples, coeffs);
  return SpectralState(grid, std::move(coeffs), false);
}

SpectralState SpectralState::zero(const Grid& grid) {
  return SpectralState(grid, std::vector<cplx>(grid.size()), true);
}

std::vector<cplx> SpectralState::complex_samples() const {
  std::vector<cplx> out(grid_.size());
  coefficients_to_samples(grid_, coeffs_, out);
  return out;
}

std::vector<double> SpectralState::samples() const {
  const auto c = complex_samples();
  std::vector<double> out(c.size());
  std::transform(c.begin(), c.end(), out.begin(), [](cplx z) { return z.real(); });
  return out;
}

double SpectralState::hermitian_defect() const {
  const std::size_t n = coeffs_.size();
  double scale = 0.0;
  for (const auto& c : coeffs_) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return 0.0;
  double worst = std::abs(coeffs_[0].imag());
  for (std::size_t m = 1; m < n; ++m) {
    worst = std::max(worst, std::abs(coeffs_[n - m] - std::conj(coeffs_[m])));
  }
  return worst / scale;
}

SpectralState& SpectralState::operator+=(const SpectralState& other) {
  require_same_grid(grid_, other.grid_, "SpectralState::operator+=");
  for (std::size_t m = 0; m < coeffs_.size(); ++m) coeffs_[m] += other.coeffs_[m];
  real_ = real_ && other.real_;
  return *this;
}

SpectralState& SpectralState::operator-=(const SpectralState& other) {
  require_same_grid(grid_, other.grid_, "SpectralState::operator-=");
  for (std::size_t m = 0; m < coeffs_.size(); ++m) coeffs_[m] -= other.coeffs_[m];
  real_ = real_ && other.real_;
  return *this;
}

SpectralState& SpectralState::operator*=(double factor) {
  for (auto& c : coeffs_) c *= factor;
  return *this;
}

SpectralState operator+(SpectralState a, const SpectralState& b) { return a += b; }
SpectralState operator-(SpectralState a, const SpectralState& b) { return a -= b; }
SpectralState operator*(double factor, SpectralState a) { return a *= factor; }

// ---------------------------------------------------------------------------

SpectralState derivative(const SpectralState& state, int order) {
  if (order < 1) throw InvalidArgument("derivative order must be >= 1");
  const Grid& g = state.grid();
  std::vector<cplx> out(state.coefficients().begin(), state.coefficients().end());
  for (std::size_t m = 0; m < out.size(); ++m) {
    const cplx ik(0.0, g.wavenumber(m));
    out[m] *= std::pow(ik, order);
  }
  if (state.is_real_field()) out[g.nyquist_index()] = 0.0;
  return SpectralState(g, std::move(out), state.is_real_field());
}

double sobolev_norm(const SpectralState& state, double s) {
  const Grid& g = state.grid();
  double sum = 0.0;
  const auto c = state.coefficients();
  for (std::size_t m = 0; m < c.size(); ++m) {
    const double k = g.wavenumber(m);
    sum += std::pow(1.0 + k * k, s) * std::norm(c[m]);
  }
  return std::sqrt(sum * g.length());
}

double l2_norm(const SpectralState& state) { return sobolev_norm(state, 0.0); }

double quadrature_l2_norm(const Grid& grid, std::span<const double> samples) {
  double sum = 0.0;
  for (double v : samples) sum += v * v;
  return std::sqrt(sum * grid.dx());
}

double sup_norm(const SpectralState& state) {
  double m = 0.0;
  for (const auto& z : state.complex_samples()) {
    m = std::max(m, state.is_real_field() ? std::abs(z.real()) : std::abs(z));
  }
  return m;
}

double mass(const SpectralState& state) {
  return state.coefficients()[0].real() * state.grid().length();
}

std::vector<cplx> interpolate_complex(const SpectralState& state,
                                      std::span<const double> query_points) {
  const Grid& g = state.grid();
  const auto c = state.coefficients();
  const std::size_t n = g.size();
  const auto half = static_cast<long>(n / 2);
  std::vector<cplx> out(query_points.size());
  for (std::size_t q = 0; q < query_points.size(); ++q) {
    const double x = g.fold(query_points[q]);
    const double theta = g.k_unit() * x;
    const cplx step = std::polar(1.0, theta);
    cplx acc = 0.0;
    cplx w;
    // Ascending powers m = -n/2 .. n/2-1, reseeded periodically to bound drift.
    for (long m = -half; m < half; ++m) {
      if ((m + half) % 64 == 0) {
        w = std::polar(1.0, theta * static_cast<double>(m));
      }
      const std::size_t slot = m >= 0 ? static_cast<std::size_t>(m)
                                      : static_cast<std::size_t>(m + static_cast<long>(n));
      acc += c[slot] * w;
      w *= step;
    }
    out[q] = acc;
  }
  return out;
}

std::vector<double> interpolate(const SpectralState& state, std::span<const double> query_points) {
  const auto z = interpolate_complex(state, query_points);
  std::vector<double> out(z.size());
  // For real fields Re(c_nyq e^{-iKx}) = c_nyq cos(Kx): the symmetric Nyquist treatment.
  std::transform(z.begin(), z.end(), out.begin(), [](cplx v) { return v.real(); });
  return out;
}

bool is_dealias_retained(const Grid& grid, std::size_t slot) noexcept {
  return std::abs(grid.wavenumber(slot)) <= (2.0 / 3.0) * grid.k_max();
}

SpectralState dealias(const SpectralState& state) {
  const Grid& g = state.grid();
  std::vector<cplx> out(state.coefficients().begin(), state.coefficients().end());
  for (std::size_t m = 0; m < out.size(); ++m) {
    if (!is_dealias_retained(g, m)) out[m] = 0.0;
  }
  return SpectralState(g, std::move(out), state.is_real_field());
}

SpectralState dealiased_product(const SpectralState& a, const SpectralState& b) {
  require_same_grid(a.grid(), b.grid(), "dealiased_product");
  const Grid& g = a.grid();
  auto ua = a.complex_samples();
  const auto ub = b.complex_samples();
  const bool real = a.is_real_field() && b.is_real_field();
  for (std::size_t j = 0; j < ua.size(); ++j) {
    ua[j] = real ? cplx(ua[j].real() * ub[j].real(), 0.0) : ua[j] * ub[j];
  }
  std::vector<cplx> coeffs(g.size());
  samples_to_coefficients(g, ua, coeffs);
  return dealias(SpectralState(g, std::move(coeffs), real));
}

double edge_mass_fraction(const SpectralState& state, double edge_fraction) {
  const Grid& g = state.grid();
  const auto z = state.complex_samples();
  const double inner = (1.0 - edge_fraction) * g.half_width();
  double total = 0.0, edge = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    const double w = std::norm(z[j]);
    total += w;
    if (std::abs(g.node(j)) >= inner) edge += w;
  }
  return total > 0.0 ? edge / total : 0.0;
}

}  // namespace gkdv
