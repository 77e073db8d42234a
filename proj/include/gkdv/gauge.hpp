#pragma once

// Change of unknown V(t, y) = h(t, X) u(t, X) with X = A^{-1}(t, y) and
// A(t, x) = int_0^x alpha^{-1/3}. It turns
//   u_t + alpha u_xxx + beta u_xx + gamma u_x + delta u = eps u u_x
// into
//   v_t + v_yyy - b v_yy + c v_y + d v = e v v_y + f v^2.
//
// The weight h defaults to
//   h = (alpha(t,0)/alpha)^{1/3} exp(1/3 int_0^x beta1/alpha),
// which makes b = -beta2 alpha^{-2/3} >= 0. GaugeWeight::unit keeps h = 1 and
// only straightens the dispersion; b is then alpha^{-2/3}(alpha_x - beta).

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gkdv/coefficients.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv {

enum class GaugeWeight { standard, unit };

/// Closed-form trees shared by every time slice of one coefficient set.
struct GaugeFields {
  CoefficientSet set;
  GaugeWeight weight = GaugeWeight::standard;
  CoefficientExpr a13 = CoefficientExpr::constant(1.0);    // alpha^{-1/3}
  CoefficientExpr a13_t = CoefficientExpr::constant(0.0);  // d_t alpha^{-1/3}
  CoefficientExpr r = CoefficientExpr::constant(0.0);      // h_x / h
  CoefficientExpr r_x = CoefficientExpr::constant(0.0);
  CoefficientExpr r_2x = CoefficientExpr::constant(0.0);
  CoefficientExpr r1 = CoefficientExpr::constant(0.0);     // beta1 / alpha
  CoefficientExpr r1_t = CoefficientExpr::constant(0.0);
  CoefficientExpr b = CoefficientExpr::constant(0.0);      // in source coordinates
  CoefficientExpr b_y = CoefficientExpr::constant(0.0);    // image-coordinate derivatives
  CoefficientExpr b_yy = CoefficientExpr::constant(0.0);
  CoefficientExpr c_local = CoefficientExpr::constant(0.0);  // c without A_t
  CoefficientExpr d_local = CoefficientExpr::constant(0.0);  // d without -h_t/h
  CoefficientExpr e_local = CoefficientExpr::constant(0.0);  // e * h
  CoefficientExpr f_local = CoefficientExpr::constant(0.0);  // f * h

  bool time_dependent() const;
};

std::shared_ptr<const GaugeFields> make_gauge_fields(const CoefficientSet& set,
                                                     GaugeWeight weight = GaugeWeight::standard);

class GaugeMap {
public:
  /// Throws CoercivityError if alpha < alpha0 on the source grid at time t.
  GaugeMap(std::shared_ptr<const GaugeFields> fields, double t, const Grid& source,
           const Grid& image);
  GaugeMap(const CoefficientSet& set, double t, const Grid& source, const Grid& image,
           GaugeWeight weight = GaugeWeight::standard);

  double t() const noexcept { return t_; }
  const Grid& source_grid() const noexcept { return source_; }
  const Grid& image_grid() const noexcept { return image_; }
  const GaugeFields& fields() const noexcept { return *fields_; }

  // Source-node samples.
  const std::vector<double>& A_samples() const noexcept { return A_; }
  const std::vector<double>& A_t_samples() const noexcept { return A_t_; }
  const std::vector<double>& h_samples() const noexcept { return h_; }
  const std::vector<double>& h_x() const noexcept { return h_x_; }
  const std::vector<double>& h_2x() const noexcept { return h_2x_; }
  const std::vector<double>& h_3x() const noexcept { return h_3x_; }
  /// A^{-1} at the image nodes. Nodes beyond [A(-L), A(L)] pull back outside the box.
  const std::vector<double>& A_inverse_samples() const noexcept { return A_inv_; }

  /// Closed-form values at any real x (the integrals continue past the box).
  double A(double x) const;
  double A_t(double x) const;
  double h(double x) const;
  /// h_t / h.
  double h_t_over_h(double x) const;

  double A_lower() const noexcept { return A_lo_; }
  double A_upper() const noexcept { return A_hi_; }

  /// x with |A(x) - y| < 1e-11 for any real y: bracketing plus Newton with A' = alpha^{-1/3}.
  double solve(double y) const;

private:
  std::shared_ptr<const GaugeFields> fields_;
  double t_;
  Grid source_;
  Grid image_;
  std::shared_ptr<const AnchoredIntegral> int_a13_;
  std::shared_ptr<const AnchoredIntegral> int_a13_t_;
  std::shared_ptr<const AnchoredIntegral> int_r1_;
  std::shared_ptr<const AnchoredIntegral> int_r1_t_;
  double alpha_origin_ = 1.0;
  double alpha_t_origin_ = 0.0;
  std::vector<double> A_, A_t_, h_, h_x_, h_2x_, h_3x_, A_inv_;
  double A_lo_ = 0.0;
  double A_hi_ = 0.0;
};

/// A(t, x_j) and A_t(t, x_j) on the grid nodes.
std::pair<std::vector<double>, std::vector<double>> compute_A(const CoefficientExpr& alpha,
                                                              double t, const Grid& grid);

/// x with A(x) = y. Throws RangeError when y is outside [A(-L), A(L)].
double invert_A(const GaugeMap& map, double y);

struct GaugeWeightSamples {
  std::vector<double> h, h_x, h_2x, h_3x;
};

GaugeWeightSamples compute_h(const CoefficientExpr& alpha, const CoefficientExpr& beta1, double t,
                             const Grid& grid);

/// Fields of the transformed equation sampled on the image grid at one time.
struct TransformedCoefficients {
  Grid grid;
  double t = 0.0;
  std::vector<double> b, c, d, e, f;
  std::vector<double> b_x, b_2x;

  explicit TransformedCoefficients(const Grid& g) : grid(g) {}
  bool all_zero_except_e() const;
};

TransformedCoefficients transform_coefficients(const GaugeMap& map);

/// Fixed image grid covering A(t, [-L, L]) for t in [0, T], padded by 5%, same n.
Grid make_image_grid(const CoefficientSet& set, const Grid& source, double T, int t_samples);

/// v on the image grid. Throws SupportOverflow when u carries more than
/// `max_edge_fraction` of its L^2 mass in the outer tenth of the box.
SpectralState forward_transform(const SpectralState& u, const GaugeMap& map,
                                double max_edge_fraction = 1e-2);
/// u on the source grid.
SpectralState inverse_transform(const SpectralState& v, const GaugeMap& map,
                                double max_edge_fraction = 1e-2);

/// Columns x, A, A_inv, h, h_x, h_2x, h_3x, b, c, d, e, f; row j holds source node j
/// for the A/h columns and image node j for A_inv and the transformed fields.
void write_gauge_csv(std::ostream& os, const GaugeMap& map, const TransformedCoefficients& coeffs);

}  // namespace gkdv
