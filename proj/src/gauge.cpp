#include "gkdv/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "gkdv/error.hpp"

namespace gkdv {

bool GaugeFields::time_dependent() const {
  for (const auto* e : {&set.alpha, &set.beta, &set.gamma, &set.delta, &set.epsilon, &set.beta1,
                        &set.beta2}) {
    if (e->depends_on_t()) return true;
  }
  return false;
}

std::shared_ptr<const GaugeFields> make_gauge_fields(const CoefficientSet& set,
                                                     GaugeWeight weight) {
  auto F = std::make_shared<GaugeFields>();
  F->set = set;
  F->weight = weight;
  const auto& al = set.alpha;
  const auto& be = set.beta;
  const auto al_x = al.dx();
  const auto al_2x = al_x.dx();
  F->a13 = pow(al, -1.0 / 3.0);
  F->a13_t = F->a13.dt();
  F->r1 = set.beta1 / al;
  F->r1_t = F->r1.dt();
  if (weight == GaugeWeight::standard) F->r = (set.beta1 - al_x) / (3.0 * al);
  F->r_x = F->r.dx();
  F->r_2x = F->r_x.dx();
  const auto& r = F->r;
  const auto q2 = r * r + F->r_x;
  const auto q3 = r * r * r + 3.0 * r * F->r_x + F->r_2x;
  const auto a3 = pow(al, 1.0 / 3.0);

  F->b = a3 * (-be / al + al_x / al + 3.0 * r);
  // d/dy = alpha^{1/3} d/dx at the pulled-back point.
  F->b_y = a3 * F->b.dx();
  F->b_yy = a3 * F->b_y.dx();
  F->c_local = F->a13 * (6.0 * r * r * al + (4.0 / 9.0) * al_x * al_x / al + al_x * r -
                         3.0 * q2 * al - (1.0 / 3.0) * al_2x - 2.0 * r * be -
                         (1.0 / 3.0) * al_x * be / al + set.gamma);
  F->d_local = al * (-6.0 * r * r * r + 6.0 * q2 * r - q3) + be * (2.0 * r * r - q2) -
               set.gamma * r + set.delta;
  F->e_local = set.epsilon * F->a13;
  F->f_local = -(set.epsilon * r);
  return F;
}

GaugeMap::GaugeMap(const CoefficientSet& set, double t, const Grid& source, const Grid& image,
                   GaugeWeight weight)
    : GaugeMap(make_gauge_fields(set, weight), t, source, image) {}

GaugeMap::GaugeMap(std::shared_ptr<const GaugeFields> fields, double t, const Grid& source,
                   const Grid& image)
    : fields_(std::move(fields)), t_(t), source_(source), image_(image) {
  const auto& F = *fields_;
  require_coercive(F.set, source_, t_);
  const auto at_t = [t](const CoefficientExpr& e) {
    return [&e, t](double x) { return e.eval(t, x); };
  };
  int_a13_ = std::make_shared<AnchoredIntegral>(source_, at_t(F.a13));
  int_a13_t_ = std::make_shared<AnchoredIntegral>(source_, at_t(F.a13_t));
  if (F.weight == GaugeWeight::standard) {
    int_r1_ = std::make_shared<AnchoredIntegral>(source_, at_t(F.r1));
    int_r1_t_ = std::make_shared<AnchoredIntegral>(source_, at_t(F.r1_t));
  }
  alpha_origin_ = F.set.alpha.eval(t_, 0.0);
  alpha_t_origin_ = F.set.alpha.eval(t_, 0.0, 1, 0);

  const std::size_t n = source_.size();
  const auto& tab = int_a13_->table();
  A_.assign(tab.begin(), tab.begin() + static_cast<std::ptrdiff_t>(n));
  A_lo_ = tab.front();
  A_hi_ = tab.back();
  const auto& tab_t = int_a13_t_->table();
  A_t_.assign(tab_t.begin(), tab_t.begin() + static_cast<std::ptrdiff_t>(n));

  h_.resize(n);
  h_x_.resize(n);
  h_2x_.resize(n);
  h_3x_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = source_.node(j);
    const double hv = h(x);
    const double r = F.r.eval(t_, x);
    const double rx = F.r_x.eval(t_, x);
    const double r2x = F.r_2x.eval(t_, x);
    h_[j] = hv;
    h_x_[j] = hv * r;
    h_2x_[j] = hv * (r * r + rx);
    h_3x_[j] = hv * (r * r * r + 3.0 * r * rx + r2x);
  }
  for (std::size_t j = 1; j < n; ++j) {
    if (!(A_[j] > A_[j - 1])) throw CoercivityError("straightening map is not increasing");
  }

  A_inv_.resize(image_.size());
  for (std::size_t j = 0; j < image_.size(); ++j) A_inv_[j] = solve(image_.node(j));
}

double GaugeMap::A(double x) const { return (*int_a13_)(x); }
double GaugeMap::A_t(double x) const { return (*int_a13_t_)(x); }

double GaugeMap::h(double x) const {
  if (fields_->weight == GaugeWeight::unit) return 1.0;
  const double a = fields_->set.alpha.eval(t_, x);
  return std::cbrt(alpha_origin_ / a) * std::exp((*int_r1_)(x) / 3.0);
}

double GaugeMap::h_t_over_h(double x) const {
  if (fields_->weight == GaugeWeight::unit) return 0.0;
  const auto& al = fields_->set.alpha;
  const double a = al.eval(t_, x);
  const double a_t = al.eval(t_, x, 1, 0);
  return (alpha_t_origin_ / alpha_origin_ - a_t / a) / 3.0 + (*int_r1_t_)(x) / 3.0;
}

double GaugeMap::solve(double y) const {
  const double L = source_.half_width();
  const double dx = source_.dx();
  const std::size_t n = source_.size();
  const auto& tab = int_a13_->table();
  double lo = 0.0, hi = 0.0, f_lo = 0.0, f_hi = 0.0;
  if (y >= A_lo_ && y <= A_hi_) {
    const auto it = std::upper_bound(tab.begin(), tab.end(), y);
    std::size_t j = it == tab.begin() ? 0 : static_cast<std::size_t>(it - tab.begin()) - 1;
    j = std::min(j, n - 1);
    lo = source_.node(j);
    hi = j + 1 == n ? L : source_.node(j + 1);
    f_lo = tab[j] - y;
    f_hi = tab[j + 1] - y;
  } else if (y > A_hi_) {
    double step = dx;
    lo = L;
    f_lo = A_hi_ - y;
    hi = L + step;
    f_hi = A(hi) - y;
    while (f_hi < 0.0) {
      lo = hi;
      f_lo = f_hi;
      step *= 2.0;
      hi += step;
      f_hi = A(hi) - y;
    }
  } else {
    double step = dx;
    hi = -L;
    f_hi = A_lo_ - y;
    lo = -L - step;
    f_lo = A(lo) - y;
    while (f_lo > 0.0) {
      hi = lo;
      f_hi = f_lo;
      step *= 2.0;
      lo -= step;
      f_lo = A(lo) - y;
    }
  }
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  double x = lo + (hi - lo) * (-f_lo) / (f_hi - f_lo);
  for (int it = 0; it < 100; ++it) {
    const double fx = A(x) - y;
    if (fx == 0.0) return x;
    if (fx < 0.0) lo = x;
    else hi = x;
    double next = x - fx / fields_->a13.eval(t_, x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * (1.0 + std::abs(x))) return next;
    x = next;
  }
  return x;
}

std::pair<std::vector<double>, std::vector<double>> compute_A(const CoefficientExpr& alpha,
                                                              double t, const Grid& grid) {
  for (double x : grid.nodes()) {
    if (!(alpha.eval(t, x) > 0.0)) throw CoercivityError("alpha must be positive for the gauge");
  }
  const auto a13 = pow(alpha, -1.0 / 3.0);
  const auto a13_t = a13.dt();
  const AnchoredIntegral A(grid, [&](double x) { return a13.eval(t, x); });
  const AnchoredIntegral At(grid, [&](double x) { return a13_t.eval(t, x); });
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  return {std::vector<double>(A.table().begin(), A.table().begin() + n),
          std::vector<double>(At.table().begin(), At.table().begin() + n)};
}

double invert_A(const GaugeMap& map, double y) {
  if (!(y >= map.A_lower() && y <= map.A_upper())) {
    throw RangeError("y = " + std::to_string(y) + " outside the sampled range of A [" +
                     std::to_string(map.A_lower()) + ", " + std::to_string(map.A_upper()) + "]");
  }
  return map.solve(y);
}

GaugeWeightSamples compute_h(const CoefficientExpr& alpha, const CoefficientExpr& beta1, double t,
                             const Grid& grid) {
  CoefficientSet set;
  set.alpha = alpha;
  set.beta = beta1;
  set.beta1 = beta1;
  set.alpha0 = std::numeric_limits<double>::min();
  const GaugeMap map(set, t, grid, grid, GaugeWeight::standard);
  return {map.h_samples(), map.h_x(), map.h_2x(), map.h_3x()};
}

bool TransformedCoefficients::all_zero_except_e() const {
  for (const auto* v : {&b, &c, &d, &f}) {
    for (double x : *v) {
      if (x != 0.0) return false;
    }
  }
  return true;
}

TransformedCoefficients transform_coefficients(const GaugeMap& map) {
  const auto& F = map.fields();
  const Grid& g = map.image_grid();
  const double t = map.t();
  const std::size_t n = g.size();
  TransformedCoefficients tc(g);
  tc.t = t;
  for (auto* v : {&tc.b, &tc.c, &tc.d, &tc.e, &tc.f, &tc.b_x, &tc.b_2x}) v->resize(n);
  const auto& X = map.A_inverse_samples();
  for (std::size_t j = 0; j < n; ++j) {
    const double x = X[j];
    const double hv = map.h(x);
    tc.b[j] = F.b.eval(t, x);
    tc.b_x[j] = F.b_y.eval(t, x);
    tc.b_2x[j] = F.b_yy.eval(t, x);
    tc.c[j] = map.A_t(x) + F.c_local.eval(t, x);
    tc.d[j] = F.d_local.eval(t, x) - map.h_t_over_h(x);
    tc.e[j] = F.e_local.eval(t, x) / hv;
    tc.f[j] = F.f_local.eval(t, x) / hv;
  }
  return tc;
}

Grid make_image_grid(const CoefficientSet& set, const Grid& source, double T, int t_samples) {
  const auto a13 = pow(set.alpha, -1.0 / 3.0);
  double reach = 0.0;
  for (double t : sample_times(T, t_samples)) {
    const AnchoredIntegral A(source, [&](double x) { return a13.eval(t, x); });
    reach = std::max({reach, std::abs(A.table().front()), std::abs(A.table().back())});
  }
  return Grid(1.05 * reach, source.size());
}

namespace {

void check_edge(const SpectralState& s, double max_edge_fraction, const char* what) {
  const double frac = edge_mass_fraction(s, 0.1);
  if (frac > max_edge_fraction) {
    throw SupportOverflow(std::string(what) + ": " + std::to_string(frac) +
                          " of the L2 mass lies in the outer tenth of the box");
  }
}

}  // namespace

SpectralState forward_transform(const SpectralState& u, const GaugeMap& map,
                                double max_edge_fraction) {
  require_same_grid(u.grid(), map.source_grid(), "forward_transform");
  check_edge(u, max_edge_fraction, "forward_transform");
  const Grid& src = map.source_grid();
  const double L = src.half_width();
  const auto& X = map.A_inverse_samples();
  std::vector<std::size_t> inside;
  std::vector<double> pts;
  for (std::size_t j = 0; j < X.size(); ++j) {
    if (X[j] >= -L && X[j] < L) {
      inside.push_back(j);
      pts.push_back(X[j]);
    }
  }
  const auto vals = interpolate(u, pts);
  std::vector<double> v(map.image_grid().size(), 0.0);
  for (std::size_t i = 0; i < inside.size(); ++i) v[inside[i]] = map.h(pts[i]) * vals[i];
  return SpectralState::from_samples(map.image_grid(), v);
}

SpectralState inverse_transform(const SpectralState& v, const GaugeMap& map,
                                double max_edge_fraction) {
  require_same_grid(v.grid(), map.image_grid(), "inverse_transform");
  check_edge(v, max_edge_fraction, "inverse_transform");
  const double Ly = map.image_grid().half_width();
  const auto& A = map.A_samples();
  std::vector<std::size_t> inside;
  std::vector<double> pts;
  for (std::size_t j = 0; j < A.size(); ++j) {
    if (A[j] >= -Ly && A[j] < Ly) {
      inside.push_back(j);
      pts.push_back(A[j]);
    }
  }
  const auto vals = interpolate(v, pts);
  std::vector<double> u(map.source_grid().size(), 0.0);
  for (std::size_t i = 0; i < inside.size(); ++i) {
    u[inside[i]] = vals[i] / map.h_samples()[inside[i]];
  }
  return SpectralState::from_samples(map.source_grid(), u);
}

void write_gauge_csv(std::ostream& os, const GaugeMap& map, const TransformedCoefficients& tc) {
  const auto prec = os.precision(17);
  os << "x,A,A_inv,h,h_x,h_2x,h_3x,b,c,d,e,f\n";
  const auto& src = map.source_grid();
  for (std::size_t j = 0; j < src.size(); ++j) {
    os << src.node(j) << ',' << map.A_samples()[j] << ',' << map.A_inverse_samples()[j] << ','
       << map.h_samples()[j] << ',' << map.h_x()[j] << ',' << map.h_2x()[j] << ','
       << map.h_3x()[j] << ',' << tc.b[j] << ',' << tc.c[j] << ',' << tc.d[j] << ',' << tc.e[j]
       << ',' << tc.f[j] << '\n';
  }
  os.precision(prec);
}

}  // namespace gkdv
