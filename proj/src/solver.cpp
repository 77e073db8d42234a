#include "gkdv/solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <tuple>

#include "gkdv/error.hpp"
#include "gkdv/littlewood_paley.hpp"

namespace gkdv {
namespace {

using Vec = std::vector<cplx>;

// (ik)^order per slot with the Nyquist slot zeroed, cached per grid.
const Vec& multiplier(const Grid& g, int order) {
  static std::mutex mutex;
  static std::map<std::tuple<std::size_t, double, int>, Vec> cache;
  std::lock_guard lock(mutex);
  auto& m = cache[{g.size(), g.half_width(), order}];
  if (m.empty()) {
    m.resize(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
      m[j] = j == g.nyquist_index() ? cplx(0.0) : std::pow(cplx(0.0, g.wavenumber(j)), order);
    }
  }
  return m;
}

// Physical samples (real part) of a coefficient vector times (ik)^order.
std::vector<double> phys(const Grid& g, const Vec& c, int order) {
  const std::size_t n = g.size();
  Vec tmp(c);
  if (order > 0) {
    const auto& mult = multiplier(g, order);
    for (std::size_t m = 0; m < n; ++m) tmp[m] *= mult[m];
  }
  Vec out(n);
  coefficients_to_samples(g, tmp, out);
  std::vector<double> r(n);
  for (std::size_t j = 0; j < n; ++j) r[j] = out[j].real();
  return r;
}

Vec spec(const Grid& g, const std::vector<double>& r, bool dealias) {
  const std::size_t n = g.size();
  Vec in(n), out(n);
  for (std::size_t j = 0; j < n; ++j) in[j] = r[j];
  samples_to_coefficients(g, in, out);
  out[g.nyquist_index()] = 0.0;
  if (dealias) {
    for (std::size_t m = 0; m < n; ++m) {
      if (!is_dealias_retained(g, m)) out[m] = 0.0;
    }
  }
  // Real fields: enforce conjugate symmetry removed by round-off.
  for (std::size_t m = 1; m < n / 2; ++m) {
    const cplx a = 0.5 * (out[m] + std::conj(out[n - m]));
    out[m] = a;
    out[n - m] = std::conj(a);
  }
  out[0] = out[0].real();
  return out;
}

Vec transformed_rhs(const Grid& g, const Vec& v, const TransformedCoefficients& tc, bool dealias) {
  const auto u = phys(g, v, 0);
  const auto ux = phys(g, v, 1);
  const auto uxx = phys(g, v, 2);
  std::vector<double> r(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    r[j] = tc.b[j] * uxx[j] - tc.c[j] * ux[j] - tc.d[j] * u[j] + tc.e[j] * u[j] * ux[j] +
           tc.f[j] * u[j] * u[j];
  }
  return spec(g, r, dealias);
}

struct SampledSet {
  std::vector<double> alpha, beta, gamma, delta, epsilon;
};

SampledSet sample_set(const CoefficientSet& set, const Grid& g, double t) {
  const auto xs = g.nodes();
  return {set.alpha.sample(t, xs), set.beta.sample(t, xs), set.gamma.sample(t, xs),
          set.delta.sample(t, xs), set.epsilon.sample(t, xs)};
}

bool set_time_dependent(const CoefficientSet& set) {
  for (const auto* e : {&set.alpha, &set.beta, &set.gamma, &set.delta, &set.epsilon}) {
    if (e->depends_on_t()) return true;
  }
  return false;
}

// Samples the original coefficients, once when they are time-independent.
class OriginalSampler {
public:
  OriginalSampler(const CoefficientSet& set, const Grid& g)
      : set_(set), g_(g), dynamic_(set_time_dependent(set)) {
    if (!dynamic_) frozen_ = sample_set(set, g, 0.0);
  }
  const SampledSet& at(double t) {
    if (!dynamic_) return frozen_;
    if (!last_t_ || *last_t_ != t) {
      last_ = sample_set(set_, g_, t);
      last_t_ = t;
    }
    return last_;
  }

private:
  const CoefficientSet& set_;
  Grid g_;
  bool dynamic_;
  SampledSet frozen_, last_;
  std::optional<double> last_t_;
};

Vec original_rhs(const Grid& g, const Vec& u, const SampledSet& c, bool dealias) {
  const auto u0 = phys(g, u, 0);
  const auto u1 = phys(g, u, 1);
  const auto u2 = phys(g, u, 2);
  const auto u3 = phys(g, u, 3);
  std::vector<double> r(u0.size());
  for (std::size_t j = 0; j < r.size(); ++j) {
    r[j] = -c.alpha[j] * u3[j] - c.beta[j] * u2[j] - c.gamma[j] * u1[j] - c.delta[j] * u0[j] +
           c.epsilon[j] * u0[j] * u1[j];
  }
  return spec(g, r, dealias);
}

Vec axpy(const Vec& x, double a, const Vec& y) {
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * y[i];
  return out;
}

Vec if_rk4(const Grid& g, const Vec& v, double t, double dt, bool dealias,
           const std::function<const TransformedCoefficients&(double)>& coeffs) {
  const std::size_t n = g.size();
  Vec E(n), E2(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double k = g.wavenumber(m);
    E[m] = std::polar(1.0, k * k * k * dt / 2.0);
    E2[m] = E[m] * E[m];
  }
  auto N = [&](const Vec& w, double tt) {
    auto r = transformed_rhs(g, w, coeffs(tt), dealias);
    for (auto& z : r) z *= dt;
    return r;
  };
  const Vec a = N(v, t);
  Vec w(n);
  for (std::size_t m = 0; m < n; ++m) w[m] = E[m] * (v[m] + 0.5 * a[m]);
  const Vec b = N(w, t + dt / 2.0);
  for (std::size_t m = 0; m < n; ++m) w[m] = E[m] * v[m] + 0.5 * b[m];
  const Vec c = N(w, t + dt / 2.0);
  for (std::size_t m = 0; m < n; ++m) w[m] = E2[m] * v[m] + E[m] * c[m];
  const Vec d = N(w, t + dt);
  Vec out(n);
  for (std::size_t m = 0; m < n; ++m) {
    out[m] = E2[m] * v[m] + (E2[m] * a[m] + 2.0 * E[m] * (b[m] + c[m]) + d[m]) / 6.0;
  }
  return out;
}

Vec rk4_original(const Grid& g, const Vec& u, double t, double dt, bool dealias,
                 OriginalSampler& sampler) {
  const Vec k1 = original_rhs(g, u, sampler.at(t), dealias);
  const Vec k2 = original_rhs(g, axpy(u, dt / 2.0, k1), sampler.at(t + dt / 2.0), dealias);
  const Vec k3 = original_rhs(g, axpy(u, dt / 2.0, k2), sampler.at(t + dt / 2.0), dealias);
  const Vec k4 = original_rhs(g, axpy(u, dt, k3), sampler.at(t + dt), dealias);
  Vec out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    out[i] = u[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double rule_k(const Grid& g, bool dealias) { return (dealias ? 2.0 / 3.0 : 1.0) * g.k_max(); }

void record(Trajectory& tr, const SpectralState& st, double t) {
  tr.times.push_back(t);
  tr.states.push_back(st);
  NormRecord r;
  r.t = t;
  r.hs_norm = sobolev_norm(st, tr.s);
  r.l2_norm = l2_norm(st);
  r.sup_norm = sup_norm(st);
  r.mass = mass(st);
  tr.norms.push_back(r);
}

template <class Step>
Trajectory integrate(const SpectralState& u0, const SolverConfig& cfg, EquationForm form,
                     double dt_rule, Step&& step) {
  if (!(cfg.t_final > 0.0)) throw InvalidArgument("t_final must be positive");
  if (cfg.dt && !(*cfg.dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (cfg.monitor_stride < 1) throw InvalidArgument("monitor_stride must be >= 1");
  const double dt0 = std::min(cfg.dt ? *cfg.dt : dt_rule, cfg.t_final);
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(cfg.t_final / dt0 - 1e-9)));
  const double dt = cfg.t_final / static_cast<double>(steps);

  Trajectory tr(u0.grid());
  tr.form = form;
  tr.s = cfg.s;
  tr.dt = dt;
  const double sup0 = sup_norm(u0);
  const double cap = sup0 > 0.0 ? cfg.blowup_factor * sup0 : std::numeric_limits<double>::infinity();
  record(tr, u0, 0.0);

  const Grid& g = u0.grid();
  Vec c(u0.coefficients().begin(), u0.coefficients().end());
  for (std::size_t i = 1; i <= steps; ++i) {
    const double t = static_cast<double>(i - 1) * dt;
    c = step(c, t, dt);
    const double tn = static_cast<double>(i) * dt;
    tr.steps_taken = i;
    const auto samples = phys(g, c, 0);
    double sup = 0.0;
    bool finite = true;
    for (double x : samples) {
      if (!std::isfinite(x)) finite = false;
      sup = std::max(sup, std::abs(x));
    }
    const bool blown = !finite || sup > cap;
    if (blown || i % static_cast<std::size_t>(cfg.monitor_stride) == 0 || i == steps) {
      record(tr, SpectralState(g, c, true), tn);
    }
    if (blown) {
      tr.blowup_time = tn;
      break;
    }
  }
  return tr;
}

}  // namespace

// ---------------------------------------------------------------------------

TransformedProblem::TransformedProblem(TransformedCoefficients frozen) : grid_(frozen.grid) {
  Slice s;
  s.coeffs = std::make_shared<const TransformedCoefficients>(std::move(frozen));
  cache_.emplace(0.0, std::move(s));
}

TransformedProblem::TransformedProblem(std::shared_ptr<const GaugeFields> fields,
                                       const Grid& source, const Grid& image)
    : grid_(image), time_dependent_(fields->time_dependent()), fields_(std::move(fields)),
      source_(source) {}

const TransformedProblem::Slice& TransformedProblem::slice(double t) const {
  std::lock_guard lock(mutex_);
  if (!fields_) return cache_.begin()->second;
  // Stage times reached by different additions agree to round-off only.
  const double key = time_dependent_ ? std::round(t * 1e12) / 1e12 : 0.0;
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  Slice s;
  s.map = std::make_shared<const GaugeMap>(fields_, key, *source_, grid_);
  s.coeffs = std::make_shared<const TransformedCoefficients>(transform_coefficients(*s.map));
  // Stage times only move forward; keep a short window.
  while (cache_.size() >= 8) cache_.erase(cache_.begin());
  return cache_.emplace(key, std::move(s)).first->second;
}

std::shared_ptr<const TransformedCoefficients> TransformedProblem::at(double t) const {
  return slice(t).coeffs;
}

std::shared_ptr<const GaugeMap> TransformedProblem::map_at(double t) const {
  if (!fields_) throw InvalidArgument("problem was not generated by a gauge");
  return slice(t).map;
}

SpectralState step_transformed(const SpectralState& v, const TransformedCoefficients& coeffs,
                               double /*t*/, double dt, bool dealias) {
  require_same_grid(v.grid(), coeffs.grid, "step_transformed");
  Vec c(v.coefficients().begin(), v.coefficients().end());
  auto out = if_rk4(v.grid(), c, 0.0, dt, dealias,
                    [&](double) -> const TransformedCoefficients& { return coeffs; });
  return SpectralState(v.grid(), std::move(out), v.is_real_field());
}

SpectralState step_transformed(const SpectralState& v, const TransformedProblem& problem,
                               double t, double dt, bool dealias) {
  require_same_grid(v.grid(), problem.grid(), "step_transformed");
  Vec c(v.coefficients().begin(), v.coefficients().end());
  std::shared_ptr<const TransformedCoefficients> hold;
  auto out = if_rk4(v.grid(), c, t, dt, dealias,
                    [&](double tt) -> const TransformedCoefficients& {
                      hold = problem.at(tt);
                      return *hold;
                    });
  return SpectralState(v.grid(), std::move(out), v.is_real_field());
}

SpectralState step_original(const SpectralState& u, const CoefficientSet& set, double t,
                            double dt, bool dealias) {
  OriginalSampler sampler(set, u.grid());
  Vec c(u.coefficients().begin(), u.coefficients().end());
  auto out = rk4_original(u.grid(), c, t, dt, dealias, sampler);
  return SpectralState(u.grid(), std::move(out), u.is_real_field());
}

double auto_dt(const SpectralState& u0, const CoefficientSet& set, bool dealias) {
  const Grid& g = u0.grid();
  const auto c = sample_set(set, g, 0.0);
  const double k = rule_k(g, dealias);
  const double rate = max_abs(c.alpha) * k * k * k + max_abs(c.beta) * k * k +
                      max_abs(c.gamma) * k + max_abs(c.delta) +
                      max_abs(c.epsilon) * sup_norm(u0) * k;
  return rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
}

double auto_dt(const SpectralState& v0, const TransformedProblem& problem, bool dealias) {
  const auto tc = problem.at(0.0);
  const double k = rule_k(problem.grid(), dealias);
  const double amp = sup_norm(v0);
  const double rate = max_abs(tc->b) * k * k + max_abs(tc->c) * k + max_abs(tc->d) +
                      max_abs(tc->e) * amp * k + max_abs(tc->f) * amp;
  return rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
}

Trajectory solve(const SpectralState& u0, const SolverConfig& config, const CoefficientSet& set) {
  if (config.form != EquationForm::original) {
    throw InvalidArgument("a CoefficientSet problem is integrated in the original form");
  }
  OriginalSampler sampler(set, u0.grid());
  const Grid g = u0.grid();
  const bool dealias = config.dealias;
  return integrate(u0, config, EquationForm::original, auto_dt(u0, set, dealias),
                   [&](const Vec& c, double t, double dt) {
                     return rk4_original(g, c, t, dt, dealias, sampler);
                   });
}

Trajectory solve(const SpectralState& v0, const SolverConfig& config,
                 const TransformedProblem& problem) {
  if (config.form != EquationForm::transformed) {
    throw InvalidArgument("a TransformedProblem is integrated in the transformed form");
  }
  require_same_grid(v0.grid(), problem.grid(), "solve");
  const Grid g = v0.grid();
  const bool dealias = config.dealias;
  std::shared_ptr<const TransformedCoefficients> hold;
  auto coeffs = [&](double tt) -> const TransformedCoefficients& {
    hold = problem.at(tt);
    return *hold;
  };
  return integrate(v0, config, EquationForm::transformed, auto_dt(v0, problem, dealias),
                   [&](const Vec& c, double t, double dt) {
                     return if_rk4(g, c, t, dt, dealias, coeffs);
                   });
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> product(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> r(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) r[j] = a[j] * b[j];
  return r;
}

std::vector<double> dxn(const Grid& g, const std::vector<double>& f, int order) {
  return derivative(SpectralState::from_samples(g, f), order).samples();
}

double space_integral(const Grid& g, const std::vector<double>& f) {
  double s = 0.0;
  for (double x : f) s += x;
  return s * g.dx();
}

void check_support(const Trajectory& tr, const TestField& phi) {
  const Grid& g = tr.grid;
  const auto xs = g.nodes();
  double scale = 0.0;
  for (double t : tr.times) {
    for (double x : xs) scale = std::max(scale, std::abs(phi.value(t, x)));
  }
  const double tol = 1e-12 * std::max(scale, 1e-300);
  const double T = tr.t_final();
  for (double x : xs) {
    if (std::abs(phi.value(T, x)) > tol) {
      throw SupportViolation("test function does not vanish at t = T (x = " + std::to_string(x) +
                             ")");
    }
  }
  const double edge = 0.9 * g.half_width();
  for (double t : tr.times) {
    for (double x : xs) {
      if (std::abs(x) >= edge && std::abs(phi.value(t, x)) > tol) {
        throw SupportViolation("test function reaches the outer tenth of the box (t = " +
                               std::to_string(t) + ")");
      }
    }
  }
}

// Composite Simpson on uniform samples with an even number of intervals, trapezoid otherwise.
double time_integral(const std::vector<double>& t, const std::vector<double>& f) {
  const std::size_t m = t.size();
  if (m < 2) return 0.0;
  const double h = (t.back() - t.front()) / static_cast<double>(m - 1);
  bool uniform = true;
  for (std::size_t i = 1; i < m; ++i) {
    if (std::abs((t[i] - t[i - 1]) - h) > 1e-9 * std::max(h, 1e-300)) uniform = false;
  }
  if (uniform && (m - 1) % 2 == 0) {
    double s = f.front() + f.back();
    for (std::size_t i = 1; i + 1 < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
    return s * h / 3.0;
  }
  double s = 0.0;
  for (std::size_t i = 1; i < m; ++i) s += 0.5 * (f[i] + f[i - 1]) * (t[i] - t[i - 1]);
  return s;
}

template <class Density>
double weak_form(const Trajectory& tr, const TestField& phi, Density&& density) {
  if (tr.size() < 2) throw InvalidArgument("weak residual needs at least two trajectory samples");
  check_support(tr, phi);
  const Grid& g = tr.grid;
  const auto xs = g.nodes();
  std::vector<double> dens(tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double t = tr.times[i];
    std::vector<double> p(xs.size()), pt(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) {
      p[j] = phi.value(t, xs[j]);
      pt[j] = phi.dt(t, xs[j]);
    }
    dens[i] = density(t, tr.states[i].samples(), p, pt);
  }
  std::vector<double> p0(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) p0[j] = phi.value(tr.times.front(), xs[j]);
  const double initial = space_integral(g, product(tr.states.front().samples(), p0));
  return -initial + time_integral(tr.times, dens);
}

}  // namespace

double weak_residual(const Trajectory& tr, const TestField& phi, const CoefficientSet& set) {
  const Grid& g = tr.grid;
  return weak_form(tr, phi, [&](double t, const std::vector<double>& u,
                                const std::vector<double>& p, const std::vector<double>& pt) {
    const auto c = sample_set(set, g, t);
    const auto ap3 = dxn(g, product(c.alpha, p), 3);
    const auto bp2 = dxn(g, product(c.beta, p), 2);
    const auto gp1 = dxn(g, product(c.gamma, p), 1);
    const auto ep1 = dxn(g, product(c.epsilon, p), 1);
    std::vector<double> f(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
      f[j] = -u[j] * pt[j] - u[j] * ap3[j] + u[j] * bp2[j] - u[j] * gp1[j] +
             c.delta[j] * u[j] * p[j] + 0.5 * u[j] * u[j] * ep1[j];
    }
    return space_integral(g, f);
  });
}

double weak_residual(const Trajectory& tr, const TestField& phi,
                     const TransformedProblem& problem) {
  const Grid& g = tr.grid;
  require_same_grid(g, problem.grid(), "weak_residual");
  return weak_form(tr, phi, [&](double t, const std::vector<double>& v,
                                const std::vector<double>& p, const std::vector<double>& pt) {
    const auto tc = problem.at(t);
    const auto p3 = dxn(g, p, 3);
    const auto bp2 = dxn(g, product(tc->b, p), 2);
    const auto cp1 = dxn(g, product(tc->c, p), 1);
    const auto ep1 = dxn(g, product(tc->e, p), 1);
    std::vector<double> f(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
      f[j] = -v[j] * pt[j] - v[j] * p3[j] - v[j] * bp2[j] - v[j] * cp1[j] +
             tc->d[j] * v[j] * p[j] + v[j] * v[j] * (0.5 * ep1[j] - tc->f[j] * p[j]);
    }
    return space_integral(g, f);
  });
}

// ---------------------------------------------------------------------------

NormReport energy_monitor(const Trajectory& tr, double s,
                          const std::function<std::vector<double>(double)>& b_field) {
  NormReport rep;
  rep.s = s;
  rep.max_dissipation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double t = tr.times[i];
    auto b = b_field(t);
    for (double& x : b) {
      // gauge-built b can come out at -1e-17 where beta2 vanishes
      if (x < -kWeightTolerance) {
        throw NegativeWeight("energy monitor requires b >= 0, found " + std::to_string(x));
      }
      x = std::max(x, 0.0);
    }
    const double hs = sobolev_norm(tr.states[i], s);
    const double diss = dyadic_dissipation(tr.states[i], b, s);
    rep.times.push_back(t);
    rep.hs_norm_sq.push_back(hs * hs);
    rep.dissipation.push_back(diss);
    double cum = 0.0;
    if (i > 0) {
      cum = rep.cumulative_seminorm.back() -
            0.5 * (diss + rep.dissipation[i - 1]) * (t - rep.times[i - 1]);
    }
    rep.cumulative_seminorm.push_back(cum);
    rep.max_dissipation = std::max(rep.max_dissipation, diss);
    if (diss > 1e-12) rep.dissipation_nonpositive = false;
    if (i > 0 && rep.hs_norm_sq[i] > rep.hs_norm_sq[i - 1] * (1.0 + 1e-12)) {
      rep.hs_nonincreasing = false;
    }
  }
  if (!rep.hs_norm_sq.empty() && rep.hs_norm_sq.front() > 0.0) {
    for (std::size_t i = 0; i < rep.times.size(); ++i) {
      rep.max_energy_ratio =
          std::max(rep.max_energy_ratio,
                   (rep.hs_norm_sq[i] + rep.cumulative_seminorm[i]) / rep.hs_norm_sq.front());
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

template <class T>
void put_le(std::ostream& os, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), 8);
}

template <class T>
T get_le(std::istream& is) {
  unsigned char buf[8];
  if (!is.read(reinterpret_cast<char*>(buf), 8)) throw InvalidArgument("truncated snapshot");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

}  // namespace

void write_snapshot(std::ostream& os, const SpectralState& state, double t) {
  put_le<std::uint64_t>(os, state.grid().size());
  put_le<double>(os, state.grid().half_width());
  put_le<double>(os, t);
  for (const auto& c : state.coefficients()) {
    put_le<double>(os, c.real());
    put_le<double>(os, c.imag());
  }
}

std::pair<SpectralState, double> read_snapshot(std::istream& is) {
  const auto n = get_le<std::uint64_t>(is);
  const double L = get_le<double>(is);
  const double t = get_le<double>(is);
  const Grid g(L, static_cast<std::size_t>(n));
  std::vector<cplx> c(g.size());
  for (auto& z : c) {
    const double re = get_le<double>(is);
    const double im = get_le<double>(is);
    z = cplx(re, im);
  }
  return {SpectralState(g, std::move(c), true), t};
}

}  // namespace gkdv
