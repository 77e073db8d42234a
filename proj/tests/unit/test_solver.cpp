#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gkdv/error.hpp"
#include "gkdv/experiments.hpp"
#include "gkdv/solver.hpp"

using namespace gkdv;
constexpr double pi = std::numbers::pi;

namespace {

SpectralState sampled(const Grid& g, const std::function<double(double)>& f) {
  auto xs = g.nodes();
  for (auto& x : xs) x = f(x);
  return SpectralState::from_samples(g, xs);
}

// Exact solution of a constant-coefficient linear problem: multiply c_k by exp(lambda(k) t).
SpectralState linear_exact(const SpectralState& u0, double t,
                           const std::function<cplx(double)>& lambda) {
  std::vector<cplx> c(u0.coefficients().begin(), u0.coefficients().end());
  for (std::size_t m = 0; m < c.size(); ++m) c[m] *= std::exp(lambda(u0.grid().wavenumber(m)) * t);
  return SpectralState(u0.grid(), std::move(c), true);
}

}  // namespace

TEST_CASE("Airy flow is exact in the integrating factor") {
  const Grid g(pi, 64);
  const auto u0 = sampled(g, [](double x) { return std::exp(std::sin(x)); });
  const TransformedProblem p(identity_gauge_problem(CoefficientSet{}, g));
  SolverConfig cfg;
  cfg.t_final = 1.3;
  cfg.dt = 0.1;
  const auto tr = solve(u0, cfg, p);
  // v_t + v_xxx = 0  =>  c_k' = i k^3 c_k
  const auto ex = linear_exact(u0, 1.3, [](double k) { return cplx(0.0, k * k * k); });
  CHECK(l2_norm(tr.states.back() - ex) < 1e-12);
}

TEST_CASE("original form: constant-coefficient linear flows") {
  const Grid g(pi, 32);
  const auto u0 = sampled(g, [](double x) { return std::exp(std::cos(x)); });
  CoefficientSet set;
  set.alpha = CoefficientExpr::constant(0.5);
  set.beta = CoefficientExpr::constant(-0.2);  // u_t = 0.2 u_xx + ...
  set.gamma = CoefficientExpr::constant(1.0);
  set.delta = CoefficientExpr::constant(0.3);
  SolverConfig cfg;
  cfg.form = EquationForm::original;
  cfg.t_final = 0.5;
  cfg.dealias = false;
  const auto tr = solve(u0, cfg, set);
  // c' = -(alpha (ik)^3 + beta (ik)^2 + gamma ik + delta) c
  const auto ex = linear_exact(u0, 0.5, [](double k) {
    const cplx ik(0.0, k);
    return -(0.5 * ik * ik * ik - 0.2 * ik * ik + ik + 0.3);
  });
  CHECK(l2_norm(tr.states.back() - ex) < 1e-8);
}

TEST_CASE("transformed form: damping and advection") {
  const Grid g(pi, 64);
  const auto u0 = sampled(g, [](double x) { return std::sin(x) + 0.5 * std::cos(3.0 * x); });
  CoefficientSet set;
  set.gamma = CoefficientExpr::constant(2.0);
  set.delta = CoefficientExpr::constant(0.7);
  const auto p = identity_gauge_problem(set, g);
  SolverConfig cfg;
  cfg.t_final = 1.0;
  cfg.dt = 1e-3;
  const auto tr = solve(u0, cfg, p);
  const auto ex = linear_exact(u0, 1.0, [](double k) {
    const cplx ik(0.0, k);
    return -(ik * ik * ik + 2.0 * ik + 0.7);
  });
  CHECK(l2_norm(tr.states.back() - ex) < 1e-10);
}

TEST_CASE("soliton, both forms") {
  const Grid g(16.0 * pi, 512);
  CoefficientSet set;
  set.epsilon = CoefficientExpr::constant(-6.0);
  const auto u0 = sampled(g, [](double x) { return kdv_soliton(1.0, 0.0, 0.0, x); });
  const auto ex = sampled(g, [](double x) { return kdv_soliton(1.0, 0.0, 0.2, x); });
  SolverConfig cfg;
  cfg.t_final = 0.2;
  cfg.dt = 2e-4;
  cfg.dealias = false;
  const auto tr = solve(u0, cfg, identity_gauge_problem(set, g));
  CHECK(l2_norm(tr.states.back() - ex) < 1e-8);
  cfg.form = EquationForm::original;
  cfg.dt.reset();
  const auto to = solve(u0, cfg, set);
  CHECK(l2_norm(to.states.back() - ex) < 1e-8);
}

TEST_CASE("stage-time sampling keeps fourth order for t-dependent coefficients") {
  // u_t + delta(t) u = 0 with delta = cos t: u = u0 exp(-sin t). A constant datum keeps
  // every k != 0 mode exactly zero, so large steps stay clear of the k^3 limit.
  const Grid g(pi, 16);
  const auto u0 = sampled(g, [](double) { return 1.5; });
  CoefficientSet set;
  set.delta = CoefficientExpr::parse("cos(t)");
  SolverConfig cfg;
  cfg.form = EquationForm::original;
  cfg.t_final = 2.0;
  std::vector<double> errs;
  for (double dt : {0.1, 0.05}) {
    cfg.dt = dt;
    const auto tr = solve(u0, cfg, set);
    errs.push_back(l2_norm(tr.states.back() - std::exp(-std::sin(2.0)) * u0));
  }
  CHECK(std::log2(errs[0] / errs[1]) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("blow-up detection") {
  // backward heat: u_t + u_xx = 0 grows like e^{k^2 t}. Round-off in the top mode grows
  // like e^{49 t} on this grid and stays below the cap until t ~ 0.85.
  const Grid g(pi, 16);
  const auto u0 = sampled(g, [](double x) { return std::cos(4.0 * x); });
  CoefficientSet set;
  set.beta = CoefficientExpr::constant(1.0);
  SolverConfig cfg;
  cfg.form = EquationForm::original;
  cfg.t_final = 1.0;
  cfg.blowup_factor = 100.0;
  cfg.dealias = false;
  const auto tr = solve(u0, cfg, set);
  REQUIRE(tr.blowup_time.has_value());
  // e^{16 t} = 100 at t = ln(100)/16
  CHECK(*tr.blowup_time == doctest::Approx(std::log(100.0) / 16.0).epsilon(0.05));
  CHECK(tr.blowup_time < 1.0);
}

TEST_CASE("dt lands on t_final and monitors are recorded") {
  const Grid g(pi, 16);
  const auto u0 = sampled(g, [](double x) { return std::cos(x); });
  SolverConfig cfg;
  cfg.t_final = 1.0;
  cfg.dt = 0.3;
  cfg.monitor_stride = 2;
  const auto tr = solve(u0, cfg, identity_gauge_problem(CoefficientSet{}, g));
  CHECK(tr.dt == doctest::Approx(0.25));
  CHECK(tr.steps_taken == 4);
  REQUIRE(tr.size() == 3);
  CHECK(tr.times.back() == doctest::Approx(1.0));
  CHECK_THROWS_AS(solve(u0, cfg, CoefficientSet{}), InvalidArgument);
}

TEST_CASE("weak residual vanishes on solutions and rejects bad test functions") {
  const Grid g(16.0 * pi, 256);
  CoefficientSet set;
  set.epsilon = CoefficientExpr::constant(-6.0);
  const auto u0 = sampled(g, [](double x) { return kdv_soliton(1.0, 0.0, 0.0, x); });
  SolverConfig cfg;
  cfg.t_final = 0.5;
  cfg.dt = 1e-3;
  cfg.monitor_stride = 5;
  cfg.dealias = false;
  const auto tr = solve(u0, cfg, identity_gauge_problem(set, g));
  TestField phi;
  phi.value = [](double t, double x) { return std::pow(1.0 - t / 0.5, 4) * std::exp(-x * x / 4.0); };
  phi.dt = [](double t, double x) { return -8.0 * std::pow(1.0 - t / 0.5, 3) * std::exp(-x * x / 4.0); };
  const double r = weak_residual(tr, phi, identity_gauge_problem(set, g));
  CHECK(std::abs(r) < 1e-6);
  // the same trajectory judged against the wrong equation
  CoefficientSet wrong = set;
  wrong.epsilon = CoefficientExpr::constant(-5.0);
  CHECK(std::abs(weak_residual(tr, phi, identity_gauge_problem(wrong, g))) > 1e-2);
  TestField bad = phi;
  bad.value = [](double, double x) { return std::exp(-x * x / 4.0); };
  CHECK_THROWS_AS(weak_residual(tr, bad, set), SupportViolation);
}

TEST_CASE("energy monitor: b = 1 dissipates and the H^s norm decays") {
  const Grid g(pi, 64);
  const auto u0 = random_power_law_field(g, 1.5, 20.0, 11);
  CoefficientSet set;
  set.beta = CoefficientExpr::constant(-1.0);  // b = -beta = 1
  const auto p = identity_gauge_problem(set, g);
  SolverConfig cfg;
  cfg.t_final = 0.5;
  cfg.s = 1.0;
  const auto tr = solve(u0, cfg, p);
  const auto rep = energy_monitor(tr, 1.0, [&](double) { return std::vector<double>(64, 1.0); });
  CHECK(rep.dissipation_nonpositive);
  CHECK(rep.max_dissipation <= 1e-12);
  CHECK(rep.hs_nonincreasing);
  CHECK_THROWS_AS(energy_monitor(tr, 1.0, [&](double) { return std::vector<double>(64, -1.0); }),
                  NegativeWeight);
  // round-off negatives are clipped, not rejected
  CHECK(energy_monitor(tr, 1.0, [&](double) { return std::vector<double>(64, -1e-17); }).max_dissipation == 0.0);
  CHECK_THROWS_AS(energy_monitor(tr, 1.0, [&](double) { return std::vector<double>(64, -1e-9); }),
                  NegativeWeight);
}

TEST_CASE("snapshot round trip") {
  const Grid g(3.0, 32);
  const auto u = random_power_law_field(g, 1.0, 10.0, 4);
  std::stringstream ss;
  write_snapshot(ss, u, 0.75);
  CHECK(ss.str().size() == 8 + 8 + 8 + 32 * 16);
  const auto [v, t] = read_snapshot(ss);
  CHECK(t == 0.75);
  CHECK(v.grid().size() == 32);
  CHECK(v.grid().half_width() == 3.0);
  CHECK(l2_norm(v - u) == 0.0);
}
