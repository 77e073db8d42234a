#include "doctest.h"

#include <cmath>
#include <numbers>

#include "gkdv/error.hpp"
#include "gkdv/experiments.hpp"

using namespace gkdv;
constexpr double pi = std::numbers::pi;

TEST_CASE("log-log fit of an exact power law") {
  std::vector<double> x = {1, 2, 4, 8, 16}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -2.0));
  const auto f = fit_loglog(x, y);
  CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.max_residual < 1e-12);
  CHECK_THROWS_AS(fit_loglog({1.0}, {1.0}), InvalidArgument);
}

TEST_CASE("soliton formula solves KdV") {
  // finite-difference residual of v_t + v_xxx + 6 v v_x
  // first derivatives on a fine step, the third on a coarser one (round-off)
  const double h = 1e-5, H = 2e-3, t = 0.3;
  for (double x : {-1.0, 0.4, 2.2}) {
    auto v = [&](double tt, double xx) { return kdv_soliton(1.3, 0.5, tt, xx); };
    const double vt = (v(t + h, x) - v(t - h, x)) / (2 * h);
    const double vx = (v(t, x + h) - v(t, x - h)) / (2 * h);
    auto d3 = [&](double k) {
      return (v(t, x + 2 * k) - 2 * v(t, x + k) + 2 * v(t, x - k) - v(t, x - 2 * k)) / (2 * k * k * k);
    };
    const double vxxx = (4 * d3(H) - d3(2 * H)) / 3;  // Richardson
    CHECK(std::abs(vt + vxxx + 6 * v(t, x) * vx) < 1e-4);
  }
}

TEST_CASE("Hilbert envelope of a modulated Gaussian") {
  const Grid g(8.0 * pi, 1024);
  std::vector<double> s;
  for (double x : g.nodes()) s.push_back(std::exp(-x * x) * std::cos(15.0 * x));
  const auto env = hilbert_envelope(SpectralState::from_samples(g, s));
  const auto xs = g.nodes();
  double err = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) err = std::max(err, std::abs(env[j] - std::exp(-xs[j] * xs[j])));
  CHECK(err < 1e-10);
}

TEST_CASE("parallel map keeps order and rethrows") {
  const auto r = parallel_map<int>(50, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i] == static_cast<int>(i * i));
  CHECK_THROWS_AS(parallel_map<int>(5,
                                    [](std::size_t i) -> int {
                                      if (i == 3) throw InvalidArgument("boom");
                                      return 0;
                                    }),
                  InvalidArgument);
}

TEST_CASE("random power-law fields are seeded and real") {
  const Grid g(pi, 256);
  const auto a = random_power_law_field(g, 1.5, 50.0, 9, 2.0);
  const auto b = random_power_law_field(g, 1.5, 50.0, 9, 2.0);
  CHECK(l2_norm(a - b) == 0.0);
  CHECK(l2_norm(a - random_power_law_field(g, 1.5, 50.0, 10, 2.0)) > 0.0);
  CHECK(a.hermitian_defect() == 0.0);
  const auto c = a.coefficients();
  CHECK(std::abs(c[7]) == doctest::Approx(2.0 * std::pow(8.0, -1.5)));
  CHECK(std::abs(c[60]) == 0.0);
  CHECK(std::abs(c[0]) == 0.0);
}

TEST_CASE("identity gauge requires alpha = 1") {
  CoefficientSet set;
  set.alpha = CoefficientExpr::constant(2.0);
  CHECK_THROWS_AS(identity_gauge_problem(set, Grid(pi, 16)), InvalidArgument);
}

TEST_CASE("transform consistency under the identity gauge") {
  // Discrepancy is only the difference of the two solver paths; bound it by their errors
  // against the exact soliton.
  auto spec = default_spec(ExperimentKind::transform_consistency);
  CoefficientSet set;
  set.epsilon = CoefficientExpr::constant(-6.0);
  spec.coefficients = set;
  spec.half_width = 16.0 * pi;
  spec.n_values = {256};
  spec.t_final = 0.1;
  spec.u0 = CoefficientExpr::parse("2*sech(x)^2");
  const auto rep = run_transform_consistency(spec);
  const double disc = rep.scalars.at("discrepancy_at_max_n");

  const Grid g(16.0 * pi, 256);
  std::vector<double> s, ex;
  for (double x : g.nodes()) {
    s.push_back(kdv_soliton(1.0, 0.0, 0.0, x));
    ex.push_back(kdv_soliton(1.0, 0.0, 0.1, x));
  }
  const auto u0 = SpectralState::from_samples(g, s);
  const auto exact = SpectralState::from_samples(g, ex);
  SolverConfig cfg;
  cfg.form = EquationForm::original;
  cfg.t_final = 0.1;
  const double err_o = l2_norm(solve(u0, cfg, set).states.back() - exact);
  cfg.form = EquationForm::transformed;
  cfg.dt = 0.1 / 20;
  const double err_t = l2_norm(solve(u0, cfg, identity_gauge_problem(set, g)).states.back() - exact);
  CHECK(disc < 10.0 * std::max(err_o, err_t));
}

TEST_CASE("Bona-Smith with band-limited data is exact") {
  auto spec = default_spec(ExperimentKind::bona_smith);
  spec.num_points = 128;
  spec.n_values = {8, 16};
  spec.reference_n = 32;
  spec.t_final = 0.05;
  spec.dt = 1e-3;
  spec.u0 = CoefficientExpr::parse("0.3*cos(3*x)");
  const auto rep = run_bona_smith(spec);
  for (const auto& row : rep.tables.front().rows) CHECK(row[1] < 1e-13);
}

TEST_CASE("continuity of a linear flow: ratio independent of the size") {
  auto spec = default_spec(ExperimentKind::continuity);
  CoefficientSet set;
  set.beta = CoefficientExpr::parse("-0.1");
  spec.coefficients = set;
  spec.half_width = 8.0 * pi;
  spec.num_points = 256;
  spec.t_final = 0.2;
  spec.u0 = CoefficientExpr::parse("exp(-x^2)");
  spec.perturbation_sizes = {1e-1, 1e-2, 1e-3};
  const auto rep = run_continuity(spec);
  CHECK(rep.scalars.at("ratio_spread") == doctest::Approx(1.0).epsilon(0.01));
  CHECK(rep.verdict("zero_perturbation").passed);
}

TEST_CASE("wave packet without anti-diffusion keeps its amplitude") {
  auto spec = default_spec(ExperimentKind::wavepacket);
  spec.coefficients = CoefficientSet{};
  const auto rep = run_wavepacket(spec);
  for (const auto& row : rep.tables.front().rows) CHECK(row[2] == doctest::Approx(1.0).epsilon(0.02));
  CHECK(rep.verdict("traversal").passed);
}

TEST_CASE("small commutator survey") {
  auto spec = default_spec(ExperimentKind::commutator_survey);
  spec.num_points = 1024;
  spec.draws = 10;
  spec.params["commu_draws"] = 5;
  spec.params["triples"] = 100;
  const auto rep = run_commutator_survey(spec);
  CHECK(rep.verdict("comcom_residual").passed);
  CHECK(rep.verdict("omega3_identity").passed);
  CHECK(rep.scalars.at("omega3_minus3_disagreements") == 100.0);
}

TEST_CASE("experiment kinds") {
  CHECK(all_experiment_kinds().size() == 6);
  for (auto k : all_experiment_kinds()) CHECK(parse_experiment_kind(to_string(k)) == k);
  CHECK(!parse_experiment_kind("nope"));
}
