#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "gkdv/coefficients.hpp"
#include "gkdv/error.hpp"

using namespace gkdv;
constexpr double pi = std::numbers::pi;

TEST_CASE("anchored integral of cos is sin, also past the box") {
  const Grid g(4.0, 64);
  const AnchoredIntegral I(g, [](double x) { return std::cos(x); });
  const auto xs = g.nodes();
  for (std::size_t j = 0; j < xs.size(); ++j) {
    CHECK(I.at_node(j) == doctest::Approx(std::sin(xs[j])).epsilon(1e-13));
  }
  CHECK(I.table().size() == 65);
  CHECK(I.table().back() == doctest::Approx(std::sin(4.0)).epsilon(1e-13));
  CHECK(I(7.3) == doctest::Approx(std::sin(7.3)).epsilon(1e-12));
  CHECK(I(-9.1) == doctest::Approx(std::sin(-9.1)).epsilon(1e-12));
}

TEST_CASE("anchored integral against adaptive Gauss-Kronrod") {
  const Grid g(10.0, 128);
  auto f = [](double x) { return std::pow(2.0 + std::tanh(x), -1.0 / 3.0); };
  const AnchoredIntegral I(g, f);
  for (double x : {-9.7, -0.3, 4.4, 10.0}) {
    const double ref = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, x, 15, 1e-14);
    CHECK(I(x) == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("softplus split") {
  const auto beta = CoefficientExpr::parse("0.5*sin(x/3) - 0.1");
  const auto sp = split_beta(beta, {SplitKind::softplus, 10.0, std::nullopt});
  for (double x = -10.0; x <= 10.0; x += 0.25) {
    const double b1 = sp.beta1.eval(0, x), b2 = sp.beta2.eval(0, x);
    CHECK(b1 + b2 == doctest::Approx(beta.eval(0, x)).epsilon(1e-14));
    CHECK(b2 <= 1e-15);
    CHECK(b1 == doctest::Approx(std::log1p(std::exp(10.0 * beta.eval(0, x))) / 10.0).epsilon(1e-13));
  }
  const auto user = split_beta(beta, {});
  CHECK(user.beta2.eval(0, 1.0) == 0.0);
  CHECK(user.beta1.eval(0, 1.0) == doctest::Approx(beta.eval(0, 1.0)));
}

TEST_CASE("coercivity and domain screening") {
  CoefficientSet set;
  set.alpha = CoefficientExpr::parse("0.3 + 0*x");
  set.alpha0 = 0.5;
  CHECK_THROWS_AS(require_coercive(set, Grid(pi, 32), 0.0), CoercivityError);
  set.alpha0 = 0.25;
  CHECK_NOTHROW(require_coercive(set, Grid(pi, 32), 0.0));

  CoefficientSet bad;
  bad.gamma = CoefficientExpr::parse("log(x)");
  CHECK_THROWS_AS(screen_domain(bad, Grid(pi, 32), 1.0, 3), DomainError);
}

TEST_CASE("sample times") {
  const auto t = sample_times(2.0, 5);
  REQUIRE(t.size() == 5);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == doctest::Approx(2.0));
  CHECK(sample_times(2.0, 1).size() == 1);
}

TEST_CASE("hypotheses: constant coefficients pass everything") {
  CoefficientSet set;
  const auto rep = check_hypotheses(set, Grid(8.0, 64), 1.0, 3);
  for (const auto& e : rep.entries) CHECK_MESSAGE(e.passed, e.quantity);
  CHECK(rep.gate_passed());
}

TEST_CASE("hypotheses: beta1 = 1 fails H3 with a left-edge trend") {
  CoefficientSet set;
  set.beta = CoefficientExpr::constant(1.0);
  apply_split(set, {});
  const Grid g(8.0, 64);
  const auto rep = check_hypotheses(set, g, 1.0, 3);
  CHECK(!rep.passed(3));
  CHECK(!rep.gate_passed());
  const auto& e = rep.entry("sup -int_0^x beta1/alpha");
  CHECK(!e.passed);
  CHECK(e.boundary_trend);
  CHECK(e.x_at == doctest::Approx(-8.0));
  CHECK(e.extremal_value == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("hypotheses: t-independent alpha has an identically zero H2 integrand") {
  CoefficientSet set;
  set.alpha = CoefficientExpr::parse("2 + 0.5*tanh(x/4)");
  set.alpha0 = 0.4;
  const auto rep = check_hypotheses(set, Grid(16.0, 64), 1.0, 3);
  CHECK(rep.passed(2));
  CHECK(rep.entry("sup|int_0^x d_t(alpha^(-1/3))|").identically_zero);
}

TEST_CASE("hypotheses: coercivity failure is H1") {
  CoefficientSet set;
  set.alpha = CoefficientExpr::parse("1 + 0.9*sin(x)");
  set.alpha0 = 0.5;
  const auto rep = check_hypotheses(set, Grid(pi, 64), 1.0, 2);
  CHECK(!rep.passed(1));
}

TEST_CASE("hypotheses: positive beta2 breaks the split") {
  CoefficientSet set;
  set.beta = CoefficientExpr::parse("sech(x)^2");
  apply_split(set, {SplitKind::user_provided, 10.0, CoefficientExpr::constant(0.0)});
  const auto rep = check_hypotheses(set, Grid(8.0, 64), 1.0, 2);
  CHECK(!rep.entry("split").passed);
}

TEST_CASE("hypotheses: time-dependent alpha has a bounded H2 integral") {
  // alpha = 1 + 0.5 t sech^2 x: d_t alpha^{-1/3} = -(1/6) sech^2 x alpha^{-4/3}, integrable in x.
  CoefficientSet set;
  set.alpha = CoefficientExpr::parse("1 + 0.5*t*sech(x)^2");
  set.alpha0 = 0.5;
  const auto rep = check_hypotheses(set, Grid(12.0, 128), 1.0, 5);
  const auto& e = rep.entry("sup|int_0^x d_t(alpha^(-1/3))|");
  CHECK(e.passed);
  CHECK(!e.identically_zero);
  // at t = 0 and x -> L: (1/6) int_0^inf sech^2 = 1/6
  CHECK(e.extremal_value == doctest::Approx(1.0 / 6.0).epsilon(1e-6));
}
