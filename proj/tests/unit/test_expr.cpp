#include "doctest.h"

#include <cmath>
#include <numbers>

#include "gkdv/error.hpp"
#include "gkdv/expr.hpp"

using namespace gkdv;

TEST_CASE("evaluation matches std") {
  const auto e = CoefficientExpr::parse("2 + 0.5*tanh(x/4)");
  for (double x : {-3.0, 0.0, 1.7}) {
    CHECK(e.eval(0.0, x) == doctest::Approx(2.0 + 0.5 * std::tanh(x / 4.0)).epsilon(1e-15));
  }
  const auto s = CoefficientExpr::parse("-0.2*sech(x/4)^2");
  CHECK(s.eval(0.0, 1.0) == doctest::Approx(-0.2 / std::pow(std::cosh(0.25), 2)).epsilon(1e-15));
  CHECK(CoefficientExpr::parse("pi").eval(0, 0) == doctest::Approx(std::numbers::pi));
  CHECK(CoefficientExpr::parse("2e-3").eval(0, 0) == doctest::Approx(0.002));
}

TEST_CASE("precedence") {
  CHECK(CoefficientExpr::parse("-2^2").eval(0, 0) == doctest::Approx(-4.0));
  CHECK(CoefficientExpr::parse("2^3^2").eval(0, 0) == doctest::Approx(512.0));
  CHECK(CoefficientExpr::parse("1 - 2 - 3").eval(0, 0) == doctest::Approx(-4.0));
  CHECK(CoefficientExpr::parse("8 / 4 / 2").eval(0, 0) == doctest::Approx(1.0));
  CHECK(CoefficientExpr::parse("2*x^2").eval(0, 3) == doctest::Approx(18.0));
}

TEST_CASE("derivatives against hand-computed forms") {
  // d/dx tanh(x/4) = sech^2(x/4)/4, d^2 = -sech^2 tanh / 8
  const auto e = CoefficientExpr::parse("2 + 0.5*tanh(x/4)");
  const double x = 0.9;
  const double sech2 = 1.0 / std::pow(std::cosh(x / 4.0), 2);
  CHECK(e.eval(0, x, 0, 1) == doctest::Approx(0.125 * sech2).epsilon(1e-14));
  CHECK(e.eval(0, x, 0, 2) == doctest::Approx(-0.0625 * sech2 * std::tanh(x / 4.0)).epsilon(1e-14));
  const auto f = CoefficientExpr::parse("t*x^3 + sin(t)*exp(x)");
  CHECK(f.eval(0.5, 2.0, 1, 0) == doctest::Approx(8.0 + std::cos(0.5) * std::exp(2.0)));
  CHECK(f.eval(0.5, 2.0, 1, 2) == doctest::Approx(12.0 + std::cos(0.5) * std::exp(2.0)));
  CHECK(f.eval(0.5, 2.0, 0, 4) == doctest::Approx(std::sin(0.5) * std::exp(2.0)));
  const auto l = CoefficientExpr::parse("log(1 + x^2)");
  CHECK(l.eval(0, 1.5, 0, 1) == doctest::Approx(3.0 / 3.25));
}

TEST_CASE("finite differences agree with symbolic derivatives") {
  const auto e = CoefficientExpr::parse("cos(x)*sech(x - t)^2 / (2 + tanh(x))");
  const double h = 1e-5;
  for (double x : {-1.3, 0.2, 2.5}) {
    const double fd = (e.eval(0.3, x + h) - e.eval(0.3, x - h)) / (2 * h);
    CHECK(e.eval(0.3, x, 0, 1) == doctest::Approx(fd).epsilon(1e-8));
    const double fdt = (e.eval(0.3 + h, x) - e.eval(0.3 - h, x)) / (2 * h);
    CHECK(e.eval(0.3, x, 1, 0) == doctest::Approx(fdt).epsilon(1e-8));
  }
}

TEST_CASE("parse errors carry the column") {
  try {
    CoefficientExpr::parse("2 + tanh(");
    FAIL("no throw");
  } catch (const ParseError& e) {
    CHECK(e.column() == 9);
  }
  try {
    CoefficientExpr::parse("2 + foo(x)");
    FAIL("no throw");
  } catch (const ParseError& e) {
    CHECK(e.column() == 5);
  }
  CHECK_THROWS_AS(CoefficientExpr::parse(""), ParseError);
  CHECK_THROWS_AS(CoefficientExpr::parse("1 +* 2"), ParseError);
  CHECK_THROWS_AS(CoefficientExpr::parse("(x"), ParseError);
  CHECK_THROWS_AS(CoefficientExpr::parse("x)"), ParseError);
}

TEST_CASE("order limits") {
  const auto e = CoefficientExpr::parse("x^5");
  CHECK_THROWS_AS(e.eval(0, 1, 0, 5), OrderError);
  CHECK_THROWS_AS(e.eval(0, 1, 2, 0), OrderError);
  CHECK(e.dx().dx().dx().dx().dx().eval(0, 1) == doctest::Approx(120.0));
}

TEST_CASE("structure queries") {
  CHECK(CoefficientExpr::parse("3*2").is_constant());
  CHECK(CoefficientExpr::parse("x + 1").depends_on_x());
  CHECK(!CoefficientExpr::parse("x + 1").depends_on_t());
  CHECK(CoefficientExpr::parse("sin(t)").depends_on_t());
  CHECK(CoefficientExpr::parse("1/x").may_have_poles());
  CHECK(!CoefficientExpr::parse("tanh(x)").may_have_poles());
  const auto e = CoefficientExpr::parse("t*x");
  CHECK(e.at_x(2.0).eval(3.0, 100.0) == doctest::Approx(6.0));
}

TEST_CASE("softplus stays finite") {
  const auto sp = softplus(CoefficientExpr::parse("x"));
  CHECK(sp.eval(0, 800.0) == doctest::Approx(800.0));
  CHECK(sp.eval(0, -800.0) >= 0.0);
  CHECK(sp.eval(0, 0.0) == doctest::Approx(std::log(2.0)));
  CHECK(sp.eval(0, 0.0, 0, 1) == doctest::Approx(0.5));
}
