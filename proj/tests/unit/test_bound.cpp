#include <doctest.h>

#include <cmath>
#include <string>

#include "matsg/bound.hpp"
#include "matsg/error.hpp"

using namespace matsg;

TEST_CASE("expressions evaluate like their closed forms") {
  for (double x : {0.0, 0.3, 1.0, 2.5}) {
    CHECK(Expression::parse("exp(2x)")(x) == doctest::Approx(std::exp(2 * x)));
    CHECK(Expression::parse("exp(2*x)")(x) == doctest::Approx(std::exp(2 * x)));
    CHECK(Expression::parse("1 + x^2")(x) == doctest::Approx(1 + x * x));
    CHECK(Expression::parse("3(x+1) - 2 exp(x)")(x) == doctest::Approx(3 * (x + 1) - 2 * std::exp(x)));
    CHECK(Expression::parse("sqrt(1 + x) / 2")(x) == doctest::Approx(std::sqrt(1 + x) / 2));
    CHECK(Expression::parse("-x + abs(-x)")(x) == doctest::Approx(0.0));
    CHECK(Expression::parse("e^x * pi / pi")(x) == doctest::Approx(std::exp(x)));
  }
  CHECK(Expression::parse("2^3^2")(0) == doctest::Approx(512.0));
  CHECK(Expression::parse("-2^2")(0) == doctest::Approx(-4.0));
}

TEST_CASE("malformed expressions report the column") {
  for (const char* bad : {"exp(2x", "2 +", "foo(x)", "x ** 2", ""}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(Expression::parse(bad), ParseError);
  }
  try {
    Expression::parse("1 + )");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("column 5") != std::string::npos);
  }
}

TEST_CASE("bound flags") {
  auto f = BoundFunction::from_expression("exp(x)");
  CHECK(f.one_at_zero());
  CHECK(f.locally_bounded(10));
  CHECK(f.right_continuous_at_zero());
  CHECK(f(1.0) == doctest::Approx(std::exp(1.0)));

  CHECK_FALSE(BoundFunction::from_expression("2 + x").one_at_zero());
  CHECK_FALSE(BoundFunction::from_expression("1/(1 - x)").locally_bounded(2));
  CHECK(BoundFunction::unit()(5.0) == 1.0);
}

TEST_CASE("tabulated bounds interpolate linearly") {
  auto t = BoundFunction::from_table({{0.0, 1.0}, {2.0, 3.0}, {1.0, 1.5}});
  CHECK(t.tabulated());
  CHECK(t(0.5) == doctest::Approx(1.25));
  CHECK(t(1.5) == doctest::Approx(2.25));
  CHECK(t.one_at_zero());
  CHECK(t.right_continuous_at_zero());
  CHECK_THROWS_AS(BoundFunction::from_table({}), DomainError);
  CHECK_THROWS_AS(BoundFunction::from_table({{0.0, 1.0}, {0.0, 2.0}}), DomainError);
}
