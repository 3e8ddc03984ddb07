// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ntwistor/expr.hpp"
#include "test_support.hpp"

using namespace ntw;
using ntw::testing::fd_partial;
using ntw::testing::random_expr;

TEST_CASE("parse atomic and composite tokens") {
  CHECK(parse_expr("x1", 2).eval({3.5, 0.0}) == 3.5);
  Expr e = parse_expr("exp(x1)*x2", 2);
  CHECK(e.eval({0.0, 4.0}) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(e.eval({1.0, 2.0}) == doctest::Approx(2.0 * std::exp(1.0)).epsilon(1e-14));
  // hand-expanded arithmetic: cosh 0 - sinh^2 0 = 1
  CHECK(parse_expr("cosh(x1) - sinh(x1)^2", 1).eval({0.0}) == doctest::Approx(1.0));
}

TEST_CASE("parse precedence and aliases") {
  CHECK(parse_expr("1+2*3", 1).eval({0.0}) == 7.0);
  CHECK(parse_expr("(1+2)*3", 1).eval({0.0}) == 9.0);
  CHECK(parse_expr("2-1-1", 1).eval({0.0}) == 0.0);   // left-associative
  CHECK(parse_expr("8/4/2", 1).eval({0.0}) == 1.0);
  CHECK(parse_expr("-x1^2", 1).eval({3.0}) == -9.0);  // power binds under the minus
  CHECK(parse_expr("u*v", 2).eval({2.0, 5.0}) == 10.0);
  CHECK_THROWS_AS(parse_expr("u", 3), ParseError);    // aliases exist only for m = 2
  CHECK(parse_expr("x1^-1", 1).eval({4.0}) == 0.25);
}

TEST_CASE("parse errors carry byte offsets") {
  CHECK_THROWS_AS(parse_expr("x3", 2), ParseError);
  CHECK_THROWS_AS(parse_expr("foo(x1)", 2), ParseError);
  CHECK_THROWS_AS(parse_expr("x1 +", 2), ParseError);
  CHECK_THROWS_AS(parse_expr("(x1", 2), ParseError);
  CHECK_THROWS_AS(parse_expr("x1)", 2), ParseError);
  try {
    parse_expr("x1 + $", 2);
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.offset == 5);
  }
}

TEST_CASE("evaluate basics") {
  CHECK(Expr::constant(3.0).eval({0.1, 0.2}) == 3.0);
  CHECK(parse_expr("x1*x2", 2).eval({2.0, 5.0}) == 10.0);
  CHECK(parse_expr("exp(x1)", 1).eval({1.0}) ==
        doctest::Approx(2.718281828459045).epsilon(1e-12));
}

TEST_CASE("evaluation domain errors are reported, never silent") {
  CHECK_THROWS_AS(parse_expr("1/x1", 1).eval({0.0}), DomainError);
  CHECK_THROWS_AS(parse_expr("log(x1)", 1).eval({-1.0}), DomainError);
  CHECK_THROWS_AS(parse_expr("log(x1)", 1).eval({0.0}), DomainError);
  CHECK_THROWS_AS(parse_expr("exp(x1)", 1).eval({1e6}), DomainError);  // overflow
  CHECK_THROWS_AS(parse_expr("x1", 1).eval({}), DomainError);
}

TEST_CASE("partial derivatives: exact cases") {
  CHECK(Expr::coord(1).partial(1).eval({0.0}) == 1.0);
  CHECK(parse_expr("sinh(x1)", 1).partial(1).eval({0.0}) == 1.0);  // cosh 0
  // finite-difference oracle
  Expr e = parse_expr("exp(x1)*x2", 2);
  Point p = {1.0, 7.0};
  CHECK(e.partial(2).eval(p) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  CHECK(e.partial(2).eval(p) == doctest::Approx(fd_partial(e, p, 2)).epsilon(1e-6));
}

TEST_CASE("round trip: parse(print(e)) evaluates identically") {
  Rng rng(2024);
  Box box = Box::unit(3);
  for (int trial = 0; trial < 40; ++trial) {
    Expr e = random_expr(rng, 3);
    Expr round = parse_expr(e.str(), 3);
    for (const Point& p : box.sample(100, rng.next_u64())) {
      double a = e.eval(p), b = round.eval(p);
      CHECK(std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(a)));
    }
  }
}

TEST_CASE("linearity of partial") {
  Rng rng(7);
  Box box = Box::unit(2);
  for (int trial = 0; trial < 25; ++trial) {
    Expr e1 = random_expr(rng, 2), e2 = random_expr(rng, 2);
    double a = rng.uniform(-2.0, 2.0);
    Expr combo = Expr::constant(a) * e1 + e2;
    for (int k = 1; k <= 2; ++k) {
      Expr lhs = combo.partial(k);
      Expr rhs = Expr::constant(a) * e1.partial(k) + e2.partial(k);
      for (const Point& p : box.sample(20, rng.next_u64())) {
        double x = lhs.eval(p), y = rhs.eval(p);
        CHECK(std::fabs(x - y) <= 1e-12 * std::max(1.0, std::fabs(x)));
      }
    }
  }
}

TEST_CASE("finite-difference agreement over the expression pool") {
  Rng rng(99);
  Box box(std::vector<double>{-0.9, -0.9}, std::vector<double>{0.9, 0.9});
  for (int trial = 0; trial < 30; ++trial) {
    Expr e = random_expr(rng, 2);
    for (const Point& p : box.sample(10, rng.next_u64())) {
      for (int k = 1; k <= 2; ++k) {
        double sym = e.partial(k).eval(p);
        double fd = fd_partial(e, p, k);
        CHECK(std::fabs(sym - fd) <= 1e-6 * std::max(1.0, std::fabs(sym)));
      }
    }
  }
}

TEST_CASE("substitution composes") {
  Expr curve = parse_expr("sin(x1)", 1);
  Expr composed = curve.substitute({parse_expr("x1+x2", 2)});
  CHECK(composed.eval({0.3, 0.4}) == doctest::Approx(std::sin(0.7)).epsilon(1e-14));
}

TEST_CASE("constant folding bounds derivative trees") {
  CHECK(Expr::constant(2.0).partial(1).is_zero());
  Expr x = Expr::coord(1);
  CHECK((Expr::constant(0.0) * x).is_zero());
  double v = 0.0;
  CHECK((Expr::constant(1.0) * x + Expr::constant(0.0)).partial(1).is_constant(&v));
  CHECK(v == 1.0);
}
