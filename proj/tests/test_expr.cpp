#include "rftflow/errors.hpp"
#include "rftflow/expr.hpp"

#include <doctest.h>

#include <cmath>

using namespace rftflow;

TEST_CASE("precedence and associativity") {
    CHECK(Expr::parse("-2^2").eval(0) == -4.0);
    CHECK(Expr::parse("2^-1").eval(0) == 0.5);
    CHECK(Expr::parse("2^3^2").eval(0) == 512.0);
    CHECK(Expr::parse("1 + 2*3 - 4/2").eval(0) == 5.0);
    CHECK(Expr::parse("(1 + 2)*3").eval(0) == 9.0);
    CHECK(Expr::parse("10 - 4 - 3").eval(0) == 3.0);
    CHECK(Expr::parse("1.5e2").eval(0) == 150.0);
}

TEST_CASE("index variable and functions") {
    Expr h = Expr::parse("2*ln(1.25*k)");
    CHECK(h.depends_on_index());
    CHECK(h.eval(2) == doctest::Approx(1.8325814637483102).epsilon(1e-15));
    CHECK(Expr::parse("floor(2^k/k^2)").eval(5) == 1.0);
    CHECK(Expr::parse("floor(2^k/k^2)").eval(10) == 10.0);
    CHECK(Expr::parse("abs(3 - k)").eval(7) == 4.0);
    CHECK(Expr::parse("exp(0)").eval(0) == 1.0);
    CHECK_FALSE(Expr::parse("ln(2)").depends_on_index());
}

TEST_CASE("domain errors carry the index") {
    CHECK_THROWS_AS(Expr::parse("ln(k - 3)").eval(3), ExprDomainError);
    try {
        Expr::parse("1/(k - 4)").eval(4);
        FAIL("no throw");
    } catch (const ExprDomainError& e) {
        CHECK(e.index() == 4);
    }
    CHECK_THROWS_AS(Expr::parse("2^k").eval(5000), ExprDomainError);
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(Expr::parse(""), SpecError);
    CHECK_THROWS_AS(Expr::parse("1 +"), SpecError);
    CHECK_THROWS_AS(Expr::parse("sin(k)"), SpecError);
    CHECK_THROWS_AS(Expr::parse("(k"), SpecError);
    CHECK_THROWS_AS(Expr::parse("k k"), SpecError);
    try {
        Expr::parse("1 + * 2", 3, 10);
        FAIL("no throw");
    } catch (const SpecError& e) {
        CHECK(e.line() == 3);
        CHECK(e.column() >= 10);
    }
}

TEST_CASE("to_string round trips") {
    for (const char* s : {"2*ln(1.25*k)", "-2^2", "2^-1", "(1 + k)*(2 - k)", "k/(k + 1)/3",
                          "floor(2^k/k^2)", "exp(-k)", "1 - (2 - k)", "0.1 + 1e-7*k",
                          "abs(-k)^0.5", "2^3^2", "(2^3)^2"}) {
        Expr e = Expr::parse(s);
        Expr back = Expr::parse(e.to_string());
        CHECK_MESSAGE(back == e, s << " -> " << e.to_string());
        CHECK(back.eval(3) == e.eval(3));
    }
}

TEST_CASE("format_number is shortest round trip") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(2.0) == "2");
    CHECK(std::stod(format_number(std::log(2.0))) == std::log(2.0));
}

TEST_CASE("additive shape") {
    auto a = Expr::parse("2*ln(1.25*k)").additive_form();
    REQUIRE(a);
    CHECK(a->lin == 0.0);
    CHECK(a->logk == doctest::Approx(2.0));
    CHECK(a->constant == doctest::Approx(2 * std::log(1.25)));
    auto b = Expr::parse("3*k + 1").additive_form();
    REQUIRE(b);
    CHECK(b->lin == 3.0);
    CHECK(b->constant == 1.0);
    CHECK_FALSE(Expr::parse("k^2").additive_form());
}

TEST_CASE("growth shape") {
    auto g = Expr::parse("floor(2^k/k^2)").growth_form();
    REQUIRE(g);
    CHECK(g->base == doctest::Approx(2.0));
    CHECK(g->power == doctest::Approx(-2.0));
    CHECK(g->envelope);
    auto c = Expr::parse("3").growth_form();
    REQUIRE(c);
    CHECK(c->coef == 3.0);
    CHECK_FALSE(c->envelope);
    auto p = Expr::parse("k^2").growth_form();
    REQUIRE(p);
    CHECK(p->power == 2.0);
}
