#include "rftflow/entropy.hpp"
#include "rftflow/errors.hpp"
#include "support/random_spec.hpp"

#include <doctest.h>

#include <cmath>

using namespace rftflow;

namespace {
std::string spec_path(const char* name) { return std::string(RFTFLOW_SPEC_DIR) + "/" + name; }

RftSpec complete(int n, double h = 1.0) {
    std::string text = "class s finite {";
    for (int i = 0; i < n; ++i)
        text += (i ? ", v" : " v") + std::to_string(i) + ": " + format_number(h);
    return parse_spec(text + " }\nedges complete_minus_D\nroot v0\n");
}
} // namespace

TEST_CASE("full shifts") {
    for (int n = 2; n <= 10; ++n) {
        QuotientGraph q = build_quotient(complete(n));
        EntropyReport r = solve_entropy(q);
        CHECK(r.entropy == doctest::Approx(std::log(n)).epsilon(1e-10));
        CHECK(r.mme == Mme::Exists);
        if (n > 2) {
            REQUIRE(r.x_tilde0);
            CHECK(*r.x_tilde0 == doctest::Approx(1.0 / (n - 1)).epsilon(1e-10));
        }
        CHECK(r.bracket_hi - r.bracket_lo <= 1e-12);
    }
}

TEST_CASE("example 2") {
    RftSpec s = load_spec(spec_path("example2.spec"));
    EntropyReport r = solve_entropy(build_quotient(s));
    // Independent 40-digit solve of phi = 1 for this graph.
    CHECK(r.entropy == doctest::Approx(0.86646195235124).epsilon(1e-10));
    CHECK(std::fabs(r.entropy - 0.8665) < 5e-4);
    CHECK(r.mme == Mme::Exists);
    CHECK(r.phi_at_xhat == doctest::Approx(1.0).epsilon(1e-8));
    REQUIRE(r.r_F.exact);
    CHECK(*r.r_F.exact == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("example 1") {
    RftSpec s = load_spec(spec_path("example1.spec"));
    EntropyReport r = solve_entropy(build_quotient(s));
    CHECK(r.entropy == doctest::Approx(0.72557923483297412).epsilon(1e-10));
    CHECK(r.mme == Mme::Exists);
}

TEST_CASE("example 3 has no measure of maximal entropy") {
    RftSpec s = load_spec(spec_path("example3.spec"));
    EntropyReport r = solve_entropy(build_quotient(s));
    CHECK(r.x_hat == 0.5);
    CHECK(r.entropy == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK_FALSE(r.x_tilde0);
    CHECK(r.r_phi == 0.5);
    CHECK(r.mme == Mme::DoesNotExist);
    CHECK(r.phi_at_xhat < 0.85);
}

TEST_CASE("infinite entropy is an error") {
    RftSpec s = parse_spec("class a finite { x: 1 }\nclass t family k from 1 height 1\n"
                           "edges complete_minus_D\nroot x\n");
    CHECK_THROWS_AS(solve_entropy(build_quotient(s)), NumericalError);
}

TEST_CASE("single loop has zero entropy") {
    RftSpec s = parse_spec("class a finite { x: 2 }\nedges complete_minus_D\nroot x\n");
    EntropyReport r = solve_entropy(build_quotient(s));
    CHECK(r.x_hat == 1.0);
    CHECK(r.entropy == 0.0);
    CHECK(r.mme == Mme::Exists);
}

TEST_CASE("entropy does not depend on the root") {
    RftSpec s = load_spec(spec_path("example2.spec"));
    double h = solve_entropy(build_quotient(s, "2")).entropy;
    for (const char* w : {"-2", "3", "-3", "p4[4]", "n4[7]"})
        CHECK(std::fabs(solve_entropy(build_quotient(s, w)).entropy - h) < 1e-8);

    std::mt19937_64 rng(5);
    for (int t = 0; t < 30; ++t) {
        RftSpec r = testing::random_rft_spec(rng);
        double h0 = solve_entropy(build_quotient(r)).entropy;
        for (const auto& v : named_vertices(r))
            CHECK(std::fabs(solve_entropy(build_quotient(r, v)).entropy - h0) < 1e-8);
    }
}

TEST_CASE("height scaling") {
    for (double c : {0.5, 2.0, 3.0}) {
        std::string text = "class s finite { a: " + format_number(c * 1.0) + ", b: "
                         + format_number(c * 2.0) + ", d: " + format_number(c * 1.5)
                         + " }\nclass t family k from 1 height " + format_number(c)
                         + "*(1 + 2*ln(k))\nedges complete_minus_D\nforbid { (a,a), (b,d) }\nroot a\n";
        std::string base = "class s finite { a: 1, b: 2, d: 1.5 }\n"
                           "class t family k from 1 height 1 + 2*ln(k)\n"
                           "edges complete_minus_D\nforbid { (a,a), (b,d) }\nroot a\n";
        double h1 = solve_entropy(build_quotient(parse_spec(base))).entropy;
        double hc = solve_entropy(build_quotient(parse_spec(text))).entropy;
        CHECK(std::fabs(hc - h1 / c) < 1e-8);
    }
}
