#include "rftflow/errors.hpp"
#include "rftflow/genfun.hpp"
#include "support/random_spec.hpp"

#include <doctest.h>

#include <cmath>

using namespace rftflow;

namespace {
std::string spec_path(const char* name) { return std::string(RFTFLOW_SPEC_DIR) + "/" + name; }

double f(double v) { return 2 * std::log(1.25 * v); }

RftSpec complete(int n) {
    std::string text = "class s finite {";
    for (int i = 0; i < n; ++i)
        text += (i ? ", v" : " v") + std::to_string(i) + ": 1";
    return parse_spec(text + " }\nedges complete_minus_D\nroot v0\n");
}
} // namespace

TEST_CASE("example 1 system entries") {
    RftSpec s = load_spec(spec_path("example1.spec"));
    QuotientGraph q = build_quotient(s);
    double x = 0.3;
    WeightedSystem w = assemble(q, x);
    double a1 = std::pow(x, f(4)) + std::pow(x, f(5));
    CHECK(w.alpha_ij(1, 1) == doctest::Approx(a1));
    CHECK(w.alpha_ij(1, 2) == doctest::Approx(a1));
    CHECK(w.alpha_ij(1, 0) == 0.0);
    CHECK(w.alpha_ij(2, 0) == doctest::Approx(w.alpha[2].value));
    CHECK(w.alpha_ij(0, 2) == doctest::Approx(std::pow(x, f(3))));
    CHECK(w.alpha_ij(0, 1) == 0.0);
}

TEST_CASE("x = 0") {
    RftSpec s = load_spec(spec_path("example2.spec"));
    QuotientGraph q = build_quotient(s);
    WeightedSystem w = assemble(q, 0.0);
    CHECK(w.matrix_m().isApprox(-Eigen::MatrixXd::Identity(7, 7)));
    GenFunEval e = solve_phi(q, 0.0);
    CHECK(e.in_domain());
    CHECK(e.phi == 0.0);
    CHECK(e.A.isZero());
    CHECK(phi_closed_form(q, 0.0) == 0.0);
    auto [lhs, rhs] = determinant_identity(q, 0.0);
    CHECK(lhs == doctest::Approx(1.0));
    CHECK(rhs == 1.0);
}

TEST_CASE("complete graph closed form") {
    for (int n = 2; n <= 6; ++n) {
        QuotientGraph q = build_quotient(complete(n));
        for (double x = 0.01; x < 1.0 / (n - 1); x += 0.37 / n) {
            GenFunEval e = solve_phi(q, x);
            REQUIRE(e.in_domain());
            CHECK(e.phi == doctest::Approx(x / (1 - (n - 1) * x)).epsilon(1e-12));
            CHECK(phi_closed_form(q, x) == doctest::Approx(e.phi).epsilon(1e-12));
            CHECK(phi_local_perturbation(q.spec(), q.root, x) == doctest::Approx(e.phi).epsilon(1e-12));
        }
        CHECK(solve_phi(q, 1.0 / (n - 1) + 1e-6).status == PhiStatus::SingularAtOrBefore);
    }
}

TEST_CASE("example 1: four evaluation paths agree") {
    RftSpec s = load_spec(spec_path("example1.spec"));
    QuotientGraph q = build_quotient(s);
    // Values of the displayed closed form from an independent
    // 40-digit evaluation.
    const double oracle[] = {4.726384184310328e-07, 7.069473022550207e-05,
                             0.0016165509369612285, 0.021658139195391659};
    for (int i = 0; i < 4; ++i) {
        double x = 0.1 * (i + 1);
        GenFunEval e = solve_phi(q, x);
        REQUIRE(e.in_domain());
        CHECK(e.phi == doctest::Approx(oracle[i]).epsilon(1e-12));
        CHECK(phi_closed_form(q, x) == doctest::Approx(oracle[i]).epsilon(1e-12));
        CHECK(phi_local_perturbation(s, q.root, x) == doctest::Approx(oracle[i]).epsilon(1e-12));
        double F = vertex_series(s, x).value;
        double a3 = std::pow(x, f(3)), a4 = std::pow(x, f(4)), a5 = std::pow(x, f(5));
        double eq = a3 * (F - a3 - a4 - a5) * (1 - a4 - a5) / (1 + a3 - F);
        CHECK(eq == doctest::Approx(oracle[i]).epsilon(1e-12));
    }
}

TEST_CASE("example 2 row structure") {
    RftSpec s = load_spec(spec_path("example2.spec"));
    QuotientGraph q = build_quotient(s);
    double x = 0.42;
    GenFunEval e = solve_phi(q, x);
    REQUIRE(e.in_domain());
    WeightedSystem w = assemble(q, x);
    // A_4 = alpha_4 (1 + A_1 + A_2 + A_3)
    CHECK(e.A(3) == doctest::Approx(w.alpha[4].value * (1 + e.A(0) + e.A(1) + e.A(2))));
    for (int j : {5, 6, 7})
        CHECK(w.alpha_ij(4, j) == 0.0);
    CHECK(w.alpha[4].value == w.alpha[0].value);
    CHECK(phi_closed_form(q, x) == doctest::Approx(e.phi).epsilon(1e-11));
    CHECK_THROWS_AS(phi_local_perturbation(s, q.root, x), SpecError);
    CHECK_FALSE(is_local_perturbation(s));
}

TEST_CASE("example 3 at the radius") {
    RftSpec s = load_spec(spec_path("example3.spec"));
    QuotientGraph q = build_quotient(s);
    GenFunEval e = solve_phi(q, 0.5);
    REQUIRE(e.in_domain());
    CHECK(e.det_m == -1.0);
    const double oracle = 0.25329798793024699;
    CHECK(e.phi <= oracle);
    CHECK(e.phi_upper >= oracle);
    CHECK(e.phi_upper < 0.85);
    CHECK(solve_phi(q, 0.51).status == PhiStatus::BeyondSeriesRadius);
}

TEST_CASE("determinant identity on example 1") {
    RftSpec s = load_spec(spec_path("example1.spec"));
    QuotientGraph q = build_quotient(s);
    auto [lhs, rhs] = determinant_identity(q, 0.3);
    CHECK(std::fabs(lhs - rhs) < 1e-10);
}

TEST_CASE("random specs: paths agree, positivity, monotonicity, diagonal bound") {
    std::mt19937_64 rng(2024);
    testing::RandomSpecOptions opts;
    for (int t = 0; t < 60; ++t) {
        opts.with_family = t % 3 == 0;
        RftSpec s = testing::random_rft_spec(rng, opts);
        QuotientGraph q = build_quotient(s);
        double prev = 0.0;
        for (double x = 0.02; x < 0.6; x += 0.02) {
            GenFunEval e = solve_phi(q, x);
            if (!e.in_domain())
                break;
            CHECK(e.phi >= prev - 1e-12);
            prev = e.phi;
            for (Eigen::Index i = 0; i < e.A.size(); ++i)
                CHECK(e.A(i) > 0.0);
            WeightedSystem w = assemble(q, x);
            for (std::size_t i = 1; i <= q.m(); ++i)
                if (w.alpha_ij(i, i) > 0.0)
                    CHECK(w.alpha_ij(i, i) < 1.0);
            double tol = 1e-9 * std::max(1.0, e.phi);
            CHECK(std::fabs(phi_closed_form(q, x) - e.phi) < tol);
            if (is_local_perturbation(s))
                CHECK(std::fabs(phi_local_perturbation(s, q.root, x) - e.phi) < tol);
            auto [lhs, rhs] = determinant_identity(q, x);
            CHECK(std::fabs(lhs - rhs) < 1e-9);
        }
    }
}
