#include "rftflow/errors.hpp"
#include "rftflow/quotient.hpp"
#include "support/random_spec.hpp"

#include <doctest.h>

#include <algorithm>

using namespace rftflow;

namespace {
std::string spec_path(const char* name) { return std::string(RFTFLOW_SPEC_DIR) + "/" + name; }

std::vector<std::string> described(const RftSpec& s, const std::vector<VertexClass>& cs) {
    std::vector<std::string> out;
    for (const auto& c : cs)
        out.push_back(describe(s, c));
    return out;
}
} // namespace

TEST_CASE("example 1 partition") {
    RftSpec s = load_spec(spec_path("example1.spec"));
    auto p = refine_partition(s);
    CHECK(described(s, p)
          == std::vector<std::string>{"{V[3]}", "{V[4], V[5]}", "{V[6], V[7], ...}"});
}

TEST_CASE("example 2 partition has the eight classes") {
    RftSpec s = load_spec(spec_path("example2.spec"));
    auto p = refine_partition(s);
    CHECK(described(s, p)
          == std::vector<std::string>{"{2}", "{3}", "{p4[4], p4[5]}", "{p4[6], p4[7], ...}",
                                      "{-2}", "{-3}", "{n4[4], n4[5]}", "{n4[6], n4[7], ...}"});
}

TEST_CASE("complete graph stays one class") {
    RftSpec s = parse_spec("class s finite { a: 1, b: 1, c: 1 }\nedges complete_minus_D\n");
    auto p = refine_partition(s);
    REQUIRE(p.size() == 1);
    CHECK(p[0].named.size() == 3);
}

TEST_CASE("user classes with equal signatures merge") {
    RftSpec s = parse_spec("class a finite { x: 1 }\nclass b finite { y: 2 }\n"
                           "class t family k from 1 height k\nedges complete_minus_D\n");
    auto p = refine_partition(s);
    REQUIRE(p.size() == 1);
    CHECK(p[0].named.size() == 2);
    CHECK(p[0].remainders.size() == 1);
}

TEST_CASE("refinement is idempotent and independent of declaration order") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 50; ++t) {
        RftSpec s = testing::random_rft_spec(rng);
        auto p = refine_partition(s);
        // Re-declare each class of P as a finite class, in reverse order.
        std::ostringstream text;
        std::map<std::string, std::string> pos;
        for (std::size_t i = p.size(); i-- > 0;) {
            text << "class q" << i << " finite {";
            for (std::size_t j = 0; j < p[i].named.size(); ++j) {
                const auto& v = p[i].named[j];
                text << (j ? ", " : " ") << s.label_of(v) << ": " << s.height_of(v);
            }
            text << " }\n";
        }
        text << "edges complete_minus_D\n";
        if (!s.edges.forbidden.empty()) {
            text << "forbid {";
            bool first = true;
            for (const auto& [a, b] : s.edges.forbidden) {
                text << (first ? " " : ", ") << "(" << s.label_of(a) << "," << s.label_of(b) << ")";
                first = false;
            }
            text << " }\n";
        }
        RftSpec again = parse_spec(text.str());
        auto p2 = refine_partition(again);
        auto sets = [](const RftSpec& sp, const std::vector<VertexClass>& cs) {
            std::set<std::set<std::string>> out;
            for (const auto& c : cs) {
                std::set<std::string> labels;
                for (const auto& v : c.named)
                    labels.insert(sp.label_of(v));
                out.insert(labels);
            }
            return out;
        };
        CHECK(sets(s, p) == sets(again, p2));
        CHECK(p2.size() == p.size());
    }
}

TEST_CASE("example 1 quotient") {
    RftSpec s = load_spec(spec_path("example1.spec"));
    QuotientGraph q = build_quotient(s);
    REQUIRE(q.m() == 2);
    CHECK(q.ell == 1);
    CHECK(describe(s, q.classes[1]) == "{V[4], V[5]}");
    CHECK(q.followers(0) == std::set<std::size_t>{2});
    CHECK(q.followers(1) == std::set<std::size_t>{1, 2});
    CHECK(q.followers(2) == std::set<std::size_t>{0, 1, 2});
    CHECK(q.leaders(0) == std::set<std::size_t>{2});
}

TEST_CASE("example 2 quotient") {
    RftSpec s = load_spec(spec_path("example2.spec"));
    QuotientGraph q = build_quotient(s, "2");
    REQUIRE(q.m() == 7);
    CHECK(q.ell == 7);
    CHECK(describe(s, q.classes[4]) == "{-2}");
    CHECK(q.followers(4) == std::set<std::size_t>{0, 1, 2, 3});
    CHECK(q.followers(0) == std::set<std::size_t>{4, 5, 6, 7});
}

TEST_CASE("root may be any named vertex") {
    RftSpec s = load_spec(spec_path("example2.spec"));
    QuotientGraph q = build_quotient(s, "p4[9]");
    CHECK(describe(s, q.classes[0]) == "{p4[9]}");
    CHECK_THROWS_AS(build_quotient(s, "nope"), GraphError);
    CHECK_THROWS_AS(build_quotient(s, "p4[2]"), GraphError);
}

TEST_CASE("single vertex with a loop") {
    RftSpec s = parse_spec("class s finite { a: 1 }\nedges complete_minus_D\nroot a\n");
    QuotientGraph q = build_quotient(s);
    CHECK(q.m() == 0);
    CHECK(q.adjacency[0][0]);
    LevelCheck lc = tree_level_check(q);
    CHECK(lc.ok);
    CHECK(lc.level[0] == 0);
}

TEST_CASE("disconnected graphs are rejected") {
    RftSpec s = parse_spec("class a finite { x: 1 }\nclass b finite { y: 1 }\n"
                           "edges pairs { (a,a), (b,b) }\nroot x\n");
    CHECK_THROWS_AS(build_quotient(s), GraphError);
    RftSpec lone = parse_spec("class a finite { x: 1 }\nedges complete_minus_D\n"
                              "forbid { (x,x) }\nroot x\n");
    CHECK_THROWS_AS(build_quotient(lone), GraphError);
}

TEST_CASE("tree level bound") {
    RftSpec s = load_spec(spec_path("example1.spec"));
    LevelCheck lc = tree_level_check(build_quotient(s));
    CHECK(lc.ok);
    CHECK(lc.level == std::vector<std::size_t>{0, 2, 1});
    CHECK(lc.bound == 2);

    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
        RftSpec r = testing::random_rft_spec(rng);
        CHECK(tree_level_check(build_quotient(r)).ok);
    }
}

TEST_CASE("bands order the classes") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 100; ++t) {
        QuotientGraph q = build_quotient(testing::random_rft_spec(rng));
        std::size_t n = q.classes.size();
        int last = 0;
        std::size_t full = 0;
        for (std::size_t i = 1; i < n; ++i) {
            auto f = q.followers(i), l = q.leaders(i);
            int band = f.size() < n ? 1 : (l.size() < n ? 2 : 3);
            CHECK(band >= last);
            CHECK((band == 1) == (i <= q.ell));
            last = band;
            full += band == 3;
        }
        CHECK(full <= 1);
    }
}
