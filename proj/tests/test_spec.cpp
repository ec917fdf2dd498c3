#include "rftflow/errors.hpp"
#include "rftflow/spec.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace rftflow;

namespace {
std::string spec_path(const char* name) { return std::string(RFTFLOW_SPEC_DIR) + "/" + name; }

void check_line(const std::string& text, std::size_t line) {
    try {
        parse_spec(text);
        FAIL("accepted: " << text);
    } catch (const SpecError& e) {
        CHECK_MESSAGE(e.line() == line, std::string(e.what()));
    }
}
} // namespace

TEST_CASE("bundled specs load and round trip") {
    for (const char* name : {"example1.spec", "example2.spec", "example3.spec",
                             "fullshift_n3.spec", "example2_sub.spec"}) {
        RftSpec s = load_spec(spec_path(name));
        RftSpec back = parse_spec(to_text(s));
        CHECK_MESSAGE(back == s, name);
        CHECK(to_text(back) == to_text(s));
    }
}

TEST_CASE("example 1 structure") {
    RftSpec s = load_spec(spec_path("example1.spec"));
    REQUIRE(s.classes.size() == 1);
    CHECK_FALSE(s.classes[0].is_finite());
    CHECK(s.edges.forbidden.size() == 5);
    auto v3 = s.find_vertex("V[3]");
    auto v4 = s.find_vertex("V[4]");
    auto v9 = s.find_vertex("V[9]");
    REQUIRE(v3);
    REQUIRE(v4);
    REQUIRE(v9);
    CHECK(s.root == v3);
    CHECK_FALSE(s.edge(*v3, *v3));
    CHECK_FALSE(s.edge(*v3, *v4));
    CHECK(s.edge(*v3, *v9));
    CHECK(s.edge(*v4, *v4));
    CHECK_FALSE(s.find_vertex("V[2]"));
    CHECK_FALSE(s.find_vertex("W[4]"));
    CHECK(s.height_of(*v4) == doctest::Approx(2 * std::log(5.0)));
}

TEST_CASE("finite heights are constant expressions") {
    RftSpec s = parse_spec("class a finite { x: 2*ln(2.5), y: 1 }\nedges complete_minus_D\n");
    CHECK(s.height_of(*s.find_vertex("x")) == doctest::Approx(2 * std::log(2.5)));
    CHECK(s.all_finite());
    CHECK(s.named_vertex_count() == 2);
}

TEST_CASE("comments and layout") {
    RftSpec s = parse_spec("# header\n\nclass a finite { x: 1 } # trailing\n"
                           "edges pairs {\n (a,a)\n}\nroot x\n");
    CHECK(s.edges.class_pairs.size() == 1);
    CHECK(s.root.has_value());
}

TEST_CASE("invalid specs are rejected with positions") {
    check_line("class a finite { x: 1 }\nclass a finite { y: 1 }\n", 2);
    check_line("class a finite { x: 1, x: 2 }\nedges complete_minus_D\n", 1);
    check_line("class a finite { x: -1 }\n", 1);
    check_line("class a finite { x: k }\n", 1);
    check_line("class a finite { x: 1 }\nedges pairs { (a,b) }\n", 2);
    check_line("class a finite { x: 1 }\nedges complete_minus_D\nforbid { (x,z) }\n", 3);
    check_line("class a finite { x: 1 }\nedges complete_minus_D\nedges complete_minus_D\n", 3);
    check_line("class a finite { x: 1 }\nroot q\nedges complete_minus_D\n", 2);
    check_line("class a family k from 1 height k mult 2\nedges complete_minus_D\n"
               "forbid { (a[1],a[1]) }\n", 3);
    check_line("class a finite { x: 1 }\nbogus\n", 2);
    check_line("class a family k from 1 height 1 + \n", 1);
}

TEST_CASE("semantic validation") {
    CHECK_THROWS_AS(parse_spec("class a finite { x: 1 }\n"), SpecError);
    CHECK_THROWS_AS(parse_spec("class a family k from 1 height k - 5\nedges complete_minus_D\n"), SpecError);
    CHECK_THROWS_AS(parse_spec("class a family k from 1 height k mult 0.5\nedges complete_minus_D\n"), SpecError);
    CHECK_THROWS_AS(parse_spec("class a family k from 1 height k mult floor(1/k)\nedges complete_minus_D\n"), SpecError);
    CHECK_THROWS_AS(parse_spec("class a family k from 1 height ln(k - 1)\nedges complete_minus_D\n"), SpecError);
    // D removes edges; it cannot name a pair the class rules never allowed.
    CHECK_THROWS_AS(parse_spec("class a finite { x: 1 }\nclass b finite { y: 1 }\n"
                               "edges pairs { (a,b) }\nforbid { (y,x) }\n"),
                    SpecError);
    CHECK_THROWS_AS(load_spec("/nonexistent/file.spec"), SpecError);
}
