#pragma once

#include "rftflow/expr.hpp"

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace rftflow {

struct NamedVertex {
    std::string label;
    Expr height;        // constant expression
    double value = 0.0; // its evaluated, strictly positive value

    friend bool operator==(const NamedVertex&, const NamedVertex&) = default;
};

struct FiniteClass {
    std::vector<NamedVertex> vertices;

    friend bool operator==(const FiniteClass&, const FiniteClass&) = default;
};

/// Countable family {k0, k0+1, ...}; index k contributes multiplicity(k)
/// vertices of height height(k).
struct FamilyClass {
    long long start = 1;
    Expr height;
    Expr multiplicity = Expr::constant(1.0);

    friend bool operator==(const FamilyClass&, const FamilyClass&) = default;
};

struct ClassDecl {
    std::string name;
    std::variant<FiniteClass, FamilyClass> kind;

    bool is_finite() const { return std::holds_alternative<FiniteClass>(kind); }
    const FiniteClass& finite() const { return std::get<FiniteClass>(kind); }
    const FamilyClass& family() const { return std::get<FamilyClass>(kind); }

    friend bool operator==(const ClassDecl&, const ClassDecl&) = default;
};

/// A single named vertex: a member of a finite class (position in its
/// list) or the index-k member of a family written `name[k]`.
struct VertexRef {
    std::size_t decl = 0;
    long long member = 0;

    friend auto operator<=>(const VertexRef&, const VertexRef&) = default;
};

enum class EdgeMode { CompleteMinusForbidden, ClassPairs };

struct EdgeDecl {
    EdgeMode mode = EdgeMode::CompleteMinusForbidden;
    /// Allowed (from, to) declaration pairs; only used in ClassPairs mode.
    std::set<std::pair<std::size_t, std::size_t>> class_pairs;
    /// The finite exception set D.
    std::set<std::pair<VertexRef, VertexRef>> forbidden;

    friend bool operator==(const EdgeDecl&, const EdgeDecl&) = default;
};

class RftSpec {
public:
    std::vector<ClassDecl> classes;
    EdgeDecl edges;
    std::optional<VertexRef> root;

    /// Resolves "label" or "name[k]"; nullopt if no such vertex.
    std::optional<VertexRef> find_vertex(std::string_view label) const;
    std::string label_of(const VertexRef& v) const;
    double height_of(const VertexRef& v) const;

    /// Class-level rule before D is applied.
    bool class_edge(std::size_t from_decl, std::size_t to_decl) const;
    bool edge(const VertexRef& from, const VertexRef& to) const;

    bool all_finite() const;
    std::size_t named_vertex_count() const;

    /// Checks every invariant of the declarations; throws SpecError.
    void validate() const;

    friend bool operator==(const RftSpec&, const RftSpec&) = default;
};

/// Parses the chain-specification format and validates the result.
RftSpec parse_spec(std::string_view text);
RftSpec load_spec(const std::string& path);

/// Canonical text form; parse_spec(to_text(s)) == s.
std::string to_text(const RftSpec& spec);

/// Evaluates a height or multiplicity expression at k.
double eval_expr(const Expr& e, long long k);

} // namespace rftflow
