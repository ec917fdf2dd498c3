#pragma once

#include "rftflow/series.hpp"
#include "rftflow/spec.hpp"

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace rftflow {

/// A set of vertices of G described finitely: some named vertices plus,
/// for each listed family, every member that is not named anywhere.
struct VertexClass {
    std::vector<VertexRef> named;
    std::vector<std::size_t> remainders; // declaration indices of families

    bool finite() const { return remainders.empty(); }
    friend bool operator==(const VertexClass&, const VertexClass&) = default;
};

/// Class of the coarsest partition on which follower and leading sets are
/// constant. Order: by first appearance in declaration order.
std::vector<VertexClass> refine_partition(const RftSpec& spec);

/// Readable set notation, e.g. "{4, 5}" or "{V[6], V[7], ...}".
std::string describe(const RftSpec& spec, const VertexClass& c);

/// The named vertices of a spec: finite-class members, plus family
/// members mentioned by D or the root, in declaration order.
std::vector<VertexRef> named_vertices(const RftSpec& spec);

class QuotientGraph {
public:
    /// classes[0] = {w}; then the constrained classes (1..ell), then
    /// classes with all out-edges, then the class with all edges.
    std::vector<VertexClass> classes;
    /// adjacency[i][j]: every vertex of class i has an edge to every
    /// vertex of class j (and none does otherwise).
    std::vector<std::vector<bool>> adjacency;
    std::size_t ell = 0;
    VertexRef root;

    std::size_t m() const { return classes.size() - 1; }
    std::set<std::size_t> followers(std::size_t i) const;
    std::set<std::size_t> leaders(std::size_t i) const;

    const RftSpec& spec() const { return spec_; }

    /// alpha_i(x), with family members that are named elsewhere excluded.
    SeriesValue alpha(std::size_t i, double x, const SeriesOptions& opts = {}) const;

private:
    RftSpec spec_;
    std::map<std::size_t, std::set<long long>> peeled_;
    std::map<std::size_t, FamilySeries> series_;
    friend QuotientGraph build_quotient(const RftSpec&, const VertexRef&);
};

/// W_w and its quotient graph H. Throws GraphError if H is not strongly
/// connected (no w-cycles through some class).
QuotientGraph build_quotient(const RftSpec& spec, const VertexRef& w);
/// Uses the label (or the spec's root when empty).
QuotientGraph build_quotient(const RftSpec& spec, const std::string& w = {});

struct LevelCheck {
    std::vector<std::size_t> level; // BFS distance from V_0, per class
    std::size_t bound = 0;          // m - k + 1 in BFS distance
    bool ok = false;
};

LevelCheck tree_level_check(const QuotientGraph& q);

} // namespace rftflow
