#include "rftflow/cycle_oracle.hpp"

#include "rftflow/errors.hpp"

#include <cmath>
#include <set>
#include <unordered_map>

namespace rftflow {

TruncatedGraph truncate(const RftSpec& spec, const VertexRef& w, std::size_t n,
                        std::size_t max_vertices) {
    std::set<VertexRef> named;
    for (const auto& [a, b] : spec.edges.forbidden) {
        named.insert(a);
        named.insert(b);
    }
    named.insert(w);

    TruncatedGraph g;
    std::vector<VertexRef> refs;
    auto add = [&](const VertexRef& v, const std::string& label, double h) {
        if (g.size() >= max_vertices)
            throw BudgetExceeded("truncated graph exceeds " + std::to_string(max_vertices)
                                 + " vertices");
        if (v == w)
            g.root = g.size();
        g.labels.push_back(label);
        g.heights.push_back(h);
        refs.push_back(v);
    };
    for (std::size_t d = 0; d < spec.classes.size(); ++d) {
        const ClassDecl& c = spec.classes[d];
        if (c.is_finite()) {
            for (std::size_t j = 0; j < c.finite().vertices.size(); ++j)
                add({d, static_cast<long long>(j)}, c.finite().vertices[j].label,
                    c.finite().vertices[j].value);
            continue;
        }
        const FamilyClass& f = c.family();
        std::set<long long> ks;
        for (std::size_t i = 0; i < n; ++i)
            ks.insert(f.start + static_cast<long long>(i));
        for (const auto& v : named)
            if (v.decl == d)
                ks.insert(v.member);
        for (long long k : ks) {
            double m = f.multiplicity.eval(k);
            double h = f.height.eval(k);
            std::string base = c.name + "[" + std::to_string(k) + "]";
            for (double j = 0; j < m; ++j)
                add({d, k}, j == 0 ? base : base + "#" + std::to_string(static_cast<long long>(j)), h);
        }
    }
    // Copies of one family index share the index's edges; D only names
    // single-member indices so the rule applies to each copy alike.
    g.out.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j)
            if (spec.edge(refs[i], refs[j]))
                g.out[i].push_back(j);
    return g;
}

long long weight_bucket(double weight, double quantum) {
    return std::llround(weight / quantum);
}

bool CyclePoly::empty() const {
    for (const auto& m : by_length)
        if (!m.empty())
            return false;
    return true;
}

std::uint64_t CyclePoly::count(std::size_t length) const {
    std::uint64_t c = 0;
    if (length < by_length.size())
        for (const auto& [b, n] : by_length[length])
            c += n;
    return c;
}

CyclePoly enumerate_cycles(const TruncatedGraph& g, std::size_t max_len, std::size_t max_states) {
    CyclePoly poly;
    poly.by_length.resize(max_len + 1);
    std::vector<long long> hb(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        hb[i] = weight_bucket(g.heights[i], poly.quantum);

    auto add = [](std::uint64_t& into, std::uint64_t v) {
        if (__builtin_add_overflow(into, v, &into))
            throw BudgetExceeded("cycle count overflows 64 bits");
    };

    // frontier[v][bucket]: paths from w of the current length ending at
    // v != w, weight summed over every vertex visited so far.
    using Layer = std::vector<std::unordered_map<long long, std::uint64_t>>;
    Layer frontier(g.size());
    frontier[g.root][hb[g.root]] = 1;
    for (std::size_t len = 1; len <= max_len; ++len) {
        Layer next(g.size());
        std::size_t states = 0;
        for (std::size_t v = 0; v < g.size(); ++v) {
            for (const auto& [b, c] : frontier[v]) {
                for (std::size_t u : g.out[v]) {
                    if (u == g.root) {
                        add(poly.by_length[len][b], c);
                        continue;
                    }
                    auto& slot = next[u][b + hb[u]];
                    if (slot == 0 && ++states > max_states)
                        throw BudgetExceeded("cycle enumeration exceeds "
                                             + std::to_string(max_states) + " states");
                    add(slot, c);
                }
            }
        }
        frontier = std::move(next);
    }
    return poly;
}

double phi_truncated(const CyclePoly& poly, double x, std::size_t max_len) {
    double s = 0.0;
    for (std::size_t len = 1; len < poly.by_length.size() && len <= max_len; ++len)
        for (const auto& [b, c] : poly.by_length[len])
            s += static_cast<double>(c) * std::pow(x, static_cast<double>(b) * poly.quantum);
    return s;
}

} // namespace rftflow
