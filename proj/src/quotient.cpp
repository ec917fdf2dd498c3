#include "rftflow/quotient.hpp"

#include "rftflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace rftflow {

namespace {

// A named vertex, or the unnamed members of one family.
struct Atom {
    bool remainder = false;
    VertexRef v;      // when !remainder
    std::size_t decl; // owning declaration
};

std::vector<Atom> make_atoms(const RftSpec& spec, const std::set<VertexRef>& named) {
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < spec.classes.size(); ++i) {
        for (auto it = named.lower_bound({i, std::numeric_limits<long long>::min()});
             it != named.end() && it->decl == i; ++it)
            atoms.push_back({false, *it, i});
        if (!spec.classes[i].is_finite())
            atoms.push_back({true, {}, i});
    }
    return atoms;
}

bool atom_edge(const RftSpec& spec, const Atom& a, const Atom& b) {
    if (!a.remainder && !b.remainder)
        return spec.edge(a.v, b.v);
    return spec.class_edge(a.decl, b.decl);
}

std::set<VertexRef> named_set(const RftSpec& spec) {
    std::set<VertexRef> s;
    for (std::size_t i = 0; i < spec.classes.size(); ++i)
        if (spec.classes[i].is_finite())
            for (std::size_t j = 0; j < spec.classes[i].finite().vertices.size(); ++j)
                s.insert({i, static_cast<long long>(j)});
    for (const auto& [a, b] : spec.edges.forbidden) {
        s.insert(a);
        s.insert(b);
    }
    if (spec.root)
        s.insert(*spec.root);
    return s;
}

// Groups atoms by identical (follower, leader) signature; returns groups of
// atom indices ordered by first member.
std::vector<std::vector<std::size_t>> group_atoms(const RftSpec& spec,
                                                  const std::vector<Atom>& atoms) {
    std::size_t n = atoms.size();
    std::map<std::vector<bool>, std::size_t> index;
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t a = 0; a < n; ++a) {
        std::vector<bool> sig(2 * n);
        for (std::size_t b = 0; b < n; ++b) {
            sig[b] = atom_edge(spec, atoms[a], atoms[b]);
            sig[n + b] = atom_edge(spec, atoms[b], atoms[a]);
        }
        auto [it, fresh] = index.emplace(std::move(sig), groups.size());
        if (fresh)
            groups.emplace_back();
        groups[it->second].push_back(a);
    }
    return groups;
}

VertexClass to_class(const std::vector<Atom>& atoms, const std::vector<std::size_t>& group) {
    VertexClass c;
    for (std::size_t a : group) {
        if (atoms[a].remainder)
            c.remainders.push_back(atoms[a].decl);
        else
            c.named.push_back(atoms[a].v);
    }
    return c;
}

} // namespace

std::vector<VertexRef> named_vertices(const RftSpec& spec) {
    auto s = named_set(spec);
    return {s.begin(), s.end()};
}

std::vector<VertexClass> refine_partition(const RftSpec& spec) {
    auto atoms = make_atoms(spec, named_set(spec));
    std::vector<VertexClass> out;
    for (const auto& g : group_atoms(spec, atoms))
        out.push_back(to_class(atoms, g));
    return out;
}

std::string describe(const RftSpec& spec, const VertexClass& c) {
    std::ostringstream out;
    out << "{";
    bool first = true;
    auto item = [&](const std::string& s) {
        out << (first ? "" : ", ") << s;
        first = false;
    };
    auto named = named_set(spec);
    for (const auto& v : c.named)
        item(spec.label_of(v));
    for (std::size_t d : c.remainders) {
        const auto& f = spec.classes[d].family();
        int shown = 0;
        for (long long k = f.start; shown < 2; ++k) {
            if (named.count({d, k}))
                continue;
            item(spec.classes[d].name + "[" + std::to_string(k) + "]");
            ++shown;
        }
        item("...");
    }
    out << "}";
    return out.str();
}

std::set<std::size_t> QuotientGraph::followers(std::size_t i) const {
    std::set<std::size_t> s;
    for (std::size_t j = 0; j < classes.size(); ++j)
        if (adjacency[i][j])
            s.insert(j);
    return s;
}

std::set<std::size_t> QuotientGraph::leaders(std::size_t i) const {
    std::set<std::size_t> s;
    for (std::size_t j = 0; j < classes.size(); ++j)
        if (adjacency[j][i])
            s.insert(j);
    return s;
}

SeriesValue QuotientGraph::alpha(std::size_t i, double x, const SeriesOptions& opts) const {
    const VertexClass& c = classes.at(i);
    SeriesValue total;
    double finite = 0.0;
    for (const auto& v : c.named)
        finite += std::pow(x, spec_.height_of(v));
    total.value = finite;
    for (std::size_t d : c.remainders) {
        auto peeled = peeled_.find(d);
        static const std::set<long long> none;
        total += series_.at(d).sum(x, opts, peeled == peeled_.end() ? none : peeled->second);
    }
    return total;
}

QuotientGraph build_quotient(const RftSpec& spec, const VertexRef& w) {
    if (w.decl >= spec.classes.size())
        throw GraphError("root refers to an unknown class");
    const ClassDecl& wd = spec.classes[w.decl];
    if (!wd.is_finite()) {
        const auto& f = wd.family();
        if (w.member < f.start || f.multiplicity.eval(w.member) != 1.0)
            throw GraphError("root '" + spec.label_of(w)
                             + "' is not a single vertex of its family");
    } else if (w.member < 0
               || static_cast<std::size_t>(w.member) >= wd.finite().vertices.size()) {
        throw GraphError("root index out of range");
    }

    auto named = named_set(spec);
    named.insert(w);
    auto atoms = make_atoms(spec, named);
    auto groups = group_atoms(spec, atoms);

    // W_w: split w off its class.
    std::size_t w_atom = 0;
    while (atoms[w_atom].remainder || !(atoms[w_atom].v == w))
        ++w_atom;
    std::vector<std::vector<std::size_t>> rest;
    for (auto& g : groups) {
        g.erase(std::remove(g.begin(), g.end(), w_atom), g.end());
        if (!g.empty())
            rest.push_back(g);
    }
    auto edge = [&](std::size_t a, std::size_t b) { return atom_edge(spec, atoms[a], atoms[b]); };
    std::size_t n = rest.size() + 1;
    std::vector<std::size_t> rep(n);
    rep[0] = w_atom;
    for (std::size_t i = 0; i < rest.size(); ++i)
        rep[i + 1] = rest[i].front();

    // Bands: missing out-edge; full out, missing in; full both.
    std::vector<int> band(n, 0);
    for (std::size_t i = 1; i < n; ++i) {
        bool full_out = true, full_in = true;
        for (std::size_t j = 0; j < n; ++j) {
            full_out = full_out && edge(rep[i], rep[j]);
            full_in = full_in && edge(rep[j], rep[i]);
        }
        band[i] = !full_out ? 1 : (!full_in ? 2 : 3);
    }
    std::vector<std::size_t> order(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        order[i] = i + 1;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return band[a] < band[b]; });
    order.insert(order.begin(), 0);

    QuotientGraph q;
    q.spec_ = spec;
    q.root = w;
    q.classes.push_back(VertexClass{{w}, {}});
    for (std::size_t i = 1; i < n; ++i) {
        q.classes.push_back(to_class(atoms, rest[order[i] - 1]));
        if (band[order[i]] == 1)
            ++q.ell;
    }
    q.adjacency.assign(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            q.adjacency[i][j] = edge(rep[order[i]], rep[order[j]]);

    for (const auto& v : named)
        if (!spec.classes[v.decl].is_finite())
            q.peeled_[v.decl].insert(v.member);
    for (std::size_t d = 0; d < spec.classes.size(); ++d)
        if (!spec.classes[d].is_finite())
            q.series_.emplace(d, FamilySeries(spec.classes[d].family()));

    // Strong connectivity through V_0.
    for (bool forward : {true, false}) {
        std::vector<bool> seen(n, false);
        std::deque<std::size_t> todo{0};
        seen[0] = true;
        while (!todo.empty()) {
            std::size_t i = todo.front();
            todo.pop_front();
            for (std::size_t j = 0; j < n; ++j) {
                bool e = forward ? q.adjacency[i][j] : q.adjacency[j][i];
                if (e && !seen[j]) {
                    seen[j] = true;
                    todo.push_back(j);
                }
            }
        }
        for (std::size_t j = 0; j < n; ++j)
            if (!seen[j])
                throw GraphError("graph is not connected: class " + describe(spec, q.classes[j])
                                 + (forward ? " is unreachable from " : " cannot reach ")
                                 + spec.label_of(w));
    }
    if (n == 1 && !q.adjacency[0][0])
        throw GraphError("graph has no cycles through " + spec.label_of(w));
    return q;
}

QuotientGraph build_quotient(const RftSpec& spec, const std::string& w) {
    if (w.empty()) {
        if (!spec.root)
            throw GraphError("no root vertex given");
        return build_quotient(spec, *spec.root);
    }
    auto v = spec.find_vertex(w);
    if (!v)
        throw GraphError("root vertex '" + w + "' not found");
    return build_quotient(spec, *v);
}

LevelCheck tree_level_check(const QuotientGraph& q) {
    std::size_t n = q.classes.size();
    constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();
    LevelCheck r;
    r.level.assign(n, kUnreached);
    r.level[0] = 0;
    std::deque<std::size_t> todo{0};
    while (!todo.empty()) {
        std::size_t i = todo.front();
        todo.pop_front();
        for (std::size_t j = 0; j < n; ++j)
            if (q.adjacency[i][j] && r.level[j] == kUnreached) {
                r.level[j] = r.level[i] + 1;
                todo.push_back(j);
            }
    }
    std::size_t k = 0;
    for (std::size_t j = 1; j < n; ++j)
        k += q.adjacency[0][j] ? 1 : 0;
    // Root sits at level 1 in the tree; the bound m - k + 2 there is
    // m - k + 1 in BFS distance.
    r.bound = q.m() + 1 - std::min(k, q.m() + 1);
    if (n == 1)
        r.bound = 0;
    r.ok = std::all_of(r.level.begin(), r.level.end(),
                       [&](std::size_t l) { return l <= r.bound; });
    return r;
}

} // namespace rftflow
