#pragma once

#include "rftflow/spec.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace rftflow {

/// Finite sub-graph: every named vertex plus the first N indices of each
/// family (index k repeated m(k) times).
struct TruncatedGraph {
    std::vector<std::string> labels;
    std::vector<double> heights;
    std::vector<std::vector<std::size_t>> out; // adjacency lists
    std::size_t root = 0;

    std::size_t size() const { return labels.size(); }
};

/// Throws BudgetExceeded beyond max_vertices.
TruncatedGraph truncate(const RftSpec& spec, const VertexRef& w, std::size_t n,
                        std::size_t max_vertices = 100'000);

/// Weights of w-cycles, bucketed to `quantum`, per cycle length.
struct CyclePoly {
    double quantum = 1e-12;
    /// by_length[L][bucket] = number of cycles of length L and weight bucket*quantum.
    std::vector<std::map<long long, std::uint64_t>> by_length;

    std::size_t max_length() const { return by_length.empty() ? 0 : by_length.size() - 1; }
    bool empty() const;
    std::uint64_t count(std::size_t length) const;
};

long long weight_bucket(double weight, double quantum = 1e-12);

/// All paths w -> w of length 1..L that avoid w in the interior (interior
/// vertices may repeat). Exact counts; throws BudgetExceeded when the
/// number of live (vertex, weight) states exceeds max_states or a count
/// overflows.
CyclePoly enumerate_cycles(const TruncatedGraph& g, std::size_t max_len,
                           std::size_t max_states = 5'000'000);

/// sum count * x^weight over cycles of length <= max_len (all by default).
double phi_truncated(const CyclePoly& poly, double x, std::size_t max_len = SIZE_MAX);

} // namespace rftflow
