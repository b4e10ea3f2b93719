#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "cfgdist/degree_sequence.hpp"
#include "cfgdist/rng.hpp"

namespace cfgdist {

inline constexpr std::int64_t kInfiniteHop = -1;
inline constexpr StubId kUnpaired = std::numeric_limits<StubId>::max();

// Multigraph as a fixed-point-free involution on stub indices. Self-loops and
// multi-edges are kept; traversal collapses them.
class StubGraph {
public:
    StubGraph(DegreeSequence seq, std::vector<StubId> partner);

    const DegreeSequence& seq() const { return seq_; }
    std::int64_t n() const { return seq_.n(); }
    std::int64_t edge_count() const { return seq_.total_stubs() / 2; }
    StubId partner(StubId s) const { return partner_[s]; }

    // one "u v" pair per line, 1-indexed
    void write_edge_list(std::ostream& out) const;

private:
    DegreeSequence seq_;
    std::vector<StubId> partner_;
};

// Uniform perfect matching on the stubs: repeatedly pair an arbitrary unmatched
// stub with a uniform other unmatched stub. Equal in law to pairing the
// lowest-indexed stub first.
template <uniform_source R>
StubGraph pair_stubs(const DegreeSequence& seq, R& rng) {
    const std::int64_t l = seq.total_stubs();
    if (l % 2 != 0) throw std::invalid_argument("pair_stubs: odd stub count");
    std::vector<StubId> partner(static_cast<std::size_t>(l), kUnpaired);
    std::vector<StubId> pool(static_cast<std::size_t>(l));
    for (std::int64_t s = 0; s < l; ++s) pool[static_cast<std::size_t>(s)] = static_cast<StubId>(s);
    while (!pool.empty()) {
        const StubId a = pool.back();
        pool.pop_back();
        const std::size_t r = static_cast<std::size_t>(rng.uniform_below(pool.size()));
        const StubId b = pool[r];
        pool[r] = pool.back();
        pool.pop_back();
        partner[a] = b;
        partner[b] = a;
    }
    return StubGraph(seq, std::move(partner));
}

// BFS graph distance between u and v; kInfiniteHop when disconnected.
std::int64_t hopcount(const StubGraph& g, NodeId u, NodeId v);

struct ComponentSummary {
    std::vector<std::int64_t> sizes; // descending
    double largest_fraction = 0.0;
    std::int64_t second_largest = 0; // 0 when the graph is connected
};

// Union-find over the pairing.
ComponentSummary components(const StubGraph& g);

// Enforce the degree cap ceil(N^{1/4-eps}) - 1 by edge removal: first uniform
// removal among edges whose two endpoints both exceed the cap, then uniform
// removal among edges incident to nodes still above it. Returns the reduced
// graph and the number of removed edges.
struct TruncationResult {
    StubGraph graph;
    std::int64_t removed_edges = 0;
    std::int64_t degree_cap = 0;
};

TruncationResult truncate_graph(const StubGraph& g, double eps, RandomStream& rng);

} // namespace cfgdist
