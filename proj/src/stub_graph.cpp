#include "cfgdist/stub_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace cfgdist {

StubGraph::StubGraph(DegreeSequence seq, std::vector<StubId> partner)
    : seq_(std::move(seq)), partner_(std::move(partner)) {
    if (partner_.size() != static_cast<std::size_t>(seq_.total_stubs()))
        throw std::invalid_argument("stub graph: pairing size mismatch");
    for (std::size_t s = 0; s < partner_.size(); ++s) {
        const StubId t = partner_[s];
        if (t == static_cast<StubId>(s) || t >= partner_.size() ||
            partner_[t] != static_cast<StubId>(s))
            throw std::invalid_argument("stub graph: pairing is not a fixed-point-free involution");
    }
}

void StubGraph::write_edge_list(std::ostream& out) const {
    for (std::size_t s = 0; s < partner_.size(); ++s) {
        const StubId t = partner_[s];
        if (t < s) continue;
        out << (seq_.node_of(static_cast<StubId>(s)) + 1) << ' ' << (seq_.node_of(t) + 1) << '\n';
    }
}

std::int64_t hopcount(const StubGraph& g, NodeId u, NodeId v) {
    if (u == v) return 0;
    const auto& seq = g.seq();
    std::vector<std::int64_t> dist(static_cast<std::size_t>(seq.n()), kInfiniteHop);
    std::deque<NodeId> queue{u};
    dist[u] = 0;
    while (!queue.empty()) {
        const NodeId x = queue.front();
        queue.pop_front();
        const StubId begin = seq.first_stub(x);
        const StubId end = begin + static_cast<StubId>(seq.degree(x));
        for (StubId s = begin; s < end; ++s) {
            const NodeId y = seq.node_of(g.partner(s));
            if (dist[y] != kInfiniteHop) continue;
            dist[y] = dist[x] + 1;
            if (y == v) return dist[y];
            queue.push_back(y);
        }
    }
    return kInfiniteHop;
}

namespace {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), NodeId{0});
    }
    NodeId find(NodeId x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]]; // path halving
            x = parent_[x];
        }
        return x;
    }
    void unite(NodeId a, NodeId b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
    }
    std::int64_t size_of(NodeId root) const { return size_[root]; }

private:
    std::vector<NodeId> parent_;
    std::vector<std::int64_t> size_;
};

} // namespace

ComponentSummary components(const StubGraph& g) {
    const auto& seq = g.seq();
    UnionFind uf(static_cast<std::size_t>(seq.n()));
    for (StubId s = 0; s < static_cast<StubId>(seq.total_stubs()); ++s)
        uf.unite(seq.node_of(s), seq.node_of(g.partner(s)));

    std::vector<std::int64_t> sizes;
    for (NodeId v = 0; v < static_cast<NodeId>(seq.n()); ++v)
        if (uf.find(v) == v) sizes.push_back(uf.size_of(v));
    std::sort(sizes.begin(), sizes.end(), std::greater<>());

    ComponentSummary out;
    out.sizes = std::move(sizes);
    out.largest_fraction = static_cast<double>(out.sizes.front()) / static_cast<double>(seq.n());
    out.second_largest = out.sizes.size() > 1 ? out.sizes[1] : 0;
    return out;
}

TruncationResult truncate_graph(const StubGraph& g, double eps, RandomStream& rng) {
    if (!(eps > 0.0 && eps < 0.25)) throw std::invalid_argument("truncate_graph: eps in (0, 1/4)");
    const auto& seq = g.seq();
    const double n = static_cast<double>(seq.n());
    const std::int64_t cap =
        static_cast<std::int64_t>(std::ceil(std::pow(n, 0.25 - eps) - 1e-12)) - 1;

    struct Edge {
        StubId a, b;
        bool alive = true;
    };
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(g.edge_count()));
    for (StubId s = 0; s < static_cast<StubId>(seq.total_stubs()); ++s)
        if (g.partner(s) > s) edges.push_back({s, g.partner(s), true});

    std::vector<std::int64_t> deg(seq.degrees());
    std::int64_t over_cap = 0;
    for (std::int64_t d : deg)
        if (d > cap) ++over_cap;

    std::int64_t removed = 0;
    auto remove_edge = [&](Edge& e) {
        e.alive = false;
        ++removed;
        for (NodeId v : {seq.node_of(e.a), seq.node_of(e.b)}) {
            if (deg[v] > cap && deg[v] - 1 <= cap) --over_cap;
            --deg[v];
        }
    };

    if (over_cap > 0) {
        // phase 1: edges between two currently-over-cap nodes, uniform order.
        // Stale candidates are discarded on draw, which keeps the choice
        // uniform over the still-valid ones.
        std::vector<std::size_t> cand;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const NodeId x = seq.node_of(edges[i].a), y = seq.node_of(edges[i].b);
            if (deg[x] > cap && deg[y] > cap && x != y) cand.push_back(i);
        }
        while (!cand.empty()) {
            const std::size_t r = static_cast<std::size_t>(rng.uniform_below(cand.size()));
            const std::size_t i = cand[r];
            cand[r] = cand.back();
            cand.pop_back();
            Edge& e = edges[i];
            const NodeId x = seq.node_of(e.a), y = seq.node_of(e.b);
            if (!e.alive || deg[x] <= cap || deg[y] <= cap) continue;
            remove_edge(e);
        }
    }

    if (over_cap > 0) {
        // phase 2: uniform among edges incident to a node still above the cap
        std::vector<std::size_t> cand;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            if (!edges[i].alive) continue;
            const NodeId x = seq.node_of(edges[i].a), y = seq.node_of(edges[i].b);
            if (deg[x] > cap || deg[y] > cap) cand.push_back(i);
        }
        while (over_cap > 0 && !cand.empty()) {
            const std::size_t r = static_cast<std::size_t>(rng.uniform_below(cand.size()));
            const std::size_t i = cand[r];
            cand[r] = cand.back();
            cand.pop_back();
            Edge& e = edges[i];
            const NodeId x = seq.node_of(e.a), y = seq.node_of(e.b);
            if (!e.alive || (deg[x] <= cap && deg[y] <= cap)) continue;
            remove_edge(e);
        }
    }

    // rebuild a graph over the surviving edges
    std::vector<std::int64_t> new_deg(static_cast<std::size_t>(seq.n()), 0);
    for (const Edge& e : edges) {
        if (!e.alive) continue;
        ++new_deg[seq.node_of(e.a)];
        ++new_deg[seq.node_of(e.b)];
    }
    DegreeSequence new_seq(std::move(new_deg));
    std::vector<StubId> next(static_cast<std::size_t>(seq.n()), 0);
    std::vector<StubId> partner(static_cast<std::size_t>(new_seq.total_stubs()), kUnpaired);
    for (const Edge& e : edges) {
        if (!e.alive) continue;
        const NodeId x = seq.node_of(e.a), y = seq.node_of(e.b);
        const StubId sx = new_seq.first_stub(x) + next[x]++;
        const StubId sy = new_seq.first_stub(y) + next[y]++;
        partner[sx] = sy;
        partner[sy] = sx;
    }
    return {StubGraph(std::move(new_seq), std::move(partner)), removed, cap};
}

} // namespace cfgdist
