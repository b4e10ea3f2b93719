#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cfgdist/degree_sequence.hpp"
#include "cfgdist/rng.hpp"
#include "cfgdist/stub_graph.hpp"

namespace cfgdist {

// Shortest-path-graph growth from a root, one stub at a time. Stub labels:
//   1  stub of a node not yet attached
//   2  free stub: attached, waiting to be paired
//   3  paired
// Each step draws a uniform stub among all of them; a label-3 draw is rejected
// and redrawn, which leaves the accepted draw uniform over labels {1,2}. A
// label-1 draw attaches a new node, a label-2 draw closes a cycle or self-loop
// and consumes two free stubs.

enum class SpgTermination { exhausted, max_gen, cap };

struct SpgOptions {
    int max_gen = 64;
    std::uint64_t draw_cap = 0; // 0: default 10 sqrt(L) log L
};

struct SpgTrace {
    std::vector<std::int64_t> z;                 // z[k-1] = Z_k, free stubs per generation
    std::vector<std::int64_t> nodes_at_distance; // [0] = 1 for the root
    SpgTermination termination = SpgTermination::exhausted;
    std::int64_t label2_draws = 0;
    std::int64_t label3_draws = 0;
    std::int64_t final_labels[3] = {0, 0, 0};    // stubs per label at termination
};

struct CoupledTrace {
    std::vector<std::int64_t> z;     // SPG free stubs per generation
    std::vector<std::int64_t> z_hat; // coupled branching-process counts
    std::optional<int> miscoupling_generation;
    SpgTermination termination = SpgTermination::exhausted;
    std::int64_t label2_draws = 0;
    std::int64_t label3_draws = 0;
};

class CapExceededError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

struct GrowState {
    const DegreeSequence* seq;
    std::vector<std::uint8_t> label;
    std::vector<StubId> next_gen;
    std::uint64_t draws = 0;
    std::uint64_t draw_cap = 0;
    std::int64_t new_nodes = 0;

    explicit GrowState(const DegreeSequence& s, const SpgOptions& opt)
        : seq(&s), label(static_cast<std::size_t>(s.total_stubs()), 1) {
        const double l = static_cast<double>(s.total_stubs());
        draw_cap = opt.draw_cap ? opt.draw_cap
                                : static_cast<std::uint64_t>(10.0 * std::sqrt(l) *
                                                             std::log(std::max(l, 2.0))) + 64;
    }

    template <uniform_source R>
    StubId draw(R& rng) {
        if (++draws > draw_cap) throw CapExceededError("spg: draw cap exceeded");
        return static_cast<StubId>(rng.uniform_below(static_cast<std::uint64_t>(seq->total_stubs())));
    }

    // rule 1: pair `chosen` (label 1), attach its node, queue the brothers
    void attach(StubId chosen) {
        label[chosen] = 3;
        const NodeId v = seq->node_of(chosen);
        const StubId begin = seq->first_stub(v);
        const StubId end = begin + static_cast<StubId>(seq->degree(v));
        for (StubId s = begin; s < end; ++s) {
            if (s == chosen) continue;
            label[s] = 2;
            next_gen.push_back(s);
        }
        ++new_nodes;
    }
};

} // namespace detail

template <uniform_source R>
SpgTrace grow_spg(const DegreeSequence& seq, NodeId root, int max_gen, R& rng,
                  SpgOptions opt = {}) {
    if (root >= static_cast<NodeId>(seq.n())) throw std::invalid_argument("grow_spg: bad root");
    if (max_gen < 1) throw std::invalid_argument("grow_spg: max_gen >= 1");
    opt.max_gen = max_gen;

    detail::GrowState st(seq, opt);
    SpgTrace trace;
    trace.nodes_at_distance.push_back(1);

    std::vector<StubId> gen;
    const StubId rb = seq.first_stub(root);
    for (StubId s = rb; s < rb + static_cast<StubId>(seq.degree(root)); ++s) {
        st.label[s] = 2;
        gen.push_back(s);
    }
    trace.z.push_back(static_cast<std::int64_t>(gen.size()));

    const auto finish = [&](SpgTermination why) {
        trace.termination = why;
        for (const std::uint8_t l : st.label) ++trace.final_labels[l - 1];
        return trace;
    };

    try {
        for (int k = 1; k < max_gen && !gen.empty(); ++k) {
            st.next_gen.clear();
            st.new_nodes = 0;
            for (const StubId present : gen) {
                if (st.label[present] == 3) continue; // consumed by an earlier cycle
                st.label[present] = 3;
                StubId s;
                do {
                    s = st.draw(rng);
                    if (st.label[s] == 3) ++trace.label3_draws;
                } while (st.label[s] == 3);
                if (st.label[s] == 1) {
                    st.attach(s);
                } else {
                    st.label[s] = 3;
                    ++trace.label2_draws;
                }
            }
            gen.clear();
            for (const StubId s : st.next_gen)
                if (st.label[s] == 2) gen.push_back(s);
            trace.z.push_back(static_cast<std::int64_t>(gen.size()));
            trace.nodes_at_distance.push_back(st.new_nodes);
            if (gen.empty()) return finish(SpgTermination::exhausted);
        }
    } catch (const CapExceededError&) {
        return finish(SpgTermination::cap);
    }
    return finish(gen.empty() ? SpgTermination::exhausted : SpgTermination::max_gen);
}

// Grows the SPG and its companion branching process from one shared stream of
// uniform stub draws. Every draw advances the branching process by the forward
// degree of the drawn stub's node; the SPG follows rules 1-3, so the two agree
// until the first label-2 or label-3 draw. When one side runs out of free
// stubs in a generation, the other side finishes it alone: free draws for the
// branching process, redraws for the SPG.
template <uniform_source R>
CoupledTrace grow_coupled(const DegreeSequence& seq, NodeId root, int max_gen, R& rng,
                          SpgOptions opt = {}) {
    if (root >= static_cast<NodeId>(seq.n())) throw std::invalid_argument("grow_coupled: bad root");
    if (max_gen < 1) throw std::invalid_argument("grow_coupled: max_gen >= 1");
    opt.max_gen = max_gen;

    detail::GrowState st(seq, opt);
    CoupledTrace trace;

    std::vector<StubId> gen;
    const StubId rb = seq.first_stub(root);
    for (StubId s = rb; s < rb + static_cast<StubId>(seq.degree(root)); ++s) {
        st.label[s] = 2;
        gen.push_back(s);
    }
    trace.z.push_back(static_cast<std::int64_t>(gen.size()));
    trace.z_hat.push_back(static_cast<std::int64_t>(gen.size()));

    auto miscouple = [&trace](int generation) {
        if (!trace.miscoupling_generation) trace.miscoupling_generation = generation;
    };

    try {
        for (int k = 1; k < max_gen; ++k) {
            if (gen.empty() && trace.z_hat.back() == 0) break;
            std::int64_t bp_remaining = trace.z_hat.back();
            std::int64_t bp_next = 0;
            st.next_gen.clear();
            std::size_t idx = 0;

            auto spg_step = [&](StubId s) {
                // s has label 1 or 2; apply rule 1 or 2 for the SPG side
                if (st.label[s] == 1) {
                    st.attach(s);
                } else {
                    st.label[s] = 3;
                    ++trace.label2_draws;
                    miscouple(k + 1);
                }
            };

            for (;;) {
                while (idx < gen.size() && st.label[gen[idx]] == 3) ++idx; // cycle-consumed
                const bool spg_active = idx < gen.size();
                const bool bp_active = bp_remaining > 0;
                if (!spg_active && !bp_active) break;

                if (spg_active && bp_active) {
                    const StubId present = gen[idx++];
                    st.label[present] = 3;
                    const StubId s = st.draw(rng);
                    bp_next += seq.degree(seq.node_of(s)) - 1;
                    --bp_remaining;
                    if (st.label[s] == 3) {
                        ++trace.label3_draws;
                        miscouple(k + 1);
                        StubId s2;
                        do {
                            s2 = st.draw(rng);
                        } while (st.label[s2] == 3);
                        spg_step(s2);
                    } else {
                        spg_step(s);
                    }
                } else if (spg_active) {
                    // branching process finished this generation first
                    const StubId present = gen[idx++];
                    st.label[present] = 3;
                    StubId s;
                    do {
                        s = st.draw(rng);
                    } while (st.label[s] == 3);
                    spg_step(s);
                } else {
                    // SPG finished first; free draws, labels untouched
                    const StubId s = st.draw(rng);
                    bp_next += seq.degree(seq.node_of(s)) - 1;
                    --bp_remaining;
                }
            }

            gen.clear();
            for (const StubId s : st.next_gen)
                if (st.label[s] == 2) gen.push_back(s);
            trace.z.push_back(static_cast<std::int64_t>(gen.size()));
            trace.z_hat.push_back(bp_next);
            if (gen.empty() && bp_next == 0) {
                trace.termination = SpgTermination::exhausted;
                return trace;
            }
        }
    } catch (const CapExceededError&) {
        trace.termination = SpgTermination::cap;
        return trace;
    }
    trace.termination = (gen.empty() && trace.z_hat.back() == 0) ? SpgTermination::exhausted
                                                                 : SpgTermination::max_gen;
    return trace;
}

// Exact hopcount by growing the two shortest-path graphs alternately on a
// lazily revealed uniform pairing; equal in law to building the whole graph
// and running a BFS, but only touches the explored neighbourhoods.
template <uniform_source R>
std::int64_t bilateral_hopcount(const DegreeSequence& seq, NodeId u, NodeId v, R& rng) {
    if (u == v) throw std::invalid_argument("bilateral_hopcount: u == v");
    const std::int64_t l = seq.total_stubs();
    if (l % 2 != 0) throw std::invalid_argument("bilateral_hopcount: odd stub count");

    std::vector<StubId> partner(static_cast<std::size_t>(l), kUnpaired);
    std::vector<std::uint8_t> tree(static_cast<std::size_t>(seq.n()), 0);
    std::vector<std::int32_t> dist(static_cast<std::size_t>(seq.n()), -1);

    std::vector<StubId> frontier[2];
    auto seed_tree = [&](NodeId root, int t) {
        tree[root] = static_cast<std::uint8_t>(t + 1);
        dist[root] = 0;
        const StubId b = seq.first_stub(root);
        for (StubId s = b; s < b + static_cast<StubId>(seq.degree(root)); ++s)
            frontier[t].push_back(s);
    };
    seed_tree(u, 0);
    seed_tree(v, 1);

    for (int t = 0;; t = 1 - t) {
        std::vector<StubId>& cur = frontier[t];
        if (cur.empty()) return kInfiniteHop; // this side's component is closed
        const std::uint8_t own = static_cast<std::uint8_t>(t + 1);
        std::vector<StubId> next;
        for (const StubId present : cur) {
            if (partner[present] != kUnpaired) continue; // closed a cycle earlier
            StubId s;
            do {
                s = static_cast<StubId>(rng.uniform_below(static_cast<std::uint64_t>(l)));
            } while (s == present || partner[s] != kUnpaired);
            partner[present] = s;
            partner[s] = present;
            const NodeId w = seq.node_of(s);
            if (tree[w] == 0) {
                tree[w] = own;
                dist[w] = dist[seq.node_of(present)] + 1;
                const StubId b = seq.first_stub(w);
                for (StubId x = b; x < b + static_cast<StubId>(seq.degree(w)); ++x)
                    if (x != s) next.push_back(x);
            } else if (tree[w] != own) {
                return dist[seq.node_of(present)] + 1 + dist[w];
            }
            // else: cycle within the own tree, two stubs gone
        }
        cur = std::move(next);
    }
}

// Fraction of traces whose coupling broke at or before generation m.
double coupling_error_rate(std::span<const CoupledTrace> traces, int m);

} // namespace cfgdist
