// Test-only oracles, independent of the library implementation paths they
// check: brute-force series, exhaustive matching enumeration, scripted
// randomness.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "cfgdist/degree_sequence.hpp"
#include "cfgdist/stub_graph.hpp"

namespace oracles {

// zeta(s) by brute force: large partial sum plus midpoint integral tail
inline double zeta_brute(double s, std::int64_t terms = 200000) {
    double sum = 0.0;
    for (std::int64_t k = terms - 1; k >= 1; --k) sum += std::pow(static_cast<double>(k), -s);
    const double m = static_cast<double>(terms) - 0.5;
    return sum + std::pow(m, 1.0 - s) / (s - 1.0);
}

// enumerate all perfect matchings on stubs {0..l-1}; partner[i] filled per call
inline void for_each_matching(std::int64_t l,
                              const std::function<void(const std::vector<cfgdist::StubId>&)>& fn) {
    if (l % 2 != 0) throw std::invalid_argument("for_each_matching: odd L");
    std::vector<cfgdist::StubId> partner(static_cast<std::size_t>(l), cfgdist::kUnpaired);
    std::vector<cfgdist::StubId> free;
    for (std::int64_t s = 0; s < l; ++s) free.push_back(static_cast<cfgdist::StubId>(s));
    std::function<void(std::vector<cfgdist::StubId>&)> rec = [&](std::vector<cfgdist::StubId>& rem) {
        if (rem.empty()) {
            fn(partner);
            return;
        }
        const cfgdist::StubId a = rem.front();
        for (std::size_t i = 1; i < rem.size(); ++i) {
            const cfgdist::StubId b = rem[i];
            partner[a] = b;
            partner[b] = a;
            std::vector<cfgdist::StubId> next;
            for (std::size_t j = 1; j < rem.size(); ++j)
                if (j != i) next.push_back(rem[j]);
            rec(next);
            partner[a] = cfgdist::kUnpaired;
            partner[b] = cfgdist::kUnpaired;
        }
    };
    rec(free);
}

inline std::int64_t matching_count(std::int64_t l) {
    std::int64_t c = 1;
    for (std::int64_t k = l - 1; k > 1; k -= 2) c *= k;
    return c;
}

// free-stub counts (Z_1, Z_2) of the exploration from `root` under a fixed
// matching, computed from the static layer structure
inline std::pair<std::int64_t, std::int64_t> z12_of_matching(
    const cfgdist::DegreeSequence& seq, cfgdist::NodeId root,
    const std::vector<cfgdist::StubId>& partner) {
    const std::int64_t z1 = seq.degree(root);
    std::vector<bool> layer1(static_cast<std::size_t>(seq.n()), false);
    std::int64_t edges_to_root = 0;
    const cfgdist::StubId rb = seq.first_stub(root);
    for (cfgdist::StubId s = rb; s < rb + static_cast<cfgdist::StubId>(seq.degree(root)); ++s) {
        const cfgdist::NodeId w = seq.node_of(partner[s]);
        if (w == root) continue; // self-loop at the root eats two root stubs
        layer1[w] = true;
    }
    std::int64_t z2 = 0;
    for (cfgdist::NodeId w = 0; w < static_cast<cfgdist::NodeId>(seq.n()); ++w) {
        if (!layer1[w]) continue;
        z2 += seq.degree(w);
    }
    // subtract the stubs of layer-1 nodes that point back at the root
    for (cfgdist::StubId s = rb; s < rb + static_cast<cfgdist::StubId>(seq.degree(root)); ++s) {
        const cfgdist::NodeId w = seq.node_of(partner[s]);
        if (w != root) --z2;
    }
    return {z1, z2};
}

// chi-square 99.9% critical values for the degrees of freedom used in tests
inline double chi2_crit_999(int df) {
    switch (df) {
    case 2: return 13.815510557964274;
    case 14: return 36.12327368039813;
    case 104: return 154.31407954898623;
    default: throw std::invalid_argument("chi2_crit_999: unsupported df");
    }
}

// scripted stand-in for RandomStream: feeds preset draws to the samplers
class ScriptedStream {
public:
    std::deque<std::uint64_t> ints;
    std::deque<double> reals;

    std::uint64_t uniform_below(std::uint64_t n) {
        if (ints.empty()) throw std::runtime_error("ScriptedStream: out of integer draws");
        const std::uint64_t v = ints.front();
        ints.pop_front();
        if (v >= n) throw std::runtime_error("ScriptedStream: draw out of range");
        return v;
    }
    double next_u01() {
        if (reals.empty()) throw std::runtime_error("ScriptedStream: out of real draws");
        const double v = reals.front();
        reals.pop_front();
        return v;
    }
    double next_u01_open() { return next_u01(); }
};

static_assert(cfgdist::uniform_source<ScriptedStream>);

} // namespace oracles
