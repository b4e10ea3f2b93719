#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cfgdist/degree_law.hpp"
#include "cfgdist/rng.hpp"

namespace cfgdist {

using NodeId = std::uint32_t;
using StubId = std::uint32_t;

// Degrees D_1..D_N plus the stub indexing derived from them. The parity fix
// (bump the last node when the total is odd) is applied at sampling time, so a
// stored sequence always has an even stub count unless built raw.
class DegreeSequence {
public:
    explicit DegreeSequence(std::vector<std::int64_t> degrees);

    std::int64_t n() const { return static_cast<std::int64_t>(degrees_.size()); }
    std::int64_t total_stubs() const { return total_; }
    std::int64_t degree(NodeId v) const { return degrees_[v]; }
    const std::vector<std::int64_t>& degrees() const { return degrees_; }

    StubId first_stub(NodeId v) const { return offsets_[v]; }
    NodeId node_of(StubId s) const { return stub_node_[s]; }

private:
    std::vector<std::int64_t> degrees_;
    std::vector<StubId> offsets_;   // size N+1
    std::vector<NodeId> stub_node_; // size L
    std::int64_t total_ = 0;
};

template <uniform_source R>
DegreeSequence sample_degree_sequence(const DegreeLaw& law, std::int64_t n, R& rng) {
    std::vector<std::int64_t> deg(static_cast<std::size_t>(n));
    std::int64_t sum = 0;
    for (auto& d : deg) {
        d = law.sample(rng);
        sum += d;
    }
    if (sum % 2 != 0) deg.back() += 1;
    return DegreeSequence(std::move(deg));
}

// Empirical forward-degree law g^(N) of a fixed degree sequence, with its mean
// and the total-variation gap to the theoretical offspring law.
struct EmpiricalOffspring {
    std::vector<double> g; // g[j] = (j+1)/L * #{i : D_i = j+1}
    double nu_n = 0.0;
    double p_n = 0.0;      // (1/2) sum_j |g^(N)_j - g_j|
};

EmpiricalOffspring empirical_offspring(const DegreeSequence& seq, const DegreeLaw& law);

// variant taking a prebuilt offspring law, for hot replication loops
EmpiricalOffspring empirical_offspring(const DegreeSequence& seq, const OffspringLaw& g_theory);

// Molloy-Reed style diagnostics of a realized degree sequence against its law.
struct WellBehavedReport {
    double cond1_sup = 0.0;            // sup_i |i(i-2)(d_i/N - f_i)|
    std::optional<std::int64_t> i_star; // smallest cutoff meeting the partial-sum test
    std::int64_t max_degree = 0;
    std::int64_t degree_cap = 0;       // ceil(N^{1/4-eps}) - 1
    bool cond1_pass = false;
    bool cond2_pass = false;
    bool cap_pass = false;
};

WellBehavedReport check_well_behaved(const DegreeSequence& seq, const DegreeLaw& law,
                                     double eps_prime, double cap_eps = 0.05);

// d_i(N) = #{j : D_j = i}, i = 0..max degree
std::vector<std::int64_t> degree_counts(const DegreeSequence& seq);

} // namespace cfgdist
