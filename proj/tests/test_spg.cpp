#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "cfgdist/spg.hpp"
#include "cfgdist/stats.hpp"
#include "oracles.hpp"

using namespace cfgdist;

namespace {

// nine-node worked example: degrees per node, root = node 0 with three stubs
const std::vector<std::int64_t> kNineNodeDegrees{3, 2, 4, 3, 5, 2, 1, 2, 2};

} // namespace

TEST_CASE("degree-zero root terminates immediately") {
    RandomStream rng(1);
    const SpgTrace t = grow_spg(DegreeSequence({0, 1, 1}), 0, 8, rng);
    CHECK(t.z == std::vector<std::int64_t>{0});
    CHECK(t.termination == SpgTermination::exhausted);
}

TEST_CASE("forced single edge") {
    oracles::ScriptedStream rng;
    rng.ints = {1};
    const SpgTrace t = grow_spg(DegreeSequence({1, 1}), 0, 8, rng);
    CHECK(t.z == std::vector<std::int64_t>{1, 0});
    CHECK(t.nodes_at_distance == std::vector<std::int64_t>{1, 1});
    CHECK(t.termination == SpgTermination::exhausted);
    CHECK(t.final_labels[0] == 0);
    CHECK(t.final_labels[2] == 2);
}

TEST_CASE("worked nine-node growth replayed from scripted draws") {
    // stub layout: node0 = 0-2, node1 = 3-4, node2 = 5-8, node3 = 9-11,
    // node4 = 12-16, node5 = 17-18, node6 = 19, node7 = 20-21, node8 = 22-23.
    // Draws: second stub of node2, first stub of node8, first stub of node3.
    const DegreeSequence seq(kNineNodeDegrees);
    {
        oracles::ScriptedStream rng;
        rng.ints = {6, 22, 9};
        const SpgTrace t = grow_spg(seq, 0, 2, rng);
        CHECK(t.z == std::vector<std::int64_t>{3, 6});
        CHECK(t.nodes_at_distance == std::vector<std::int64_t>{1, 3});
        CHECK(t.label2_draws == 0);
        CHECK(t.termination == SpgTermination::max_gen);
    }
    {
        // continue one generation: node2's first free stub draws node8's last
        // stub, closing a cycle that consumes two free stubs of generation 2
        oracles::ScriptedStream rng;
        rng.ints = {6, 22, 9, 23, 12, 17, 19, 20};
        const SpgTrace t = grow_spg(seq, 0, 3, rng);
        CHECK(t.z == std::vector<std::int64_t>{3, 6, 6});
        CHECK(t.label2_draws == 1);
        CHECK(t.nodes_at_distance == std::vector<std::int64_t>{1, 3, 4});
    }
}

TEST_CASE("self-loop at the root consumes two free stubs") {
    oracles::ScriptedStream rng;
    rng.ints = {1};
    const SpgTrace t = grow_spg(DegreeSequence({2, 2}), 0, 8, rng);
    CHECK(t.z == std::vector<std::int64_t>{2, 0});
    CHECK(t.label2_draws == 1);
    // the other node is never reached
    CHECK(t.final_labels[0] == 2);
    CHECK(t.final_labels[2] == 2);
}

TEST_CASE("label conservation and evenness of paired stubs") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        RandomStream rng(seed, 3);
        const DegreeSequence seq =
            sample_degree_sequence(DegreeLaw::pareto_ceil(3.5), 500, rng);
        const SpgTrace t = grow_spg(seq, 0, 6, rng);
        CHECK(t.final_labels[0] + t.final_labels[1] + t.final_labels[2] == seq.total_stubs());
        CHECK(t.final_labels[2] % 2 == 0);
        if (t.termination == SpgTermination::exhausted) CHECK(t.final_labels[1] == 0);
    }
}

TEST_CASE("draw cap is reported, never silent") {
    RandomStream rng(5);
    const DegreeSequence seq = sample_degree_sequence(DegreeLaw::regular(3), 1000, rng);
    SpgOptions opt;
    opt.draw_cap = 3;
    const SpgTrace t = grow_spg(seq, 0, 30, rng, opt);
    CHECK(t.termination == SpgTermination::cap);
}

TEST_CASE("spg growth law matches exhaustive matching enumeration") {
    // distribution of (Z_1, Z_2) from the sequential grower vs the same
    // functional enumerated over all uniform perfect matchings
    const std::vector<std::vector<std::int64_t>> sequences = {
        {2, 2, 1, 1}, {3, 2, 2, 1}, {2, 2, 2}};
    for (const auto& degrees : sequences) {
        const DegreeSequence seq(degrees);
        std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> expected;
        std::int64_t total = 0;
        oracles::for_each_matching(seq.total_stubs(), [&](const std::vector<StubId>& partner) {
            ++expected[oracles::z12_of_matching(seq, 0, partner)];
            ++total;
        });

        const std::int64_t reps = 200000;
        std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> observed;
        for (std::int64_t r = 0; r < reps; ++r) {
            RandomStream rng(11, static_cast<std::uint64_t>(r));
            const SpgTrace t = grow_spg(seq, 0, 2, rng);
            const std::int64_t z2 = t.z.size() > 1 ? t.z[1] : 0;
            ++observed[{t.z[0], z2}];
        }

        for (const auto& [key, count] : expected) {
            const double p = static_cast<double>(count) / static_cast<double>(total);
            const double expd = p * static_cast<double>(reps);
            const double sd = std::sqrt(expd * (1.0 - p));
            const auto it = observed.find(key);
            const double obs = it == observed.end() ? 0.0 : static_cast<double>(it->second);
            CHECK(std::abs(obs - expd) < 4.0 * std::max(sd, 1.0));
        }
        for (const auto& [key, count] : observed) {
            (void)count;
            CHECK(expected.count(key) == 1);
        }
    }
}

TEST_CASE("coupled growth without bad draws stays identical") {
    oracles::ScriptedStream rng;
    rng.ints = {1};
    const CoupledTrace t = grow_coupled(DegreeSequence({1, 1}), 0, 8, rng);
    CHECK(t.z == t.z_hat);
    CHECK_FALSE(t.miscoupling_generation.has_value());
    CHECK(t.termination == SpgTermination::exhausted);
}

TEST_CASE("coupled growth: label-2 draw forks the two processes") {
    // degrees (2,2): the first draw hits the present stub's brother, a
    // self-loop; the SPG loses both free stubs while the BP books one draw
    // and finishes the generation with a free draw
    oracles::ScriptedStream rng;
    rng.ints = {1, 2};
    const CoupledTrace t = grow_coupled(DegreeSequence({2, 2}), 0, 2, rng);
    CHECK(t.z == std::vector<std::int64_t>{2, 0});
    CHECK(t.z_hat == std::vector<std::int64_t>{2, 2});
    REQUIRE(t.miscoupling_generation.has_value());
    CHECK(*t.miscoupling_generation == 2);
    CHECK(t.label2_draws == 1);
}

TEST_CASE("coupled growth: label-3 draw triggers a redraw") {
    // degrees (1,1,2): present stub relabels to 3 and the scripted draw hits
    // it, so the BP attaches its node while the SPG redraws
    oracles::ScriptedStream rng;
    rng.ints = {0, 1, 2};
    const CoupledTrace t = grow_coupled(DegreeSequence({1, 1, 2}), 0, 3, rng);
    REQUIRE(t.miscoupling_generation.has_value());
    CHECK(*t.miscoupling_generation == 2);
    CHECK(t.label3_draws == 1);
    // BP offspring from the label-3 draw: deg(node0) - 1 = 0; SPG redraw hit
    // node 1 (degree 1), no further free stubs
    CHECK(t.z == std::vector<std::int64_t>{1, 0});
    CHECK(t.z_hat == std::vector<std::int64_t>{1, 0});
}

TEST_CASE("coupling error rate bookkeeping") {
    std::vector<CoupledTrace> traces(3);
    CHECK(coupling_error_rate(traces, 2) == 0.0);
    traces[1].miscoupling_generation = 2;
    CHECK(coupling_error_rate(traces, 1) == 0.0);
    CHECK(coupling_error_rate(traces, 2) == doctest::Approx(1.0 / 3.0));
    CHECK(coupling_error_rate(traces, 5) == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(coupling_error_rate(traces, 0), std::invalid_argument);
}

TEST_CASE("early miscoupling is rare on large sparse graphs") {
    const DegreeLaw law = DegreeLaw::pareto_ceil(3.5);
    std::vector<CoupledTrace> traces;
    for (std::uint64_t r = 0; r < 2000; ++r) {
        RandomStream deg(21, r);
        const DegreeSequence seq = sample_degree_sequence(law, 10000, deg);
        RandomStream grow(22, r);
        traces.push_back(grow_coupled(seq, 0, 4, grow));
    }
    CHECK(coupling_error_rate(traces, 3) < 0.05);
}

TEST_CASE("coupled branching process has mean D_root nu_N^{k-1}") {
    const DegreeSequence seq(kNineNodeDegrees);
    const double nu_n = empirical_offspring(seq, DegreeLaw::regular(1)).nu_n;
    const std::int64_t reps = 200000;
    std::vector<double> sums(4, 0.0), sq(4, 0.0);
    for (std::int64_t r = 0; r < reps; ++r) {
        RandomStream rng(31, static_cast<std::uint64_t>(r));
        const CoupledTrace t = grow_coupled(seq, 0, 4, rng);
        for (std::size_t k = 0; k < 4; ++k) {
            const double z = k < t.z_hat.size() ? static_cast<double>(t.z_hat[k]) : 0.0;
            sums[k] += z;
            sq[k] += z * z;
        }
    }
    for (std::size_t k = 0; k < 4; ++k) {
        const double mean = sums[k] / static_cast<double>(reps);
        const double var = sq[k] / static_cast<double>(reps) - mean * mean;
        const double se = std::sqrt(var / static_cast<double>(reps));
        const double want = 3.0 * std::pow(nu_n, static_cast<double>(k));
        CHECK(std::abs(mean - want) < 4.0 * std::max(se, 1e-9));
    }
}

TEST_CASE("spg marginal of the coupled growth matches the plain grower") {
    const DegreeSequence seq({3, 2, 2, 1});
    std::map<std::vector<std::int64_t>, std::int64_t> plain, coupled;
    const std::int64_t reps = 150000;
    for (std::int64_t r = 0; r < reps; ++r) {
        RandomStream a(51, static_cast<std::uint64_t>(r));
        ++plain[grow_spg(seq, 0, 2, a).z];
        RandomStream b(52, static_cast<std::uint64_t>(r));
        ++coupled[grow_coupled(seq, 0, 2, b).z];
    }
    for (const auto& [key, count] : plain) {
        const double p = static_cast<double>(count) / static_cast<double>(reps);
        const auto it = coupled.find(key);
        const double obs = it == coupled.end() ? 0.0 : static_cast<double>(it->second);
        const double sd = std::sqrt(2.0 * p * (1.0 - p) * static_cast<double>(reps));
        CHECK(std::abs(obs - static_cast<double>(count)) < 4.0 * std::max(sd, 1.0));
    }
}

TEST_CASE("bilateral hopcount: forced cases") {
    {
        RandomStream rng(61);
        CHECK(bilateral_hopcount(DegreeSequence({1, 1}), 0, 1, rng) == 1);
    }
    {
        // both nodes close into self-loops: disconnected
        oracles::ScriptedStream rng;
        rng.ints = {1, 3};
        CHECK(bilateral_hopcount(DegreeSequence({2, 2}), 0, 1, rng) == kInfiniteHop);
    }
    {
        RandomStream rng(62);
        CHECK_THROWS_AS(bilateral_hopcount(DegreeSequence({2, 2}), 1, 1, rng),
                        std::invalid_argument);
    }
    {
        // degree-zero endpoint is unreachable
        RandomStream rng(63);
        CHECK(bilateral_hopcount(DegreeSequence({2, 0, 1, 1}), 0, 1, rng) == kInfiniteHop);
    }
}

TEST_CASE("bilateral hopcount law equals full-graph BFS law") {
    const DegreeLaw law = DegreeLaw::pareto_ceil(3.5);
    const std::int64_t n = 1000, reps = 3000;
    std::vector<std::int64_t> via_bfs, via_bilateral;
    for (std::int64_t r = 0; r < reps; ++r) {
        RandomStream deg(71, static_cast<std::uint64_t>(r));
        const DegreeSequence seq = sample_degree_sequence(law, n, deg);
        RandomStream g1(72, static_cast<std::uint64_t>(r));
        via_bfs.push_back(hopcount(pair_stubs(seq, g1), 0, 1));
        RandomStream g2(73, static_cast<std::uint64_t>(r));
        via_bilateral.push_back(bilateral_hopcount(seq, 0, 1, g2));
    }
    CHECK(ks_distance(via_bfs, via_bilateral) < 0.06);
    const auto inf_frac = [](const std::vector<std::int64_t>& v) {
        std::int64_t c = 0;
        for (std::int64_t h : v)
            if (h == kInfiniteHop) ++c;
        return static_cast<double>(c) / static_cast<double>(v.size());
    };
    CHECK(std::abs(inf_frac(via_bfs) - inf_frac(via_bilateral)) < 0.03);
}
