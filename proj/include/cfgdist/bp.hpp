#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cfgdist/degree_law.hpp"
#include "cfgdist/rng.hpp"

namespace cfgdist {

// Delayed Galton-Watson process: generation 1 drawn from the degree law f,
// every later generation from the size-biased offspring law g.

struct BPTrace {
    std::vector<std::int64_t> gen; // gen[0] = 1
    bool extinct = false;
    bool capped = false;
};

inline constexpr std::int64_t kDefaultPopulationCap = 100'000'000;

template <uniform_source R>
BPTrace simulate_delayed_bp(const DegreeLaw& f, const OffspringLaw& g, int n_gen,
                            std::int64_t cap, R& rng) {
    if (n_gen < 1) throw std::invalid_argument("simulate_delayed_bp: n_gen >= 1");
    if (cap <= 0) throw std::invalid_argument("simulate_delayed_bp: cap > 0");
    BPTrace t;
    t.gen.reserve(static_cast<std::size_t>(n_gen) + 1);
    t.gen.push_back(1);
    std::int64_t z = f.sample(rng);
    std::int64_t cumulative = 1 + z;
    t.gen.push_back(z);
    for (int k = 2; k <= n_gen; ++k) {
        if (z == 0) {
            t.extinct = true;
            break;
        }
        if (cumulative > cap) {
            t.capped = true;
            break;
        }
        std::int64_t next = 0;
        for (std::int64_t i = 0; i < z; ++i) next += g.sample(rng);
        z = next;
        cumulative += z;
        t.gen.push_back(z);
    }
    if (z == 0) t.extinct = true;
    return t;
}

struct WEstimate {
    std::vector<double> samples; // W_n = Z_n / (mu nu^{n-1})
    int n_gen = 0;
    double atom_zero_frequency = 0.0;
    std::int64_t capped_runs = 0;
    double mean() const;
};

// Default depth: deep enough that nu^{n-1} reaches ~1e6.
int default_w_depth(double nu);

template <uniform_source R>
WEstimate sample_w(const DegreeLaw& f, const OffspringLaw& g, int n_gen,
                   std::int64_t n_samples, R& rng,
                   std::int64_t cap = kDefaultPopulationCap) {
    if (!(g.mean() > 1.0)) throw std::invalid_argument("sample_w: subcritical offspring law");
    if (n_samples < 1) throw std::invalid_argument("sample_w: n_samples >= 1");
    const double mu = f.moments().mu;
    const double nu = g.mean();
    WEstimate est;
    est.n_gen = n_gen;
    est.samples.reserve(static_cast<std::size_t>(n_samples));
    std::int64_t zeros = 0;
    for (std::int64_t i = 0; i < n_samples; ++i) {
        const BPTrace t = simulate_delayed_bp(f, g, n_gen, cap, rng);
        if (t.capped) ++est.capped_runs;
        const int n = static_cast<int>(t.gen.size()) - 1;
        const double z = static_cast<double>(t.gen.back());
        const double w = t.extinct ? 0.0 : z / (mu * std::pow(nu, n - 1));
        est.samples.push_back(w);
        if (w == 0.0) ++zeros;
    }
    est.atom_zero_frequency = static_cast<double>(zeros) / static_cast<double>(n_samples);
    return est;
}

class NonConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExtinctionResult {
    double q = 0.0;      // survival probability of the delayed process
    double s_star = 0.0; // smallest fixed point of the offspring generating function
    int iterations = 0;
};

// Monotone iteration s <- G_g(s) from 0; q = 1 - G_f(s*).
ExtinctionResult extinction_probability(const DegreeLaw& f, const OffspringLaw& g);

struct LimitLawResult {
    double a = 0.0;
    double kappa = 0.0;
    std::int64_t k_min = 0;
    std::vector<double> survival; // P(R_a > k), k = k_min, k_min+1, ...
    std::int64_t surviving_pairs = 0;
};

using WPair = std::pair<double, double>;

// P(R_a > k) at x = a + k; the limit law depends on (a, k) only through x.
double limit_survival_at(double x, std::span<const WPair> w_pairs,
                         const MomentSummary& moments);

// P(R_a > k) = E[exp(-kappa nu^{a+k} W1 W2) | W1 W2 > 0]
LimitLawResult eval_limit_law(double a, std::int64_t k_min, std::int64_t k_max,
                              std::span<const WPair> w_pairs, const MomentSummary& moments);

// Unconditional version; pairs with W1 W2 = 0 contribute 1.
double unconditional_survival(double a, std::int64_t k, std::span<const WPair> w_pairs,
                              const MomentSummary& moments);

struct ExpectedRResult {
    double value = 0.0;
    double truncation_bound = 0.0;
};

// E[R_a] = sum_{k>=0} P(R_a>k) - sum_{k<0} (1 - P(R_a>k)), summed over
// [-window, window]; requires the omitted tails to be below 1e-6.
ExpectedRResult expected_r(double a, std::span<const WPair> w_pairs,
                           const MomentSummary& moments, std::int64_t window);

// Discretized law of the martingale limit W of the delayed process, via the
// characteristic-function recursion phi(t) = G_g(phi(t/nu)) for the
// non-delayed limit and the composition phi_W(t) = G_f(phi(t/mu)).
// Experimental; validated against sample_w.
struct WLawGrid {
    std::int64_t bins = 1 << 19; // power of two
    double step = 0.0025;        // x resolution
};

struct DiscretizedW {
    std::vector<double> x;
    std::vector<double> prob;
    double raw_mass = 0.0; // before clipping/renormalization
    double mean = 0.0;
    double cdf_at(double q) const;
};

DiscretizedW w_law_fixed_point(const DegreeLaw& f, const OffspringLaw& g,
                               WLawGrid grid = {}, int iters = 1);

} // namespace cfgdist
