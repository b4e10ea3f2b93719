#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cfgdist/bp.hpp"
#include "cfgdist/degree_law.hpp"

namespace cfgdist {

enum class Conditioning { finite_only, unconditional };

struct SurvivalCurve {
    std::int64_t k_min = 0;
    std::vector<double> survival; // survival[i] = P(H > k_min + i), non-increasing
    std::int64_t sample_count = 0;
    Conditioning conditioning = Conditioning::finite_only;
    double dropped_fraction = 0.0; // infinite-hopcount share
    double tail_value = 0.0;       // survival beyond the support (> 0 when unconditional)

    std::int64_t k_max() const { return k_min + static_cast<std::int64_t>(survival.size()) - 1; }
    // step-function extension: 1 to the left of the support, tail_value to the right
    double eval(std::int64_t k) const;
};

struct CenteringInfo {
    std::int64_t n = 0;
    double nu = 0.0;
    std::int64_t sigma_n = 0; // floor(log_nu N)
    double a_n = 0.0;         // sigma_n - log_nu N, in (-1, 0]
    double log_nu_n = 0.0;
};

// floor(log_nu N) with an extended-precision recheck at the boundary
CenteringInfo centering(std::int64_t n, double nu);

// Empirical P(H > k). kInfiniteHop entries are dropped in finite-only mode
// (their share is recorded) and fold into "never exceeded" otherwise.
SurvivalCurve empirical_survival(std::span<const std::int64_t> hopcounts,
                                 Conditioning conditioning = Conditioning::finite_only);

// sup_k |c1(k) - c2(k + shift)| over the union of supports
double shift_distance(const SurvivalCurve& c1, const SurvivalCurve& c2, std::int64_t shift);

// conditional survival of the centered limit law R_{a_N} as a curve
SurvivalCurve theoretical_survival_curve(const CenteringInfo& center,
                                         std::span<const WPair> w_pairs,
                                         const MomentSummary& moments, std::int64_t k_min,
                                         std::int64_t k_max);

// fraction of finite hopcounts with |H - log_nu N| <= K, one entry per K
std::vector<double> tightness_report(std::span<const std::int64_t> hopcounts,
                                     const CenteringInfo& center,
                                     std::span<const std::int64_t> k_list);

// two-sample Kolmogorov-Smirnov distance between integer samples
double ks_distance(std::span<const std::int64_t> a, std::span<const std::int64_t> b);

} // namespace cfgdist
