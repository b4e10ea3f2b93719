#include "cfgdist/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cfgdist/stub_graph.hpp"

namespace cfgdist {

double SurvivalCurve::eval(std::int64_t k) const {
    if (k < k_min) return 1.0;
    if (survival.empty() || k > k_max()) return tail_value;
    return survival[static_cast<std::size_t>(k - k_min)];
}

CenteringInfo centering(std::int64_t n, double nu) {
    if (n < 2) throw std::invalid_argument("centering: N >= 2");
    if (!(nu > 1.0)) throw std::invalid_argument("centering: nu > 1");
    CenteringInfo c;
    c.n = n;
    c.nu = nu;
    const long double ln_nu = std::log(static_cast<long double>(nu));
    const long double lg = std::log(static_cast<long double>(n)) / ln_nu;
    c.log_nu_n = static_cast<double>(lg);
    auto sigma = static_cast<std::int64_t>(std::floor(lg));
    // recheck the floor against nu^sigma <= N < nu^{sigma+1} in long double
    while (std::pow(static_cast<long double>(nu), static_cast<long double>(sigma + 1)) <=
           static_cast<long double>(n))
        ++sigma;
    while (std::pow(static_cast<long double>(nu), static_cast<long double>(sigma)) >
           static_cast<long double>(n))
        --sigma;
    c.sigma_n = sigma;
    c.a_n = static_cast<double>(static_cast<long double>(sigma) - lg);
    return c;
}

SurvivalCurve empirical_survival(std::span<const std::int64_t> hopcounts,
                                 Conditioning conditioning) {
    if (hopcounts.empty()) throw std::invalid_argument("empirical_survival: empty sample");
    std::vector<std::int64_t> finite;
    finite.reserve(hopcounts.size());
    std::int64_t infinite = 0;
    for (std::int64_t h : hopcounts) {
        if (h == kInfiniteHop) ++infinite;
        else finite.push_back(h);
    }

    SurvivalCurve curve;
    curve.conditioning = conditioning;
    curve.dropped_fraction = static_cast<double>(infinite) / static_cast<double>(hopcounts.size());
    if (conditioning == Conditioning::finite_only) {
        if (finite.empty())
            throw std::invalid_argument("empirical_survival: all hopcounts infinite");
        curve.sample_count = static_cast<std::int64_t>(finite.size());
    } else {
        // infinite hopcounts exceed every k, so the curve flattens out at their share
        curve.sample_count = static_cast<std::int64_t>(hopcounts.size());
        curve.tail_value = curve.dropped_fraction;
    }

    std::sort(finite.begin(), finite.end());
    const std::int64_t lo = finite.empty() ? 0 : finite.front();
    const std::int64_t hi = finite.empty() ? -1 : finite.back();
    curve.k_min = lo;
    const double denom = static_cast<double>(curve.sample_count);
    std::size_t idx = 0;
    std::int64_t at_most = 0;
    for (std::int64_t k = lo; k <= hi; ++k) {
        while (idx < finite.size() && finite[idx] <= k) {
            ++at_most;
            ++idx;
        }
        curve.survival.push_back(static_cast<double>(curve.sample_count - at_most) / denom);
    }
    return curve;
}

double shift_distance(const SurvivalCurve& c1, const SurvivalCurve& c2, std::int64_t shift) {
    const std::int64_t lo1 = c1.k_min, hi1 = c1.k_max();
    const std::int64_t lo2 = c2.k_min - shift, hi2 = c2.k_max() - shift;
    if (hi1 < lo2 || hi2 < lo1)
        throw std::invalid_argument("shift_distance: shifted supports do not overlap");
    const std::int64_t lo = std::min(lo1, lo2) - 1;
    const std::int64_t hi = std::max(hi1, hi2) + 1;
    double sup = 0.0;
    for (std::int64_t k = lo; k <= hi; ++k)
        sup = std::max(sup, std::abs(c1.eval(k) - c2.eval(k + shift)));
    return sup;
}

SurvivalCurve theoretical_survival_curve(const CenteringInfo& center,
                                         std::span<const WPair> w_pairs,
                                         const MomentSummary& moments, std::int64_t k_min,
                                         std::int64_t k_max) {
    const LimitLawResult r = eval_limit_law(center.a_n, k_min, k_max, w_pairs, moments);
    SurvivalCurve curve;
    curve.k_min = k_min;
    curve.survival = r.survival;
    curve.sample_count = static_cast<std::int64_t>(w_pairs.size());
    curve.conditioning = Conditioning::finite_only;
    return curve;
}

std::vector<double> tightness_report(std::span<const std::int64_t> hopcounts,
                                     const CenteringInfo& center,
                                     std::span<const std::int64_t> k_list) {
    std::int64_t finite = 0;
    std::vector<std::int64_t> inside(k_list.size(), 0);
    for (std::int64_t h : hopcounts) {
        if (h == kInfiniteHop) continue;
        ++finite;
        const double dev = std::abs(static_cast<double>(h) - center.log_nu_n);
        for (std::size_t i = 0; i < k_list.size(); ++i)
            if (dev <= static_cast<double>(k_list[i])) ++inside[i];
    }
    if (finite == 0) throw std::invalid_argument("tightness_report: no finite hopcounts");
    std::vector<double> out(k_list.size());
    for (std::size_t i = 0; i < k_list.size(); ++i)
        out[i] = static_cast<double>(inside[i]) / static_cast<double>(finite);
    return out;
}

double ks_distance(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
    const SurvivalCurve ca = empirical_survival(a, Conditioning::finite_only);
    const SurvivalCurve cb = empirical_survival(b, Conditioning::finite_only);
    return shift_distance(ca, cb, 0);
}

} // namespace cfgdist
