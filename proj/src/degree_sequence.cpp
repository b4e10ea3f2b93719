#include "cfgdist/degree_sequence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cfgdist {

DegreeSequence::DegreeSequence(std::vector<std::int64_t> degrees)
    : degrees_(std::move(degrees)) {
    if (degrees_.empty()) throw std::invalid_argument("degree sequence: empty");
    offsets_.resize(degrees_.size() + 1);
    offsets_[0] = 0;
    for (std::size_t i = 0; i < degrees_.size(); ++i) {
        if (degrees_[i] < 0) throw std::invalid_argument("degree sequence: negative degree");
        total_ += degrees_[i];
        if (total_ > static_cast<std::int64_t>(std::numeric_limits<StubId>::max()))
            throw std::invalid_argument("degree sequence: too many stubs");
        offsets_[i + 1] = static_cast<StubId>(total_);
    }
    stub_node_.resize(static_cast<std::size_t>(total_));
    for (std::size_t i = 0; i < degrees_.size(); ++i)
        std::fill(stub_node_.begin() + offsets_[i], stub_node_.begin() + offsets_[i + 1],
                  static_cast<NodeId>(i));
}

std::vector<std::int64_t> degree_counts(const DegreeSequence& seq) {
    std::int64_t maxd = 0;
    for (std::int64_t d : seq.degrees()) maxd = std::max(maxd, d);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(maxd) + 1, 0);
    for (std::int64_t d : seq.degrees()) ++counts[static_cast<std::size_t>(d)];
    return counts;
}

EmpiricalOffspring empirical_offspring(const DegreeSequence& seq, const DegreeLaw& law) {
    return empirical_offspring(seq, law.size_biased_offspring());
}

EmpiricalOffspring empirical_offspring(const DegreeSequence& seq, const OffspringLaw& g_theory) {
    if (seq.total_stubs() <= 0) throw std::invalid_argument("empirical_offspring: no stubs");
    const auto counts = degree_counts(seq);
    const double l = static_cast<double>(seq.total_stubs());

    EmpiricalOffspring out;
    out.g.assign(counts.size() > 0 ? counts.size() - 1 : 0, 0.0);
    for (std::size_t j = 0; j + 1 < counts.size(); ++j) {
        out.g[j] = (static_cast<double>(j) + 1.0) * static_cast<double>(counts[j + 1]) / l;
        out.nu_n += static_cast<double>(j) * out.g[j];
    }

    // tv distance: pointwise over the empirical support, the whole theoretical
    // mass beyond it in one shot
    const std::int64_t span = static_cast<std::int64_t>(out.g.size());
    double tv = 0.0;
    for (std::int64_t j = 0; j < span; ++j)
        tv += std::abs(out.g[static_cast<std::size_t>(j)] - g_theory.pmf(j));
    tv += 1.0 - g_theory.cdf(span - 1);
    out.p_n = 0.5 * tv;
    return out;
}

WellBehavedReport check_well_behaved(const DegreeSequence& seq, const DegreeLaw& law,
                                     double eps_prime, double cap_eps) {
    if (!(eps_prime > 0.0)) throw std::invalid_argument("check_well_behaved: eps' must be > 0");
    const auto counts = degree_counts(seq);
    const double n = static_cast<double>(seq.n());

    WellBehavedReport rep;
    rep.max_degree = static_cast<std::int64_t>(counts.size()) - 1;
    rep.degree_cap = static_cast<std::int64_t>(
                         std::ceil(std::pow(n, 0.25 - cap_eps) - 1e-12)) - 1;
    rep.cap_pass = rep.max_degree <= rep.degree_cap;

    // cond1: pointwise i(i-2)-weighted deviation. Beyond both supports the
    // deviation is i(i-2) f_i -> 0, so scanning the union of supports plus the
    // law's certified truncation is enough.
    const std::int64_t scan = std::max<std::int64_t>(rep.max_degree + 1, 1 << 12);
    double sup = 0.0;
    for (std::int64_t i = 1; i <= scan; ++i) {
        const double emp = i < static_cast<std::int64_t>(counts.size())
                               ? static_cast<double>(counts[static_cast<std::size_t>(i)]) / n : 0.0;
        const double w = static_cast<double>(i) * (static_cast<double>(i) - 2.0);
        sup = std::max(sup, std::abs(w * (emp - law.pmf(i))));
    }
    rep.cond1_sup = sup;
    rep.cond1_pass = sup < eps_prime;

    // cond2: smallest i* whose truncated empirical sum lands within eps' of
    // sum_i i(i-2) f_i = mu(nu - 1)
    const MomentSummary m = law.moments();
    const double full = m.mu * (m.nu - 1.0);
    double partial = 0.0;
    for (std::int64_t i = 1; i < static_cast<std::int64_t>(counts.size()); ++i) {
        const double w = static_cast<double>(i) * (static_cast<double>(i) - 2.0);
        partial += w * static_cast<double>(counts[static_cast<std::size_t>(i)]) / n;
        if (std::abs(partial - full) <= eps_prime) {
            rep.i_star = i;
            break;
        }
    }
    rep.cond2_pass = rep.i_star.has_value();
    return rep;
}

} // namespace cfgdist
