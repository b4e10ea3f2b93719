#include "cfgdist/spg.hpp"

namespace cfgdist {

double coupling_error_rate(std::span<const CoupledTrace> traces, int m) {
    if (m < 1) throw std::invalid_argument("coupling_error_rate: m >= 1");
    if (traces.empty()) return 0.0;
    std::int64_t bad = 0;
    for (const CoupledTrace& t : traces)
        if (t.miscoupling_generation && *t.miscoupling_generation <= m) ++bad;
    return static_cast<double>(bad) / static_cast<double>(traces.size());
}

} // namespace cfgdist
