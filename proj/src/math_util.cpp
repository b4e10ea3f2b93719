#include "cfgdist/math_util.hpp"

#include <cmath>
#include <stdexcept>

namespace cfgdist {

namespace {

// Euler-Maclaurin tail for sum_{k>=m} k^-s, with m large enough that the
// correction terms fall below 1e-15. B_2, B_4, ..., B_12.
constexpr double kBernoulli[] = {1.0 / 6.0,  -1.0 / 30.0, 1.0 / 42.0,
                                 -1.0 / 30.0, 5.0 / 66.0,  -691.0 / 2730.0};

double power_sum_tail(double s, double m) {
    // integral term + half correction + Bernoulli corrections
    double tail = std::pow(m, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(m, -s);
    double rising = s;              // s(s+1)...(s+2j-2), built incrementally
    double mp = std::pow(m, -s - 1.0);
    double factorial = 2.0;         // (2j)!
    for (int j = 0; j < 6; ++j) {
        tail += kBernoulli[j] * rising / factorial * mp;
        rising *= (s + 2 * j + 1) * (s + 2 * j + 2);
        factorial *= (2 * j + 3) * (2 * j + 4);
        mp /= m * m;
    }
    return tail;
}

} // namespace

double hurwitz_zeta(double s, double a) {
    if (s <= 1.0) throw std::invalid_argument("hurwitz_zeta: requires s > 1");
    if (a < 1.0) throw std::invalid_argument("hurwitz_zeta: requires a >= 1");
    const int head = 24;
    double sum = 0.0;
    for (int k = 0; k < head; ++k) sum += std::pow(a + k, -s);
    return sum + power_sum_tail(s, a + head);
}

double zeta(double s) { return hurwitz_zeta(s, 1.0); }

} // namespace cfgdist
