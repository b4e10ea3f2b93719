#pragma once

#include <cstdint>

namespace cfgdist {

// Riemann zeta(s) for s > 1, absolute error below 1e-12.
double zeta(double s);

// Hurwitz zeta(s, a) = sum_{k>=0} (a+k)^-s for s > 1, a >= 1.
double hurwitz_zeta(double s, double a);

} // namespace cfgdist
