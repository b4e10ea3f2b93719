#pragma once

#include <cstdint>

#include <boost/multiprecision/cpp_int.hpp>

namespace cfgdist {

using Rational = boost::multiprecision::cpp_rational;

// Probability that, under uniform stub pairing of L stubs, none of the n stubs
// in a set A attaches to any of the m stubs in a disjoint set B. Memoized
// recursion p(n,m,L) = (n-1)/(L-1) p(n-2,m,L-2) + (1-(m+n-1)/(L-1)) p(n-1,m,L-2),
// with p(0,m,L) = 1.
double non_attachment_prob(std::int64_t n, std::int64_t m, std::int64_t l);

// Exact rational value, intended for small instances (l <= 64 enforced).
Rational non_attachment_prob_exact(std::int64_t n, std::int64_t m, std::int64_t l);

// The two sides of the product sandwich around p(n,m,L).
double non_attachment_lower_bound(std::int64_t n, std::int64_t m, std::int64_t l);
double non_attachment_upper_bound(std::int64_t n, std::int64_t m, std::int64_t l);

} // namespace cfgdist
