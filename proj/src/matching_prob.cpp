#include "cfgdist/matching_prob.hpp"

#include <stdexcept>
#include <unordered_map>

namespace cfgdist {

namespace {

void check_args(std::int64_t n, std::int64_t m, std::int64_t l) {
    if (n < 0 || m < 0) throw std::invalid_argument("non_attachment_prob: negative set size");
    if (l % 2 != 0) throw std::invalid_argument("non_attachment_prob: L must be even");
    if (n + m > l) throw std::invalid_argument("non_attachment_prob: n + m exceeds L");
}

template <class Num>
Num recurse(std::int64_t n, std::int64_t m, std::int64_t l,
            std::unordered_map<std::uint64_t, Num>& memo) {
    if (n == 0) return Num(1);
    const std::uint64_t key = (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint64_t>(l);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;

    Num value(0);
    if (n >= 2)
        value += Num(n - 1) / Num(l - 1) * recurse<Num>(n - 2, m, l - 2, memo);
    if (l - 1 > m + n - 1) // coefficient of the "escape" branch, zero or negative otherwise
        value += (Num(1) - Num(m + n - 1) / Num(l - 1)) * recurse<Num>(n - 1, m, l - 2, memo);
    memo.emplace(key, value);
    return value;
}

} // namespace

double non_attachment_prob(std::int64_t n, std::int64_t m, std::int64_t l) {
    check_args(n, m, l);
    if (l <= 64) return non_attachment_prob_exact(n, m, l).convert_to<double>();
    std::unordered_map<std::uint64_t, double> memo;
    return recurse<double>(n, m, l, memo);
}

Rational non_attachment_prob_exact(std::int64_t n, std::int64_t m, std::int64_t l) {
    check_args(n, m, l);
    if (l > 64) throw std::invalid_argument("non_attachment_prob_exact: L > 64");
    std::unordered_map<std::uint64_t, Rational> memo;
    return recurse<Rational>(n, m, l, memo);
}

double non_attachment_lower_bound(std::int64_t n, std::int64_t m, std::int64_t l) {
    check_args(n, m, l);
    double prod = 1.0;
    for (std::int64_t i = 0; i < n; ++i)
        prod *= 1.0 - static_cast<double>(m) / static_cast<double>(l - 2 * i - 1);
    return prod;
}

double non_attachment_upper_bound(std::int64_t n, std::int64_t m, std::int64_t l) {
    if (l <= 2 * n) throw std::invalid_argument("non_attachment_upper_bound: needs L > 2n");
    const double denom = static_cast<double>(l - 2 * n);
    return non_attachment_lower_bound(n, m, l) +
           static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(m) /
               (denom * denom);
}

} // namespace cfgdist
