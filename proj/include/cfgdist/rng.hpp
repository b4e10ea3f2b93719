#pragma once

#include <array>
#include <concepts>
#include <cstdint>

namespace cfgdist {

// Splitmix64 step; also used to derive stream identifiers.
inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Collapse (seed, index, index, ...) into a single stream id. Replications,
// N-values and purposes get their own streams derived from the master seed,
// so results do not depend on scheduling or thread count.
inline std::uint64_t derive_stream_id(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t x = 0x7c15d2b74407b1ceULL;
    std::uint64_t h = 0;
    for (std::uint64_t p : parts) {
        x ^= p + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h = splitmix64(x);
    }
    return h;
}

// xoshiro256++ seeded from (seed, stream) via splitmix64.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t x = seed ^ (0xd2b74407b1ce6e93ULL * (stream + 1));
        for (auto& w : state_) w = splitmix64(x);
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0)
            state_[0] = 0x9e3779b97f4a7c15ULL;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // 53-bit uniform in [0,1).
    double next_u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in (0,1), never returns an endpoint
    double next_u01_open() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    // unbiased integer in [0, n), n >= 1 (Lemire with rejection)
    std::uint64_t uniform_below(std::uint64_t n) {
        std::uint64_t x = next_u64();
        unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t threshold = -n % n;
            while (lo < threshold) {
                x = next_u64();
                m = static_cast<unsigned __int128>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
    std::array<std::uint64_t, 4> state_;
};

// Anything that can drive the samplers: the real stream above, or a scripted
// stand-in in tests.
template <class R>
concept uniform_source = requires(R& r, std::uint64_t n) {
    { r.uniform_below(n) } -> std::convertible_to<std::uint64_t>;
    { r.next_u01() } -> std::convertible_to<double>;
    { r.next_u01_open() } -> std::convertible_to<double>;
};

} // namespace cfgdist
