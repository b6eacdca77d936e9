#ifndef SATKIT_RNG_HPP
#define SATKIT_RNG_HPP

#include <cstdint>
#include <vector>

#include "satkit/errors.hpp"
#include "satkit/normal.hpp"

namespace satkit::rng {

// Counter-based generator in the splitmix64 family: the i-th draw is a pure
// function of (seed, i), so streams can be split without sharing state.
// Finalizer constants from Steele, Lea & Flood (2014) / Vigna's splitmix64.
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Seed of child stream `index` under `seed`. Mixed twice so child seeds do not
// collide with the parent's own output sequence.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
    return mix64(mix64(seed ^ 0x8E2F4D1B9C6A5E3Full) + (index + 1) * kGolden);
}

class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += kGolden;
        return mix64(state_);
    }

    // Uniform on the open interval (0,1); never returns an endpoint.
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via the inverse CDF; one uniform per variate keeps
    // replay deterministic across platforms.
    double next_normal() { return normal_quantile(next_unit()); }

    bool next_bernoulli(double p) { return next_unit() < p; }

    // Unbiased integer in [0, bound) (Lemire's multiply-with-rejection).
    std::uint64_t next_below(std::uint64_t bound) {
        require(bound > 0, errc::bad_input, "next_below: bound must be positive");
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t threshold = -bound % bound;
            while (lo < threshold) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    Stream child(std::uint64_t index) const { return Stream(derive_stream(state_, index)); }

private:
    std::uint64_t state_;
};

// Treatment vector for complete randomization: exactly m of n entries set,
// uniform over all C(n,m) subsets (partial Fisher-Yates).
inline std::vector<std::uint8_t> sample_assignment(std::int64_t n, std::int64_t m, Stream& stream) {
    require(n >= 2 && m >= 1 && m <= n - 1, errc::bad_input, "sample_assignment: need 1 <= m <= n-1");
    std::vector<std::int32_t> idx(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(i);
    for (std::int64_t i = 0; i < m; ++i) {
        const auto j = i + static_cast<std::int64_t>(stream.next_below(static_cast<std::uint64_t>(n - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    std::vector<std::uint8_t> t(static_cast<std::size_t>(n), 0);
    for (std::int64_t i = 0; i < m; ++i) t[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = 1;
    return t;
}

}  // namespace satkit::rng

#endif
