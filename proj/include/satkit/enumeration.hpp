#ifndef SATKIT_ENUMERATION_HPP
#define SATKIT_ENUMERATION_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "satkit/errors.hpp"

namespace satkit::enumeration {

inline constexpr std::uint64_t kDefaultCap = 10'000'000;

// C(n,m), saturating at uint64 max instead of overflowing.
inline std::uint64_t binomial(std::int64_t n, std::int64_t m) {
    if (m < 0 || m > n) return 0;
    m = std::min(m, n - m);
    std::uint64_t result = 1;
    for (std::int64_t i = 1; i <= m; ++i) {
        const auto factor = static_cast<std::uint64_t>(n - m + i);
        if (result > std::numeric_limits<std::uint64_t>::max() / factor)
            return std::numeric_limits<std::uint64_t>::max();
        result = result * factor / static_cast<std::uint64_t>(i);
    }
    return result;
}

// Visits every size-m subset of {0,...,n-1} exactly once, in lexicographic
// order, as a sorted index vector.
template <typename Visitor>
void for_each_subset(std::int64_t n, std::int64_t m, Visitor&& visit) {
    require(n >= 2 && m >= 1 && m <= n - 1, errc::bad_input,
            "subset enumeration: need 1 <= m <= n-1");
    std::vector<std::int32_t> idx(static_cast<std::size_t>(m));
    for (std::int64_t i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(i);
    while (true) {
        visit(static_cast<const std::vector<std::int32_t>&>(idx));
        // advance to the next combination
        std::int64_t j = m - 1;
        while (j >= 0 && idx[static_cast<std::size_t>(j)] == static_cast<std::int32_t>(n - m + j)) --j;
        if (j < 0) break;
        ++idx[static_cast<std::size_t>(j)];
        for (std::int64_t l = j + 1; l < m; ++l)
            idx[static_cast<std::size_t>(l)] = idx[static_cast<std::size_t>(l - 1)] + 1;
    }
}

// Neumaier compensated accumulator; keeps exhaustive-moment certificates at
// the 1e-10 level even when summand magnitudes differ by orders of magnitude.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace satkit::enumeration

#endif
