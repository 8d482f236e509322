#ifndef BPRDS_RANDOM_HPP
#define BPRDS_RANDOM_HPP

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace bprds {

// std::uniform_int_distribution and std::shuffle differ between standard
// libraries; these keep seeded results identical everywhere.

/// Uniform draw from [0, n) by rejection on the raw 64-bit engine output.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return draw % n;
}

/// Fisher-Yates, walking from the back.
template <typename T>
void seeded_shuffle(std::span<T> items, std::mt19937_64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace bprds

#endif  // BPRDS_RANDOM_HPP
