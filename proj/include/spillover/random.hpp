#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace spillover {

/// Engine used throughout the harness. Library templates accept any
/// `std::uniform_random_bit_generator`; this alias fixes the choice for
/// reproducible runs.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent random streams consumed by one simulation replicate.
enum class StreamTag : std::uint64_t {
    Graph = 1,
    Assignment = 2,
    Noise = 3,
    NullSampler = 4,
};

constexpr std::string_view to_string(StreamTag tag) noexcept {
    switch (tag) {
        case StreamTag::Graph: return "graph";
        case StreamTag::Assignment: return "assignment";
        case StreamTag::Noise: return "noise";
        case StreamTag::NullSampler: return "null-sampler";
    }
    return "unknown";
}

/// Seed for (master, replicate, stream). For a fixed master seed and tag the
/// map replicate -> seed is a composition of bijections, so distinct
/// replicates never collide.
constexpr std::uint64_t derive_replicate_seed(std::uint64_t master_seed, std::uint64_t replicate_index,
                                              StreamTag tag) noexcept {
    std::uint64_t x = mix64(master_seed);
    x = mix64(x ^ replicate_index);
    x = mix64(x + 0x632be59bd9b4e019ULL * static_cast<std::uint64_t>(tag));
    return x;
}

inline Rng make_rng(std::uint64_t master_seed, std::uint64_t replicate_index, StreamTag tag) {
    return Rng(derive_replicate_seed(master_seed, replicate_index, tag));
}

/// Uniform integer in [0, bound). Full-range 64-bit engines take Lemire's
/// multiply-and-reject path; other engines fall back to the standard
/// distribution.
namespace detail {
__extension__ using u128 = unsigned __int128;
}  // namespace detail

template <std::uniform_random_bit_generator Urbg>
std::uint64_t uniform_below(Urbg& rng, std::uint64_t bound) {
    if constexpr (Urbg::min() == 0 && Urbg::max() == ~std::uint64_t{0}) {
        auto wide = static_cast<detail::u128>(rng()) * bound;
        auto low = static_cast<std::uint64_t>(wide);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                wide = static_cast<detail::u128>(rng()) * bound;
                low = static_cast<std::uint64_t>(wide);
            }
        }
        return static_cast<std::uint64_t>(wide >> 64);
    } else {
        return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(rng);
    }
}

/// Calls `visit(k)` for each index k in [0, count) selected independently with
/// probability p, skipping with geometric gaps instead of drawing every trial.
template <std::uniform_random_bit_generator Urbg, class Visit>
void for_each_bernoulli_index(std::uint64_t count, double p, Urbg& rng, Visit&& visit) {
    if (count == 0 || p <= 0.0) return;
    if (p >= 1.0) {
        for (std::uint64_t k = 0; k < count; ++k) visit(k);
        return;
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double log_q = std::log1p(-p);
    std::uint64_t k = 0;
    while (true) {
        const double r = unit(rng);
        // Number of failures before the next success: floor(log(1-r)/log(1-p)).
        const double skip = std::floor(std::log1p(-r) / log_q);
        if (skip >= static_cast<double>(count - k)) return;
        k += static_cast<std::uint64_t>(skip);
        visit(k);
        ++k;
        if (k >= count) return;
    }
}

}  // namespace spillover
