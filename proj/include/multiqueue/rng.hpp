#pragma once

#include <cstdint>
#include <limits>

namespace multiqueue {

// SplitMix64: a counter-based generator with 64 bits of state. Output is a
// pure function of (seed, call index), which keeps runs reproducible across
// platforms and standard libraries.
class SplitMix64 {
   public:
    using result_type = std::uint64_t;

    constexpr explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {
    }

    static constexpr result_type min() noexcept {
        return 0;
    }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    constexpr result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

   private:
    std::uint64_t state_;
};

// Independent stream for one thread derived from a run-wide seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return SplitMix64::mix(seed ^ SplitMix64::mix(stream + 0x632be59bd9b4e019ULL));
}

// Uniform integer in [0, bound) without modulo bias (Lemire's method).
template <typename Generator>
constexpr std::uint64_t uniform_below(Generator& gen, std::uint64_t bound) noexcept {
    __extension__ typedef unsigned __int128 u128;
    u128 m = static_cast<u128>(gen()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        std::uint64_t const threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<u128>(gen()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

// Uniform integer in the closed range [lo, hi].
template <typename Generator>
constexpr std::uint64_t uniform_in(Generator& gen, std::uint64_t lo, std::uint64_t hi) noexcept {
    std::uint64_t const span = hi - lo;
    if (span == std::numeric_limits<std::uint64_t>::max()) {
        return gen();
    }
    return lo + uniform_below(gen, span + 1);
}

}  // namespace multiqueue
