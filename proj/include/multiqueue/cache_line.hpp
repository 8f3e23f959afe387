#pragma once

#include <cstddef>

#ifndef MQ_CACHE_LINE_SIZE
#define MQ_CACHE_LINE_SIZE 64
#endif

namespace multiqueue {

inline constexpr std::size_t build_cache_line_size = MQ_CACHE_LINE_SIZE;
static_assert(build_cache_line_size == 64 || build_cache_line_size == 128);

constexpr std::size_t round_up(std::size_t n, std::size_t multiple) noexcept {
    return (n + multiple - 1) / multiple * multiple;
}

constexpr bool is_power_of_two(std::size_t n) noexcept {
    return n != 0 && (n & (n - 1)) == 0;
}

}  // namespace multiqueue
