#pragma once

#include <cstdint>
#include <limits>
#include <optional>

namespace multiqueue {

using key_type = std::uint64_t;
using value_type = std::uint64_t;

// Reserved key meaning "no element". It compares greater than every valid key,
// so it doubles as the published top key of an empty queue.
inline constexpr key_type empty_key = std::numeric_limits<key_type>::max();

struct Element {
    key_type key = empty_key;
    value_type value = 0;

    friend constexpr bool operator==(Element const&, Element const&) = default;
};

// Orders by key only; equal keys are equivalent regardless of value.
struct KeyLess {
    constexpr bool operator()(Element const& lhs, Element const& rhs) const noexcept {
        return lhs.key < rhs.key;
    }
};

using MaybeElement = std::optional<Element>;

}  // namespace multiqueue
