#pragma once

#include "multiqueue/quality/replay.hpp"
#include "multiqueue/rng.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace multiqueue::testing {

// A valid replay sequence: inserts of unique values with colliding keys,
// deletions of random alive elements (skewed toward small keys), occasional
// failed deletions, and a drain at the end when `drain` is set.
inline quality::OpLog random_log(std::size_t ops, std::uint64_t seed, bool drain = false) {
    using quality::OpKind;
    SplitMix64 rng(seed);
    quality::OpLog log;
    std::vector<Element> alive;
    std::uint64_t const key_range = 1 + uniform_below(rng, 2000);
    value_type next_value = 0;
    auto remove_alive = [&](std::size_t index) {
        Element const e = alive[index];
        alive[index] = alive.back();
        alive.pop_back();
        return e;
    };
    auto pick_victim = [&] {
        // Min of two uniform picks by key.
        std::size_t a = uniform_below(rng, alive.size());
        std::size_t const b = uniform_below(rng, alive.size());
        if (alive[b].key < alive[a].key) {
            a = b;
        }
        return a;
    };
    for (std::size_t i = 0; i < ops; ++i) {
        std::uint64_t const roll = uniform_below(rng, 100);
        auto const tid = static_cast<std::uint16_t>(uniform_below(rng, 4));
        if (alive.empty() || roll < 50) {
            Element const e{uniform_below(rng, key_range), next_value++};
            alive.push_back(e);
            log.push_back({OpKind::insert, tid, e.key, e.value, i});
        } else if (roll < 95) {
            Element const e = remove_alive(pick_victim());
            log.push_back({OpKind::delete_success, tid, e.key, e.value, i});
        } else {
            log.push_back({OpKind::delete_failed, tid, 0, 0, i});
        }
    }
    if (drain) {
        std::uint64_t t = ops;
        while (!alive.empty()) {
            Element const e = remove_alive(pick_victim());
            log.push_back({OpKind::delete_success, 0, e.key, e.value, t++});
        }
    }
    return log;
}

}  // namespace multiqueue::testing
