#pragma once

#include "multiqueue/buffered_queue.hpp"
#include "multiqueue/cache_line.hpp"
#include "multiqueue/element.hpp"

#include <atomic>

namespace multiqueue {

// One slot of the queue array: a try-lock, a published copy of the smallest
// key that can be read without the lock, and the buffered sequential queue.
//
// top_key is written only by the lock holder, with release ordering, before
// the lock is dropped.
struct alignas(build_cache_line_size) InternalQueue {
    explicit InternalQueue(BufferConfig const& config) : queue(config) {
    }

    // Test-and-test-and-set; never blocks.
    bool try_lock() noexcept {
        return !locked.load(std::memory_order_relaxed) && !locked.exchange(true, std::memory_order_acquire);
    }

    // Publishes the current top key, then releases the lock.
    void unlock() noexcept {
        top.store(queue.top_key(), std::memory_order_release);
        locked.store(false, std::memory_order_release);
    }

    [[nodiscard]] key_type top_key() const noexcept {
        return top.load(std::memory_order_acquire);
    }

    [[nodiscard]] bool is_locked() const noexcept {
        return locked.load(std::memory_order_relaxed);
    }

    std::atomic<bool> locked{false};
    std::atomic<key_type> top{empty_key};
    BufferedQueue queue;
};

static_assert(sizeof(InternalQueue) % build_cache_line_size == 0);

}  // namespace multiqueue
