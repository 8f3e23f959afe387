#pragma once

#include "multiqueue/config.hpp"
#include "multiqueue/element.hpp"
#include "multiqueue/internal_queue.hpp"
#include "multiqueue/permutation_array.hpp"
#include "multiqueue/rng.hpp"

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

namespace multiqueue {

struct OperationStats {
    std::uint64_t inserts = 0;
    std::uint64_t deletions = 0;         // successful
    std::uint64_t failed_deletions = 0;  // returned Empty
    std::uint64_t lock_attempts = 0;
    std::uint64_t lock_failures = 0;
    std::uint64_t stick_refreshes = 0;
    std::uint64_t stick_aborts = 0;  // epochs abandoned because a lock was taken
    std::uint64_t scans = 0;
    // Deletions whose locked queue no longer held the compared top key.
    std::uint64_t stale_wins = 0;

    [[nodiscard]] std::uint64_t completed_operations() const noexcept {
        return inserts + deletions + failed_deletions;
    }

    [[nodiscard]] double lock_attempts_per_operation() const noexcept {
        auto const ops = completed_operations();
        return ops == 0 ? 0.0 : static_cast<double>(lock_attempts) / static_cast<double>(ops);
    }

    OperationStats& operator+=(OperationStats const& other) noexcept;
};

class HandleError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// Relaxed concurrent priority queue over c * p internal buffered heaps.
// Insertions go to a random unlocked queue; deletions lock the best of d
// candidates. All access goes through per-thread handles.
class MultiQueue {
   public:
    class Handle;

    explicit MultiQueue(Config const& config);
    ~MultiQueue();

    MultiQueue(MultiQueue const&) = delete;
    MultiQueue& operator=(MultiQueue const&) = delete;

    // Claims the handle for `thread_id` (< num_threads). Throws HandleError if
    // the id is out of range or currently claimed.
    Handle get_handle(std::size_t thread_id);

    [[nodiscard]] Config const& config() const noexcept {
        return config_;
    }
    [[nodiscard]] std::size_t num_queues() const noexcept {
        return num_queues_;
    }
    [[nodiscard]] key_type top_key(std::size_t index) const noexcept {
        return queue(index).top_key();
    }

    // Counters folded in from handles that have been released.
    [[nodiscard]] OperationStats stats() const;

    // Quiescent-only helpers for setup, diagnostics and tests.
    [[nodiscard]] std::size_t unsafe_size() const;
    void unsafe_insert_into(std::size_t index, Element e);
    [[nodiscard]] std::vector<PermutationArray::cell_type> permutation_snapshot() const;

    InternalQueue& queue(std::size_t index) noexcept {
        return *reinterpret_cast<InternalQueue*>(storage_.get() + index * stride_);
    }
    [[nodiscard]] InternalQueue const& queue(std::size_t index) const noexcept {
        return *reinterpret_cast<InternalQueue const*>(storage_.get() + index * stride_);
    }

    PermutationArray& permutation() noexcept {
        return permutation_;
    }

   private:
    struct StorageDeleter {
        std::size_t alignment;
        void operator()(std::byte* p) const noexcept {
            ::operator delete(p, std::align_val_t{alignment});
        }
    };

    void release_handle(std::size_t thread_id, OperationStats const& stats) noexcept;

    Config config_;
    std::size_t num_queues_;
    std::size_t stride_;
    std::unique_ptr<std::byte[], StorageDeleter> storage_;
    PermutationArray permutation_;
    std::unique_ptr<std::atomic<bool>[]> claimed_;
    mutable std::mutex stats_mutex_;
    OperationStats released_stats_;
};

// Per-thread access token: random generator state, the current sticky set
// and operation counters. Owned by one thread, never shared.
class MultiQueue::Handle {
   public:
    Handle(Handle&& other) noexcept;
    Handle& operator=(Handle&&) = delete;
    Handle(Handle const&) = delete;
    Handle& operator=(Handle const&) = delete;
    ~Handle();

    // Throws std::invalid_argument if e.key == empty_key.
    void insert(Element e);

    // Compares the d candidates' published tops and deletes from the best.
    // Returns nullopt when every candidate looked empty.
    MaybeElement try_delete();

    // try_delete, retried scan_retries times, then one pass over all queues
    // (skipping locked ones). Fails only if that pass finds nothing.
    MaybeElement try_delete_with_scan();

    // Draws a new sticky set and restarts the stickiness period.
    void refresh_stick_set();

    [[nodiscard]] std::size_t thread_id() const noexcept {
        return thread_id_;
    }
    [[nodiscard]] OperationStats const& stats() const noexcept {
        return stats_;
    }
    [[nodiscard]] std::size_t stick_counter() const noexcept {
        return stick_counter_;
    }
    // Queue indices currently stuck to (empty without stickiness).
    [[nodiscard]] std::vector<std::size_t> stick_set() const;
    // First of the d permutation slots owned in swap mode.
    [[nodiscard]] std::size_t permutation_slot_base() const noexcept {
        return thread_id_ * mq_->config_.candidates;
    }

   private:
    friend class MultiQueue;
    Handle(MultiQueue& mq, std::size_t thread_id);

    void draw_distinct(std::span<std::size_t> out);
    [[nodiscard]] std::size_t stuck_queue(std::size_t i) const noexcept;
    MaybeElement delete_locked(InternalQueue& q, key_type expected_top);
    MaybeElement try_delete_unsticky();
    MaybeElement try_delete_sticky();

    MultiQueue* mq_;
    std::size_t thread_id_;
    SplitMix64 rng_;
    std::vector<std::size_t> candidates_;
    std::vector<std::size_t> shuffle_pool_;
    std::vector<std::size_t> stick_set_;
    std::size_t stick_counter_ = 0;
    OperationStats stats_;
};

// Closed-form quality predictions for the sequential process where each
// element is equally likely to sit in any of the c * p queues.
struct RankErrorModel {
    std::size_t queue_factor;
    std::size_t num_threads;
    std::size_t candidates;

    [[nodiscard]] double num_queues() const noexcept {
        return static_cast<double>(queue_factor * num_threads);
    }
    // Probability that a given element lies in one of the d selected queues.
    [[nodiscard]] double selection_probability() const noexcept {
        return static_cast<double>(candidates) / num_queues();
    }
    // P(R = i) under the geometric estimate.
    [[nodiscard]] double point_probability(std::size_t i) const;
    // P(R >= i) = (1 - s)^i.
    [[nodiscard]] double tail_probability(std::size_t i) const;
    // E[R] = 1/s - 1 under the geometric estimate.
    [[nodiscard]] double estimated_mean() const noexcept {
        return 1.0 / selection_probability() - 1.0;
    }
    // Exact long-run mean for d = 2: 5/6 m - 1 + 1/(6m) with m = c * p.
    [[nodiscard]] double two_choice_mean() const noexcept {
        double const m = num_queues();
        return 5.0 / 6.0 * m - 1.0 + 1.0 / (6.0 * m);
    }
};

}  // namespace multiqueue
