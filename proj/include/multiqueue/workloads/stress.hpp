#pragma once

#include "multiqueue/multiqueue.hpp"
#include "multiqueue/quality/replay.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace multiqueue::workloads {

// Nanoseconds on the process-wide monotonic clock.
inline std::uint64_t now_ns() noexcept {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now().time_since_epoch())
            .count());
}

struct MonotonicParams {
    std::uint64_t prefill = 1 << 16;          // keys 1..prefill are inserted before timing
    std::uint64_t iterations_per_thread = 1 << 20;
    double timeout_seconds = 5.0;             // <= 0 disables the timeout
    bool log_operations = false;
};

struct MonotonicResult {
    std::uint64_t iterations = 0;
    double seconds = 0.0;
    double throughput = 0.0;  // iterations per second
    OperationStats stats;
    std::vector<quality::OpLog> logs;  // per thread, prefill in thread 0's log
    bool timed_out = false;
};

// Prefills keys {1..n}, then every thread alternates a deletion (retried until
// it succeeds; failures are logged) with an insertion of a key drawn uniformly
// from [k, k + n], k being the key just deleted. Uses one thread per handle of
// `mq` (config().num_threads).
MonotonicResult run_monotonic(MultiQueue& mq, MonotonicParams const& params);

struct InsertDeleteParams {
    std::uint64_t elements_per_thread = 1 << 16;
    bool collect_elements = false;
};

struct InsertDeleteResult {
    double insert_seconds = 0.0;
    double delete_seconds = 0.0;
    double insert_throughput = 0.0;  // operations per second
    double delete_throughput = 0.0;
    std::uint64_t inserted = 0;
    std::uint64_t deleted = 0;
    bool deletions_started_before_inserts_finished = false;
    OperationStats stats;
    std::vector<std::vector<Element>> inserted_elements;  // when collecting
    std::vector<std::vector<Element>> deleted_elements;
};

// All threads insert n keys drawn uniformly from [1, n * p]; after a barrier
// every thread deletes with scan fallback until it sees the queue empty.
InsertDeleteResult run_insert_delete(MultiQueue& mq, InsertDeleteParams const& params);

}  // namespace multiqueue::workloads
