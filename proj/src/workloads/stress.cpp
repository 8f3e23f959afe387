#include "multiqueue/workloads/stress.hpp"

#include "multiqueue/termination.hpp"

#include <atomic>
#include <stdexcept>
#include <thread>

namespace multiqueue::workloads {

namespace {

using quality::OpKind;
using quality::OpRecord;

constexpr std::uint64_t timeout_check_interval = 256;

double seconds_between(std::uint64_t start_ns, std::uint64_t end_ns) {
    return static_cast<double>(end_ns - start_ns) * 1e-9;
}

}  // namespace

MonotonicResult run_monotonic(MultiQueue& mq, MonotonicParams const& params) {
    if (params.prefill == 0) {
        throw std::invalid_argument("monotonic workload needs a nonzero prefill");
    }
    std::size_t const p = mq.config().num_threads;
    std::uint64_t const n = params.prefill;
    MonotonicResult result;
    result.logs.resize(p);

    {
        auto handle = mq.get_handle(0);
        auto& log = result.logs[0];
        for (std::uint64_t key = 1; key <= n; ++key) {
            Element const e{key, key - 1};
            if (params.log_operations) {
                log.push_back({OpKind::insert, 0, e.key, e.value, now_ns()});
            }
            handle.insert(e);
        }
    }

    SpinBarrier start(p);
    std::atomic<bool> stop{false};
    std::vector<std::uint64_t> completed(p, 0);
    std::vector<OperationStats> stats(p);
    std::uint64_t start_ns = 0;
    std::uint64_t const timeout_ns =
        params.timeout_seconds > 0 ? static_cast<std::uint64_t>(params.timeout_seconds * 1e9) : 0;

    auto worker = [&](std::size_t t) {
        auto handle = mq.get_handle(t);
        SplitMix64 rng(derive_seed(mq.config().seed ^ 0x6d6f6e6f746f6e65ULL, t));
        auto& log = result.logs[t];
        auto const tid = static_cast<std::uint16_t>(t);
        if (params.log_operations) {
            log.reserve(log.size() + 2 * params.iterations_per_thread + 16);
        }
        if (start.arrive_and_wait()) {
            start_ns = now_ns();
        }
        start.arrive_and_wait();
        std::uint64_t i = 0;
        for (; i < params.iterations_per_thread; ++i) {
            if (timeout_ns != 0 && i % timeout_check_interval == 0) {
                if (stop.load(std::memory_order_relaxed)) {
                    break;
                }
                if (now_ns() - start_ns > timeout_ns) {
                    stop.store(true, std::memory_order_relaxed);
                    break;
                }
            }
            MaybeElement deleted;
            while (!(deleted = handle.try_delete())) {
                if (params.log_operations) {
                    log.push_back({OpKind::delete_failed, tid, 0, 0, now_ns()});
                }
                std::this_thread::yield();
            }
            if (params.log_operations) {
                log.push_back({OpKind::delete_success, tid, deleted->key, deleted->value, now_ns()});
            }
            key_type const k = deleted->key;
            Element const e{uniform_in(rng, k, k + n), n + i * p + t};
            if (params.log_operations) {
                log.push_back({OpKind::insert, tid, e.key, e.value, now_ns()});
            }
            handle.insert(e);
        }
        completed[t] = i;
        stats[t] = handle.stats();
    };

    std::vector<std::thread> threads;
    for (std::size_t t = 1; t < p; ++t) {
        threads.emplace_back(worker, t);
    }
    worker(0);
    for (auto& th : threads) {
        th.join();
    }
    std::uint64_t const end_ns = now_ns();

    for (std::size_t t = 0; t < p; ++t) {
        result.iterations += completed[t];
        result.stats += stats[t];
    }
    result.seconds = seconds_between(start_ns, end_ns);
    result.throughput = result.seconds > 0 ? static_cast<double>(result.iterations) / result.seconds : 0.0;
    result.timed_out = stop.load();
    return result;
}

InsertDeleteResult run_insert_delete(MultiQueue& mq, InsertDeleteParams const& params) {
    std::size_t const p = mq.config().num_threads;
    std::uint64_t const n = params.elements_per_thread;
    InsertDeleteResult result;
    if (params.collect_elements) {
        result.inserted_elements.resize(p);
        result.deleted_elements.resize(p);
    }
    SpinBarrier barrier(p);
    std::uint64_t t_start = 0;
    std::uint64_t t_inserted = 0;
    std::uint64_t t_deleted = 0;
    std::atomic<std::uint64_t> inserts_done{0};
    std::atomic<bool> early_delete{false};
    std::vector<std::uint64_t> deleted(p, 0);
    std::vector<OperationStats> stats(p);

    auto worker = [&](std::size_t t) {
        auto handle = mq.get_handle(t);
        SplitMix64 rng(derive_seed(mq.config().seed ^ 0x696e7364656cULL, t));
        if (barrier.arrive_and_wait()) {
            t_start = now_ns();
        }
        barrier.arrive_and_wait();
        for (std::uint64_t i = 0; i < n; ++i) {
            Element const e{uniform_in(rng, 1, n * p), t * n + i};
            handle.insert(e);
            if (params.collect_elements) {
                result.inserted_elements[t].push_back(e);
            }
        }
        inserts_done.fetch_add(n, std::memory_order_acq_rel);
        if (barrier.arrive_and_wait()) {
            t_inserted = now_ns();
        }
        barrier.arrive_and_wait();
        if (inserts_done.load(std::memory_order_acquire) != n * p) {
            early_delete.store(true);
        }
        while (MaybeElement e = handle.try_delete_with_scan()) {
            ++deleted[t];
            if (params.collect_elements) {
                result.deleted_elements[t].push_back(*e);
            }
        }
        if (barrier.arrive_and_wait()) {
            t_deleted = now_ns();
        }
        stats[t] = handle.stats();
    };

    std::vector<std::thread> threads;
    for (std::size_t t = 1; t < p; ++t) {
        threads.emplace_back(worker, t);
    }
    worker(0);
    for (auto& th : threads) {
        th.join();
    }

    result.inserted = n * p;
    for (std::size_t t = 0; t < p; ++t) {
        result.deleted += deleted[t];
        result.stats += stats[t];
    }
    result.insert_seconds = seconds_between(t_start, t_inserted);
    result.delete_seconds = seconds_between(t_inserted, t_deleted);
    result.insert_throughput =
        result.insert_seconds > 0 ? static_cast<double>(result.inserted) / result.insert_seconds : 0.0;
    result.delete_throughput =
        result.delete_seconds > 0 ? static_cast<double>(result.deleted) / result.delete_seconds : 0.0;
    result.deletions_started_before_inserts_finished = early_delete.load();
    return result;
}

}  // namespace multiqueue::workloads
