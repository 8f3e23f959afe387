#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <type_traits>
#include <utility>

namespace multiqueue {

namespace detail {

inline constexpr std::uint32_t yield_interval = 64;

inline void backoff(std::uint32_t& spins) noexcept {
    if (++spins % yield_interval == 0) {
        std::this_thread::yield();
    }
}

}  // namespace detail

// Spinning sense-reversing barrier for a fixed number of threads.
class SpinBarrier {
   public:
    explicit SpinBarrier(std::size_t num_threads) : num_threads_(num_threads), remaining_(num_threads) {
        if (num_threads == 0) {
            throw std::invalid_argument("barrier needs at least one thread");
        }
    }

    // Returns true for exactly one thread per phase (the last to arrive).
    bool arrive_and_wait() noexcept {
        bool const sense = !sense_.load(std::memory_order_acquire);
        if (remaining_.fetch_sub(1, std::memory_order_acq_rel) == 1) {
            remaining_.store(num_threads_, std::memory_order_relaxed);
            sense_.store(sense, std::memory_order_release);
            return true;
        }
        std::uint32_t spins = 0;
        while (sense_.load(std::memory_order_acquire) != sense) {
            detail::backoff(spins);
        }
        return false;
    }

   private:
    std::size_t const num_threads_;
    std::atomic<std::size_t> remaining_;
    std::atomic<bool> sense_{false};
};

// Shared counters of the polling/idle double-counting protocol. A thread
// increments `idle` only while counted in `polling`, so
// 0 <= idle <= polling <= num_threads holds throughout.
class TerminationState {
   public:
    explicit TerminationState(std::size_t num_threads) : num_threads_(num_threads) {
        if (num_threads == 0) {
            throw std::invalid_argument("termination detection needs at least one thread");
        }
    }

    TerminationState(TerminationState const&) = delete;
    TerminationState& operator=(TerminationState const&) = delete;

    [[nodiscard]] std::size_t num_threads() const noexcept {
        return num_threads_;
    }
    [[nodiscard]] std::size_t polling() const noexcept {
        return polling_.load();
    }
    [[nodiscard]] std::size_t idle() const noexcept {
        return idle_.load();
    }

    // Called by each of the num_threads participants. `try_delete()` returns an
    // optional-like value; `process(element)` may insert new elements. Returns
    // once every participant's last deletion failed with no insertion pending,
    // which for a queue with scan-on-failure deletions means the queue is empty.
    // `on_terminate()` runs right before returning.
    template <typename TryDelete, typename Process, typename OnTerminate>
    void process_until_empty(TryDelete&& try_delete, Process&& process, OnTerminate&& on_terminate) {
        while (true) {
            auto e = try_delete();
            if (!e) {
                ++polling_;
                std::uint32_t spins = 0;
                while (true) {
                    e = try_delete();
                    if (e) {
                        break;
                    }
                    if (polling_ < num_threads_) {
                        detail::backoff(spins);
                        continue;
                    }
                    ++idle_;
                    while (polling_ == num_threads_) {
                        if (idle_ == num_threads_) {
                            on_terminate();
                            return;
                        }
                        detail::backoff(spins);
                    }
                    --idle_;
                }
                --polling_;
            }
            process(*e);
        }
    }

    template <typename TryDelete, typename Process>
    void process_until_empty(TryDelete&& try_delete, Process&& process) {
        process_until_empty(std::forward<TryDelete>(try_delete), std::forward<Process>(process), [] {});
    }

   private:
    friend class CountingTermination;

    std::size_t const num_threads_;
    alignas(64) std::atomic<std::size_t> polling_{0};
    alignas(64) std::atomic<std::size_t> idle_{0};
};

// Variant for queues whose deletions may fail arbitrarily. Each thread counts
// its successful deletions and the insertions reported by `process`. Once all
// threads are idle they rendezvous, sum the counters, and terminate only if
// insertions (plus the initial fill) equal deletions; otherwise everyone
// resumes working.
class CountingTermination {
   public:
    CountingTermination(std::size_t num_threads, std::uint64_t initial_elements)
        : state_(num_threads), barrier_(num_threads), initial_elements_(initial_elements) {
    }

    [[nodiscard]] std::size_t num_threads() const noexcept {
        return state_.num_threads();
    }
    // Completed rendezvous rounds so far.
    [[nodiscard]] std::uint64_t rendezvous_count() const noexcept {
        return rendezvous_.load();
    }

    // `process(element)` returns how many elements it inserted.
    template <typename TryDelete, typename Process>
    void process_until_empty(TryDelete&& try_delete, Process&& process) {
        static_assert(std::is_convertible_v<decltype(process(*try_delete())), std::uint64_t>,
                      "process must return the number of inserted elements");
        std::uint64_t inserted = 0;
        std::uint64_t deleted = 0;
        std::size_t const p = state_.num_threads_;
        auto& polling = state_.polling_;
        auto& idle = state_.idle_;
        while (true) {
            auto e = try_delete();
            if (!e) {
                ++polling;
                std::uint32_t spins = 0;
                bool all_idle = false;
                while (!all_idle) {
                    e = try_delete();
                    if (e) {
                        break;
                    }
                    if (polling < p) {
                        detail::backoff(spins);
                        continue;
                    }
                    ++idle;
                    while (polling == p) {
                        if (idle == p) {
                            all_idle = true;
                            break;
                        }
                        detail::backoff(spins);
                    }
                    if (!all_idle) {
                        --idle;
                    }
                }
                if (all_idle) {
                    if (rendezvous(inserted, deleted)) {
                        return;
                    }
                    continue;
                }
                --polling;
            }
            ++deleted;
            inserted += process(*e);
        }
    }

   private:
    // All threads are idle here, so nobody touches polling/idle until the
    // leader resets them between the second and third barrier.
    bool rendezvous(std::uint64_t inserted, std::uint64_t deleted) {
        inserted_sum_ += inserted;
        deleted_sum_ += deleted;
        barrier_.arrive_and_wait();
        bool const done = inserted_sum_.load() + initial_elements_ == deleted_sum_.load();
        if (barrier_.arrive_and_wait()) {
            inserted_sum_ = 0;
            deleted_sum_ = 0;
            state_.polling_ = 0;
            state_.idle_ = 0;
            ++rendezvous_;
        }
        barrier_.arrive_and_wait();
        return done;
    }

    TerminationState state_;
    SpinBarrier barrier_;
    std::uint64_t const initial_elements_;
    alignas(64) std::atomic<std::uint64_t> inserted_sum_{0};
    std::atomic<std::uint64_t> deleted_sum_{0};
    std::atomic<std::uint64_t> rendezvous_{0};
};

}  // namespace multiqueue
