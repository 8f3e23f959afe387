#include "multiqueue/workloads/knapsack.hpp"

#include "multiqueue/termination.hpp"
#include "multiqueue/workloads/stress.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <queue>
#include <stdexcept>
#include <thread>

namespace multiqueue::workloads {

namespace {
__extension__ typedef unsigned __int128 u128;
}  // namespace

KnapsackInstance::KnapsackInstance(std::vector<Item> items, std::uint64_t capacity)
    : items_(std::move(items)), capacity_(capacity) {
    for (Item const& item : items_) {
        if (item.weight == 0) {
            throw std::invalid_argument("item weights must be positive");
        }
    }
    std::stable_sort(items_.begin(), items_.end(), [](Item const& a, Item const& b) {
        return static_cast<u128>(a.value) * b.weight > static_cast<u128>(b.value) * a.weight;
    });
    weight_prefix_.resize(items_.size() + 1);
    value_prefix_.resize(items_.size() + 1);
    for (std::size_t i = 0; i < items_.size(); ++i) {
        weight_prefix_[i + 1] = weight_prefix_[i] + items_[i].weight;
        value_prefix_[i + 1] = value_prefix_[i] + items_[i].value;
    }
}

KnapsackInstance generate_knapsack(std::uint64_t max_weight, double f, double capacity_fraction, std::size_t items,
                                   std::uint64_t seed) {
    if (max_weight < 10) {
        throw std::invalid_argument("max weight must be at least 10");
    }
    if (f < 1.0 || capacity_fraction <= 0.0 || capacity_fraction > 1.0) {
        throw std::invalid_argument("need f >= 1 and capacity fraction in (0, 1]");
    }
    SplitMix64 rng(derive_seed(seed, 0x6b6e61707361636bULL));
    std::uint64_t const v = max_weight / 10;
    auto const k_max = static_cast<std::uint64_t>(std::floor(f * static_cast<double>(v)));
    std::vector<Item> list;
    list.reserve(items);
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < items; ++i) {
        std::uint64_t const w = uniform_in(rng, 1, max_weight);
        std::uint64_t const k = uniform_in(rng, v, k_max);
        list.push_back({w, w + k});
        total += w;
    }
    auto const capacity = static_cast<std::uint64_t>(std::floor(capacity_fraction * static_cast<double>(total)));
    return KnapsackInstance(std::move(list), capacity);
}

Bounds knapsack_bounds(KnapsackInstance const& inst, PartialSolution const& partial) {
    std::size_t const n = inst.size();
    std::size_t const i = partial.index;
    if (i >= n) {
        return {partial.value, partial.value, static_cast<std::uint32_t>(n)};
    }
    std::uint64_t const room = inst.capacity() - partial.weight;
    std::uint64_t const base_w = inst.weight_prefix(i);
    // Items [i, j) fit greedily; j is the first that does not.
    std::size_t j = std::max<std::size_t>(partial.finger, i);
    while (j < n && inst.weight_prefix(j + 1) - base_w <= room) {
        ++j;
    }
    std::uint64_t const lower = partial.value + inst.value_prefix(j) - inst.value_prefix(i);
    std::uint64_t upper = lower;
    if (j < n) {
        std::uint64_t const left = room - (inst.weight_prefix(j) - base_w);
        Item const& next = inst.items()[j];
        upper += static_cast<std::uint64_t>(static_cast<u128>(left) * next.value / next.weight);
    }
    return {lower, upper, static_cast<std::uint32_t>(j)};
}

namespace {

// Children of an expanded node that might beat the incumbent, with bounds.
template <typename Emit>
void branch(KnapsackInstance const& inst, PartialSolution const& node, std::uint32_t finger, Emit&& emit) {
    Item const& item = inst.items()[node.index];
    auto const next = static_cast<std::uint32_t>(node.index + 1);
    if (node.weight + item.weight <= inst.capacity()) {
        PartialSolution take{node.value + item.value, node.weight + item.weight, next, finger};
        emit(take, knapsack_bounds(inst, take));
    }
    PartialSolution skip{node.value, node.weight, next, finger};
    emit(skip, knapsack_bounds(inst, skip));
}

// Append-only per-thread node storage. Readers on other threads only touch
// slots published through the queue, after the writer's lock release.
class NodeArena {
   public:
    static constexpr unsigned chunk_bits = 14;
    static constexpr unsigned thread_shift = 40;
    static constexpr std::size_t max_chunks = std::size_t{1} << 16;

    NodeArena() : chunks_(std::make_unique<std::unique_ptr<PartialSolution[]>[]>(max_chunks)) {
    }

    std::uint64_t push(PartialSolution const& node) {
        std::size_t const chunk = size_ >> chunk_bits;
        if (chunk >= max_chunks) {
            throw std::length_error("knapsack node arena exhausted");
        }
        if (!chunks_[chunk]) {
            chunks_[chunk] = std::make_unique<PartialSolution[]>(std::size_t{1} << chunk_bits);
        }
        chunks_[chunk][size_ & ((1u << chunk_bits) - 1)] = node;
        return size_++;
    }

    [[nodiscard]] PartialSolution const& at(std::uint64_t index) const noexcept {
        return chunks_[index >> chunk_bits][index & ((1u << chunk_bits) - 1)];
    }

   private:
    std::unique_ptr<std::unique_ptr<PartialSolution[]>[]> chunks_;
    std::uint64_t size_ = 0;
};

void raise_to(std::atomic<std::uint64_t>& target, std::uint64_t value) noexcept {
    std::uint64_t current = target.load(std::memory_order_relaxed);
    while (value > current && !target.compare_exchange_weak(current, value, std::memory_order_relaxed)) {
    }
}

}  // namespace

KnapsackResult run_knapsack(KnapsackInstance const& inst, MultiQueue& mq) {
    std::size_t const p = mq.config().num_threads;
    if (inst.size() >= std::numeric_limits<std::uint32_t>::max()) {
        throw std::invalid_argument("too many items");
    }
    std::vector<NodeArena> arenas(p);
    std::atomic<std::uint64_t> incumbent{0};
    KnapsackResult result;

    PartialSolution const root{};
    Bounds const rb = knapsack_bounds(inst, root);
    incumbent.store(rb.lower);
    if (rb.upper > rb.lower) {
        auto handle = mq.get_handle(0);
        handle.insert({bound_to_key(rb.upper), arenas[0].push({root.value, root.weight, root.index, rb.break_index})});
    }

    struct Counters {
        std::uint64_t processed = 0;
        std::uint64_t pruned = 0;
        OperationStats stats;
    };
    std::vector<Counters> counters(p);
    TerminationState termination(p);
    SpinBarrier start(p);
    std::uint64_t start_ns = 0;

    auto worker = [&](std::size_t t) {
        auto handle = mq.get_handle(t);
        NodeArena& own = arenas[t];
        Counters& c = counters[t];
        std::uint64_t const tag = std::uint64_t{t} << NodeArena::thread_shift;
        std::uint64_t const index_mask = (std::uint64_t{1} << NodeArena::thread_shift) - 1;
        if (start.arrive_and_wait()) {
            start_ns = now_ns();
        }
        start.arrive_and_wait();
        termination.process_until_empty(
            [&] { return handle.try_delete_with_scan(); },
            [&](Element e) {
                if (key_to_bound(e.key) <= incumbent.load(std::memory_order_relaxed)) {
                    ++c.pruned;
                    return;
                }
                ++c.processed;
                PartialSolution const node = arenas[e.value >> NodeArena::thread_shift].at(e.value & index_mask);
                branch(inst, node, node.finger, [&](PartialSolution child, Bounds const& b) {
                    raise_to(incumbent, b.lower);
                    if (b.upper > incumbent.load(std::memory_order_relaxed)) {
                        child.finger = b.break_index;
                        handle.insert({bound_to_key(b.upper), tag | own.push(child)});
                    }
                });
            });
        c.stats = handle.stats();
    };

    std::vector<std::thread> threads;
    for (std::size_t t = 1; t < p; ++t) {
        threads.emplace_back(worker, t);
    }
    worker(0);
    for (auto& th : threads) {
        th.join();
    }

    result.seconds = static_cast<double>(now_ns() - start_ns) * 1e-9;
    result.optimum = incumbent.load();
    for (Counters const& c : counters) {
        result.processed += c.processed;
        result.pruned += c.pruned;
        result.stats += c.stats;
    }
    return result;
}

KnapsackResult solve_knapsack_sequential(KnapsackInstance const& inst, std::uint64_t expansion_limit) {
    struct Entry {
        std::uint64_t upper;
        std::uint64_t order;  // insertion counter, FIFO among equal bounds
        PartialSolution node;
        bool operator<(Entry const& other) const {
            return upper != other.upper ? upper < other.upper : order > other.order;
        }
    };
    KnapsackResult result;
    std::uint64_t const start = now_ns();
    std::priority_queue<Entry> queue;
    std::uint64_t order = 0;
    PartialSolution root{};
    Bounds const rb = knapsack_bounds(inst, root);
    std::uint64_t incumbent = rb.lower;
    if (rb.upper > rb.lower) {
        root.finger = rb.break_index;
        queue.push({rb.upper, order++, root});
    }
    while (!queue.empty()) {
        Entry const top = queue.top();
        queue.pop();
        if (top.upper <= incumbent) {
            result.pruned += 1 + queue.size();
            break;
        }
        if (expansion_limit != 0 && result.processed == expansion_limit) {
            result.completed = false;
            break;
        }
        ++result.processed;
        branch(inst, top.node, top.node.finger, [&](PartialSolution child, Bounds const& b) {
            incumbent = std::max(incumbent, b.lower);
            if (b.upper > incumbent) {
                child.finger = b.break_index;
                queue.push({b.upper, order++, child});
            }
        });
    }
    result.optimum = incumbent;
    result.seconds = static_cast<double>(now_ns() - start) * 1e-9;
    return result;
}

std::uint64_t solve_knapsack_dp(KnapsackInstance const& inst) {
    std::uint64_t const cap = inst.capacity();
    std::vector<std::uint64_t> best(cap + 1, 0);
    for (Item const& item : inst.items()) {
        if (item.weight > cap) {
            continue;
        }
        for (std::uint64_t c = cap; c >= item.weight; --c) {
            best[c] = std::max(best[c], best[c - item.weight] + item.value);
            if (c == item.weight) {
                break;
            }
        }
    }
    return best[cap];
}

}  // namespace multiqueue::workloads
