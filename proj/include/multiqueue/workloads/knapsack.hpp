#pragma once

#include "multiqueue/multiqueue.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace multiqueue::workloads {

struct Item {
    std::uint64_t weight;
    std::uint64_t value;

    bool operator==(Item const&) const = default;
};

// Items in nonincreasing order of value density with prefix sums over them.
class KnapsackInstance {
   public:
    KnapsackInstance() = default;
    // Sorts the items by density (stable, so equal densities keep their order).
    KnapsackInstance(std::vector<Item> items, std::uint64_t capacity);

    [[nodiscard]] std::span<Item const> items() const noexcept {
        return items_;
    }
    [[nodiscard]] std::size_t size() const noexcept {
        return items_.size();
    }
    [[nodiscard]] std::uint64_t capacity() const noexcept {
        return capacity_;
    }
    // Sums over items [0, i).
    [[nodiscard]] std::uint64_t weight_prefix(std::size_t i) const noexcept {
        return weight_prefix_[i];
    }
    [[nodiscard]] std::uint64_t value_prefix(std::size_t i) const noexcept {
        return value_prefix_[i];
    }

    bool operator==(KnapsackInstance const& other) const {
        return items_ == other.items_ && capacity_ == other.capacity_;
    }

   private:
    std::vector<Item> items_;
    std::uint64_t capacity_ = 0;
    std::vector<std::uint64_t> weight_prefix_{0};
    std::vector<std::uint64_t> value_prefix_{0};
};

// Weights uniform in [1, W]; values w + k with k uniform in [V, floor(f V)],
// V = W / 10; capacity floor(capacity_fraction * total weight).
KnapsackInstance generate_knapsack(std::uint64_t max_weight, double f, double capacity_fraction, std::size_t items,
                                   std::uint64_t seed);

// Items [0, index) have been decided.
struct PartialSolution {
    std::uint64_t value = 0;
    std::uint64_t weight = 0;
    std::uint32_t index = 0;
    std::uint32_t finger = 0;  // greedy break index of the parent, a lower bound for ours
};

struct Bounds {
    std::uint64_t lower;  // value of the greedy completion
    std::uint64_t upper;  // greedy completion plus the fractional next item
    std::uint32_t break_index;  // first item past the frontier the greedy pass rejects
};

Bounds knapsack_bounds(KnapsackInstance const& inst, PartialSolution const& partial);

// Max-order on upper bounds expressed in the min-queue's key space.
constexpr key_type bound_to_key(std::uint64_t upper) noexcept {
    return empty_key - 1 - upper;
}
constexpr std::uint64_t key_to_bound(key_type key) noexcept {
    return empty_key - 1 - key;
}

struct KnapsackResult {
    std::uint64_t optimum = 0;
    std::uint64_t processed = 0;  // expanded partial solutions
    std::uint64_t pruned = 0;     // deleted but cut by the incumbent
    bool completed = true;        // false if the sequential expansion limit hit
    double seconds = 0.0;
    OperationStats stats;
};

// Parallel best-first branch-and-bound with one worker per handle of `mq`.
KnapsackResult run_knapsack(KnapsackInstance const& inst, MultiQueue& mq);

// Exact best-first search on a binary heap; stops early after
// `expansion_limit` expansions (0 = unlimited).
KnapsackResult solve_knapsack_sequential(KnapsackInstance const& inst, std::uint64_t expansion_limit = 0);

// Dynamic program over capacities, O(items * capacity).
std::uint64_t solve_knapsack_dp(KnapsackInstance const& inst);

}  // namespace multiqueue::workloads
