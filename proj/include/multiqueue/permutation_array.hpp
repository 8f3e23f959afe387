#pragma once

#include "multiqueue/rng.hpp"

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

namespace multiqueue {

// Global permutation of queue indices used by swap stickiness. Every thread
// owns a fixed set of slots; only the owner ever invalidates (sets to -1) one
// of its slots, which is what makes the exchange/CAS swap below correct.
class PermutationArray {
   public:
    using cell_type = std::int64_t;
    static constexpr cell_type invalid = -1;

    explicit PermutationArray(std::size_t size = 0);

    [[nodiscard]] std::size_t size() const noexcept {
        return size_;
    }

    [[nodiscard]] cell_type load(std::size_t slot) const noexcept {
        return cells_[slot].load(std::memory_order_acquire);
    }

    // Swaps the value in `slot` (owned by the caller) with the value of a
    // random other valid slot. `pick` yields candidate slot indices. Returns
    // the number of candidates drawn.
    template <typename SlotPicker>
    std::size_t swap_slot(std::size_t slot, SlotPicker&& pick) noexcept {
        cell_type const own = cells_[slot].exchange(invalid, std::memory_order_acq_rel);
        std::size_t draws = 0;
        cell_type other = invalid;
        while (true) {
            std::size_t const target = pick();
            ++draws;
            other = cells_[target].load(std::memory_order_acquire);
            if (other != invalid &&
                cells_[target].compare_exchange_strong(other, own, std::memory_order_acq_rel)) {
                break;
            }
        }
        cells_[slot].store(other, std::memory_order_release);
        return draws;
    }

    std::size_t swap_slot_random(std::size_t slot, SplitMix64& rng) noexcept {
        return swap_slot(slot, [&] { return static_cast<std::size_t>(uniform_below(rng, size_)); });
    }

    // Non-atomic view; meaningful only at quiescent points.
    [[nodiscard]] std::vector<cell_type> snapshot() const;

   private:
    std::size_t size_;
    std::unique_ptr<std::atomic<cell_type>[]> cells_;
};

}  // namespace multiqueue
