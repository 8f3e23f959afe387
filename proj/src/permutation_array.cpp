#include "multiqueue/permutation_array.hpp"

namespace multiqueue {

PermutationArray::PermutationArray(std::size_t size)
    : size_(size), cells_(std::make_unique<std::atomic<cell_type>[]>(size)) {
    for (std::size_t i = 0; i < size_; ++i) {
        cells_[i].store(static_cast<cell_type>(i), std::memory_order_relaxed);
    }
}

std::vector<PermutationArray::cell_type> PermutationArray::snapshot() const {
    std::vector<cell_type> result(size_);
    for (std::size_t i = 0; i < size_; ++i) {
        result[i] = cells_[i].load(std::memory_order_acquire);
    }
    return result;
}

}  // namespace multiqueue
