#pragma once

#include "multiqueue/aligned_array.hpp"
#include "multiqueue/cache_line.hpp"
#include "multiqueue/element.hpp"
#include "multiqueue/kary_heap.hpp"

#include <cassert>
#include <cstddef>
#include <span>

namespace multiqueue {

// Unordered bounded buffer collecting insertions before they reach the heap.
class InsertionBuffer {
   public:
    InsertionBuffer(std::size_t capacity, std::size_t alignment = build_cache_line_size)
        : storage_(capacity, alignment) {
    }

    [[nodiscard]] std::size_t capacity() const noexcept {
        return storage_.size();
    }
    [[nodiscard]] std::size_t size() const noexcept {
        return size_;
    }
    [[nodiscard]] bool empty() const noexcept {
        return size_ == 0;
    }
    [[nodiscard]] bool full() const noexcept {
        return size_ == storage_.size();
    }

    void push(Element e) noexcept {
        assert(!full());
        storage_[size_++] = e;
    }

    void clear() noexcept {
        size_ = 0;
    }

    [[nodiscard]] std::span<Element const> elements() const noexcept {
        return {storage_.data(), size_};
    }

   private:
    AlignedArray<Element> storage_;
    std::size_t size_ = 0;
};

// Ring buffer kept sorted ascending by key. Removing the minimum is O(1);
// inserting shifts whichever side of the insertion point is shorter.
class DeletionBuffer {
   public:
    DeletionBuffer(std::size_t capacity, std::size_t alignment = build_cache_line_size)
        : storage_(capacity, alignment) {
    }

    [[nodiscard]] std::size_t capacity() const noexcept {
        return storage_.size();
    }
    [[nodiscard]] std::size_t size() const noexcept {
        return size_;
    }
    [[nodiscard]] bool empty() const noexcept {
        return size_ == 0;
    }
    [[nodiscard]] bool full() const noexcept {
        return size_ == storage_.size();
    }

    // i-th smallest element, 0 <= i < size().
    [[nodiscard]] Element const& operator[](std::size_t i) const noexcept {
        return storage_[slot(i)];
    }
    [[nodiscard]] Element const& min() const noexcept {
        assert(!empty());
        return storage_[head_];
    }
    [[nodiscard]] Element const& max() const noexcept {
        assert(!empty());
        return storage_[slot(size_ - 1)];
    }

    Element pop_min() noexcept {
        assert(!empty());
        Element const e = storage_[head_];
        head_ = head_ + 1 == capacity() ? 0 : head_ + 1;
        --size_;
        return e;
    }

    Element pop_max() noexcept {
        assert(!empty());
        --size_;
        return storage_[slot(size_)];
    }

    // Appends an element not smaller than the current maximum.
    void push_back(Element e) noexcept {
        assert(!full());
        assert(empty() || !(e.key < max().key));
        storage_[slot(size_)] = e;
        ++size_;
    }

    void insert(Element e) noexcept {
        assert(!full());
        // Equal keys are placed after existing ones.
        std::size_t pos = size_;
        if (size_ > 0 && e.key < storage_[slot(size_ / 2)].key) {
            pos = 0;
            while (!(e.key < storage_[slot(pos)].key)) {
                ++pos;
            }
            // Shift the prefix [0, pos) one slot towards the front.
            head_ = head_ == 0 ? capacity() - 1 : head_ - 1;
            for (std::size_t i = 0; i < pos; ++i) {
                storage_[slot(i)] = storage_[slot(i + 1)];
            }
        } else {
            while (pos > 0 && e.key < storage_[slot(pos - 1)].key) {
                storage_[slot(pos)] = storage_[slot(pos - 1)];
                --pos;
            }
        }
        storage_[slot(pos)] = e;
        ++size_;
    }

    void clear() noexcept {
        head_ = 0;
        size_ = 0;
    }

    [[nodiscard]] bool is_sorted() const noexcept {
        for (std::size_t i = 1; i < size_; ++i) {
            if ((*this)[i].key < (*this)[i - 1].key) {
                return false;
            }
        }
        return true;
    }

   private:
    [[nodiscard]] std::size_t slot(std::size_t i) const noexcept {
        std::size_t const s = head_ + i;
        return s >= capacity() ? s - capacity() : s;
    }

    AlignedArray<Element> storage_;
    std::size_t head_ = 0;
    std::size_t size_ = 0;
};

struct BufferConfig {
    std::size_t insertion_capacity = 16;
    std::size_t deletion_capacity = 16;
    std::size_t heap_arity = 8;
    std::size_t alignment = build_cache_line_size;
};

// Sequential priority queue made of a deletion buffer holding the smallest
// elements, an insertion buffer, and a k-ary heap for the rest. Not thread-safe.
//
// Invariants: every element of the deletion buffer is <= every element of the
// insertion buffer and the heap, and an empty deletion buffer implies an empty
// queue.
class BufferedQueue {
   public:
    explicit BufferedQueue(BufferConfig const& config = {});

    // Inserts `e`. Small elements go straight into the deletion buffer, the
    // displaced maximum (if any) continues down the insertion path.
    void insert(Element e);

    // Removes the minimum, refilling the deletion buffer from the heap once it
    // runs dry. Returns nullopt when the queue is empty.
    MaybeElement delete_min();

    void flush_insertion_buffer();

    [[nodiscard]] key_type top_key() const noexcept {
        return dbuf_.empty() ? empty_key : dbuf_.min().key;
    }
    [[nodiscard]] bool empty() const noexcept {
        return dbuf_.empty();
    }
    [[nodiscard]] std::size_t size() const noexcept {
        return dbuf_.size() + ibuf_.size() + heap_.size();
    }

    void reserve(std::size_t capacity) {
        heap_.reserve(capacity);
    }

    [[nodiscard]] bool check_invariants() const;

    // Direct access for tests and diagnostics.
    InsertionBuffer& insertion_buffer() noexcept {
        return ibuf_;
    }
    DeletionBuffer& deletion_buffer() noexcept {
        return dbuf_;
    }
    KaryHeap& heap() noexcept {
        return heap_;
    }
    [[nodiscard]] InsertionBuffer const& insertion_buffer() const noexcept {
        return ibuf_;
    }
    [[nodiscard]] DeletionBuffer const& deletion_buffer() const noexcept {
        return dbuf_;
    }
    [[nodiscard]] KaryHeap const& heap() const noexcept {
        return heap_;
    }

   private:
    void refill_deletion_buffer();

    InsertionBuffer ibuf_;
    DeletionBuffer dbuf_;
    KaryHeap heap_;
};

}  // namespace multiqueue
