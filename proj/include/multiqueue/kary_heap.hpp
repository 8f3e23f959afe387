#pragma once

#include "multiqueue/element.hpp"

#include <cassert>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace multiqueue {

// Implicit k-ary min-heap on Element keys. Child i (0-based) of node j lives at
// k * j + i + 1. Storage grows geometrically and is only released on destruction.
class KaryHeap {
   public:
    using size_type = std::size_t;

    explicit KaryHeap(size_type arity = 8) : arity_(arity) {
        if (arity_ < 2) {
            throw std::invalid_argument("heap arity must be at least 2");
        }
    }

    [[nodiscard]] size_type arity() const noexcept {
        return arity_;
    }

    [[nodiscard]] bool empty() const noexcept {
        return data_.empty();
    }

    [[nodiscard]] size_type size() const noexcept {
        return data_.size();
    }

    [[nodiscard]] Element const& top() const {
        assert(!empty());
        return data_.front();
    }

    void reserve(size_type capacity) {
        data_.reserve(capacity);
    }

    void push(Element e) {
        size_type pos = data_.size();
        data_.push_back(e);
        while (pos > 0) {
            size_type const parent = (pos - 1) / arity_;
            if (!(e.key < data_[parent].key)) {
                break;
            }
            data_[pos] = data_[parent];
            pos = parent;
        }
        data_[pos] = e;
    }

    Element pop_min() {
        assert(!empty());
        Element const result = data_.front();
        Element const last = data_.back();
        data_.pop_back();
        if (!data_.empty()) {
            sift_down_from_root(last);
        }
        return result;
    }

    [[nodiscard]] std::span<Element const> elements() const noexcept {
        return data_;
    }

    [[nodiscard]] bool satisfies_heap_order() const noexcept {
        for (size_type i = 1; i < data_.size(); ++i) {
            if (data_[i].key < data_[(i - 1) / arity_].key) {
                return false;
            }
        }
        return true;
    }

   private:
    // Hole-based sift-down: moves the smaller child up until `e` fits.
    void sift_down_from_root(Element e) {
        size_type const n = data_.size();
        size_type pos = 0;
        while (true) {
            size_type const first = pos * arity_ + 1;
            if (first >= n) {
                break;
            }
            size_type const last = first + arity_ < n ? first + arity_ : n;
            size_type best = first;
            for (size_type c = first + 1; c < last; ++c) {
                if (data_[c].key < data_[best].key) {
                    best = c;
                }
            }
            if (!(data_[best].key < e.key)) {
                break;
            }
            data_[pos] = data_[best];
            pos = best;
        }
        data_[pos] = e;
    }

    size_type arity_;
    std::vector<Element> data_;
};

}  // namespace multiqueue
