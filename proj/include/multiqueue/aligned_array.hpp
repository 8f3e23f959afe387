#pragma once

#include "multiqueue/cache_line.hpp"

#include <cstddef>
#include <memory>
#include <new>
#include <stdexcept>
#include <type_traits>
#include <utility>

namespace multiqueue {

// Fixed-size array whose storage starts on an `alignment` boundary and whose
// footprint is rounded up to a multiple of it, so nothing else shares its lines.
template <typename T>
class AlignedArray {
    static_assert(std::is_trivially_copyable_v<T> && std::is_trivially_destructible_v<T>);

   public:
    AlignedArray() = default;

    AlignedArray(std::size_t size, std::size_t alignment) : size_(size), alignment_(alignment) {
        if (!is_power_of_two(alignment_) || alignment_ < alignof(T)) {
            throw std::invalid_argument("invalid alignment");
        }
        std::size_t const bytes = round_up(size_ == 0 ? 1 : size_ * sizeof(T), alignment_);
        data_ = static_cast<T*>(::operator new(bytes, std::align_val_t{alignment_}));
        std::uninitialized_value_construct_n(data_, size_);
    }

    AlignedArray(AlignedArray&& other) noexcept
        : data_(std::exchange(other.data_, nullptr)), size_(std::exchange(other.size_, 0)),
          alignment_(other.alignment_) {
    }

    AlignedArray& operator=(AlignedArray&& other) noexcept {
        if (this != &other) {
            release();
            data_ = std::exchange(other.data_, nullptr);
            size_ = std::exchange(other.size_, 0);
            alignment_ = other.alignment_;
        }
        return *this;
    }

    AlignedArray(AlignedArray const&) = delete;
    AlignedArray& operator=(AlignedArray const&) = delete;

    ~AlignedArray() {
        release();
    }

    T& operator[](std::size_t i) noexcept {
        return data_[i];
    }
    T const& operator[](std::size_t i) const noexcept {
        return data_[i];
    }
    [[nodiscard]] std::size_t size() const noexcept {
        return size_;
    }
    [[nodiscard]] T* data() noexcept {
        return data_;
    }
    [[nodiscard]] T const* data() const noexcept {
        return data_;
    }

   private:
    void release() noexcept {
        if (data_ != nullptr) {
            ::operator delete(data_, std::align_val_t{alignment_});
            data_ = nullptr;
        }
    }

    T* data_ = nullptr;
    std::size_t size_ = 0;
    std::size_t alignment_ = alignof(T);
};

}  // namespace multiqueue
