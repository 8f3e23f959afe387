#include "multiqueue/buffered_queue.hpp"

#include <stdexcept>

namespace multiqueue {

namespace {

BufferConfig const& validated(BufferConfig const& config) {
    if (config.insertion_capacity == 0 || config.deletion_capacity == 0) {
        throw std::invalid_argument("buffer capacities must be positive");
    }
    return config;
}

}  // namespace

BufferedQueue::BufferedQueue(BufferConfig const& config)
    : ibuf_(validated(config).insertion_capacity, config.alignment),
      dbuf_(config.deletion_capacity, config.alignment),
      heap_(config.heap_arity) {
}

void BufferedQueue::insert(Element e) {
    if (ibuf_.empty() && heap_.empty() && !dbuf_.full()) {
        dbuf_.insert(e);
        return;
    }
    if (e.key < dbuf_.max().key) {
        if (!dbuf_.full()) {
            dbuf_.insert(e);
            return;
        }
        Element const evicted = dbuf_.pop_max();
        dbuf_.insert(e);
        e = evicted;
    }
    if (ibuf_.full()) {
        flush_insertion_buffer();
    }
    ibuf_.push(e);
}

MaybeElement BufferedQueue::delete_min() {
    if (dbuf_.empty()) {
        return std::nullopt;
    }
    Element const e = dbuf_.pop_min();
    if (dbuf_.empty()) {
        flush_insertion_buffer();
        refill_deletion_buffer();
    }
    return e;
}

void BufferedQueue::flush_insertion_buffer() {
    for (Element const& e : ibuf_.elements()) {
        heap_.push(e);
    }
    ibuf_.clear();
}

void BufferedQueue::refill_deletion_buffer() {
    while (!dbuf_.full() && !heap_.empty()) {
        dbuf_.push_back(heap_.pop_min());
    }
}

bool BufferedQueue::check_invariants() const {
    if (!dbuf_.is_sorted() || !heap_.satisfies_heap_order()) {
        return false;
    }
    if (dbuf_.empty()) {
        return ibuf_.empty() && heap_.empty();
    }
    key_type const boundary = dbuf_.max().key;
    for (Element const& e : ibuf_.elements()) {
        if (e.key < boundary) {
            return false;
        }
    }
    for (Element const& e : heap_.elements()) {
        if (e.key < boundary) {
            return false;
        }
    }
    return true;
}

}  // namespace multiqueue
