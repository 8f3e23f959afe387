#include "multiqueue/multiqueue.hpp"

#include <algorithm>
#include <cmath>
#include <new>
#include <numeric>
#include <string>

namespace multiqueue {

OperationStats& OperationStats::operator+=(OperationStats const& other) noexcept {
    inserts += other.inserts;
    deletions += other.deletions;
    failed_deletions += other.failed_deletions;
    lock_attempts += other.lock_attempts;
    lock_failures += other.lock_failures;
    stick_refreshes += other.stick_refreshes;
    stick_aborts += other.stick_aborts;
    scans += other.scans;
    stale_wins += other.stale_wins;
    return *this;
}

namespace {

Config const& validated(Config const& config) {
    config.validate();
    return config;
}

}  // namespace

MultiQueue::MultiQueue(Config const& config)
    : config_(validated(config)),
      num_queues_(config.num_queues()),
      stride_(round_up(sizeof(InternalQueue), std::max(config.cache_line_size, alignof(InternalQueue)))),
      storage_(nullptr, StorageDeleter{std::max(config.cache_line_size, alignof(InternalQueue))}),
      permutation_(config.stickiness == Stickiness::swap ? num_queues_ : 0),
      claimed_(std::make_unique<std::atomic<bool>[]>(config.num_threads)) {
    std::size_t const alignment = storage_.get_deleter().alignment;
    storage_.reset(static_cast<std::byte*>(::operator new(stride_ * num_queues_, std::align_val_t{alignment})));
    BufferConfig const buffers{config_.insertion_buffer_size, config_.deletion_buffer_size, config_.heap_arity,
                               std::max(config_.cache_line_size, alignof(Element))};
    std::size_t constructed = 0;
    try {
        for (; constructed < num_queues_; ++constructed) {
            auto* q = new (storage_.get() + constructed * stride_) InternalQueue(buffers);
            if (config_.reserve_per_queue > 0) {
                q->queue.reserve(config_.reserve_per_queue);
            }
        }
    } catch (...) {
        for (std::size_t i = 0; i < constructed; ++i) {
            queue(i).~InternalQueue();
        }
        throw;
    }
    for (std::size_t i = 0; i < config_.num_threads; ++i) {
        claimed_[i].store(false, std::memory_order_relaxed);
    }
}

MultiQueue::~MultiQueue() {
    for (std::size_t i = 0; i < num_queues_; ++i) {
        queue(i).~InternalQueue();
    }
}

MultiQueue::Handle MultiQueue::get_handle(std::size_t thread_id) {
    if (thread_id >= config_.num_threads) {
        throw HandleError("thread id " + std::to_string(thread_id) + " out of range (p = " +
                          std::to_string(config_.num_threads) + ")");
    }
    if (claimed_[thread_id].exchange(true, std::memory_order_acq_rel)) {
        throw HandleError("handle for thread id " + std::to_string(thread_id) + " is already claimed");
    }
    return Handle(*this, thread_id);
}

void MultiQueue::release_handle(std::size_t thread_id, OperationStats const& stats) noexcept {
    {
        std::scoped_lock lock(stats_mutex_);
        released_stats_ += stats;
    }
    claimed_[thread_id].store(false, std::memory_order_release);
}

OperationStats MultiQueue::stats() const {
    std::scoped_lock lock(stats_mutex_);
    return released_stats_;
}

std::size_t MultiQueue::unsafe_size() const {
    std::size_t total = 0;
    for (std::size_t i = 0; i < num_queues_; ++i) {
        total += queue(i).queue.size();
    }
    return total;
}

void MultiQueue::unsafe_insert_into(std::size_t index, Element e) {
    if (e.key == empty_key) {
        throw std::invalid_argument("the empty key cannot be inserted");
    }
    InternalQueue& q = queue(index);
    q.queue.insert(e);
    q.top.store(q.queue.top_key(), std::memory_order_release);
}

std::vector<PermutationArray::cell_type> MultiQueue::permutation_snapshot() const {
    return permutation_.snapshot();
}

MultiQueue::Handle::Handle(MultiQueue& mq, std::size_t thread_id)
    : mq_(&mq),
      thread_id_(thread_id),
      rng_(derive_seed(mq.config_.seed, thread_id)),
      candidates_(mq.config_.candidates),
      stick_set_(mq.config_.stickiness == Stickiness::simple ? mq.config_.candidates : 0) {
}

MultiQueue::Handle::Handle(Handle&& other) noexcept
    : mq_(std::exchange(other.mq_, nullptr)),
      thread_id_(other.thread_id_),
      rng_(other.rng_),
      candidates_(std::move(other.candidates_)),
      shuffle_pool_(std::move(other.shuffle_pool_)),
      stick_set_(std::move(other.stick_set_)),
      stick_counter_(other.stick_counter_),
      stats_(other.stats_) {
}

MultiQueue::Handle::~Handle() {
    if (mq_ != nullptr) {
        mq_->release_handle(thread_id_, stats_);
    }
}

void MultiQueue::Handle::draw_distinct(std::span<std::size_t> out) {
    std::size_t const m = mq_->num_queues_;
    if (out.size() * 2 <= m) {
        for (std::size_t k = 0; k < out.size(); ++k) {
            std::size_t x = 0;
            do {
                x = static_cast<std::size_t>(uniform_below(rng_, m));
            } while (std::find(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k), x) !=
                     out.begin() + static_cast<std::ptrdiff_t>(k));
            out[k] = x;
        }
        return;
    }
    // Dense case: partial Fisher-Yates over a persistent pool. The pool stays
    // a permutation, so its prefix after shuffling is a uniform sample.
    if (shuffle_pool_.size() != m) {
        shuffle_pool_.resize(m);
        std::iota(shuffle_pool_.begin(), shuffle_pool_.end(), std::size_t{0});
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
        std::size_t const j = k + static_cast<std::size_t>(uniform_below(rng_, m - k));
        std::swap(shuffle_pool_[k], shuffle_pool_[j]);
        out[k] = shuffle_pool_[k];
    }
}

std::size_t MultiQueue::Handle::stuck_queue(std::size_t i) const noexcept {
    if (mq_->config_.stickiness == Stickiness::swap) {
        // Only this thread invalidates its own slots, so the load is never -1.
        return static_cast<std::size_t>(mq_->permutation_.load(permutation_slot_base() + i));
    }
    return stick_set_[i];
}

std::vector<std::size_t> MultiQueue::Handle::stick_set() const {
    std::vector<std::size_t> result;
    if (mq_->config_.stickiness != Stickiness::none) {
        for (std::size_t i = 0; i < mq_->config_.candidates; ++i) {
            result.push_back(stuck_queue(i));
        }
    }
    return result;
}

void MultiQueue::Handle::refresh_stick_set() {
    Config const& cfg = mq_->config_;
    if (cfg.stickiness == Stickiness::none) {
        return;
    }
    if (cfg.stickiness == Stickiness::simple) {
        draw_distinct(stick_set_);
    } else {
        std::size_t const base = permutation_slot_base();
        for (std::size_t i = 0; i < cfg.candidates; ++i) {
            mq_->permutation_.swap_slot_random(base + i, rng_);
        }
    }
    stick_counter_ = cfg.stickiness_period;
    ++stats_.stick_refreshes;
}

void MultiQueue::Handle::insert(Element e) {
    if (e.key == empty_key) {
        throw std::invalid_argument("the empty key cannot be inserted");
    }
    Config const& cfg = mq_->config_;
    bool const sticky = cfg.stickiness != Stickiness::none;
    if (sticky && stick_counter_ == 0) {
        refresh_stick_set();
    }
    while (true) {
        std::size_t const index = sticky ? stuck_queue(static_cast<std::size_t>(uniform_below(rng_, cfg.candidates)))
                                         : static_cast<std::size_t>(uniform_below(rng_, mq_->num_queues_));
        InternalQueue& q = mq_->queue(index);
        ++stats_.lock_attempts;
        if (q.try_lock()) {
            q.queue.insert(e);
            q.unlock();
            ++stats_.inserts;
            if (sticky) {
                --stick_counter_;
            }
            return;
        }
        ++stats_.lock_failures;
        if (sticky) {
            ++stats_.stick_aborts;
            refresh_stick_set();
        }
    }
}

MaybeElement MultiQueue::Handle::delete_locked(InternalQueue& q, key_type expected_top) {
    if (q.queue.top_key() != expected_top) {
        ++stats_.stale_wins;
    }
    MaybeElement const e = q.queue.delete_min();
    q.unlock();
    if (e) {
        ++stats_.deletions;
    } else {
        ++stats_.failed_deletions;
    }
    return e;
}

MaybeElement MultiQueue::Handle::try_delete_unsticky() {
    std::size_t const d = candidates_.size();
    while (true) {
        draw_distinct(candidates_);
        std::size_t best = candidates_[0];
        key_type best_key = mq_->queue(best).top_key();
        for (std::size_t k = 1; k < d; ++k) {
            key_type const key = mq_->queue(candidates_[k]).top_key();
            if (key < best_key) {
                best = candidates_[k];
                best_key = key;
            }
        }
        if (best_key == empty_key) {
            ++stats_.failed_deletions;
            return std::nullopt;
        }
        InternalQueue& q = mq_->queue(best);
        ++stats_.lock_attempts;
        if (q.try_lock()) {
            return delete_locked(q, best_key);
        }
        ++stats_.lock_failures;
    }
}

MaybeElement MultiQueue::Handle::try_delete_sticky() {
    std::size_t const d = mq_->config_.candidates;
    if (stick_counter_ == 0) {
        refresh_stick_set();
    }
    while (true) {
        std::size_t best = stuck_queue(0);
        key_type best_key = mq_->queue(best).top_key();
        for (std::size_t k = 1; k < d; ++k) {
            std::size_t const index = stuck_queue(k);
            key_type const key = mq_->queue(index).top_key();
            if (key < best_key) {
                best = index;
                best_key = key;
            }
        }
        if (best_key == empty_key) {
            --stick_counter_;
            ++stats_.failed_deletions;
            return std::nullopt;
        }
        InternalQueue& q = mq_->queue(best);
        ++stats_.lock_attempts;
        if (q.try_lock()) {
            --stick_counter_;
            return delete_locked(q, best_key);
        }
        ++stats_.lock_failures;
        ++stats_.stick_aborts;
        refresh_stick_set();
    }
}

MaybeElement MultiQueue::Handle::try_delete() {
    return mq_->config_.stickiness == Stickiness::none ? try_delete_unsticky() : try_delete_sticky();
}

MaybeElement MultiQueue::Handle::try_delete_with_scan() {
    bool const sticky = mq_->config_.stickiness != Stickiness::none;
    for (std::size_t attempt = 0; attempt <= mq_->config_.scan_retries; ++attempt) {
        if (MaybeElement e = try_delete()) {
            return e;
        }
        // A sticky retry would only look at the same queues again.
        if (sticky) {
            refresh_stick_set();
        }
    }
    ++stats_.scans;
    for (std::size_t i = 0; i < mq_->num_queues_; ++i) {
        InternalQueue& q = mq_->queue(i);
        if (q.top_key() == empty_key) {
            continue;
        }
        ++stats_.lock_attempts;
        if (!q.try_lock()) {
            ++stats_.lock_failures;
            continue;
        }
        MaybeElement const e = q.queue.delete_min();
        q.unlock();
        if (e) {
            ++stats_.deletions;
            return e;
        }
    }
    ++stats_.failed_deletions;
    return std::nullopt;
}

double RankErrorModel::point_probability(std::size_t i) const {
    double const s = selection_probability();
    return std::pow(1.0 - s, static_cast<double>(i)) * s;
}

double RankErrorModel::tail_probability(std::size_t i) const {
    return std::pow(1.0 - selection_probability(), static_cast<double>(i));
}

}  // namespace multiqueue
