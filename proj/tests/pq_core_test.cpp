#include "multiqueue/buffered_queue.hpp"
#include "multiqueue/kary_heap.hpp"
#include "multiqueue/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>
#include <vector>

namespace multiqueue {
namespace {

std::vector<key_type> random_keys(std::size_t n, std::uint64_t seed, std::uint64_t range = 1000) {
    SplitMix64 rng(seed);
    std::vector<key_type> keys(n);
    for (auto& k : keys) {
        k = uniform_below(rng, range);
    }
    return keys;
}

TEST(KaryHeapTest, RejectsArityBelowTwo) {
    EXPECT_THROW(KaryHeap(1), std::invalid_argument);
    EXPECT_NO_THROW(KaryHeap(2));
}

TEST(KaryHeapTest, PopsInSortedOrderForSeveralArities) {
    for (std::size_t arity : {2, 3, 4, 8, 16}) {
        KaryHeap heap(arity);
        auto keys = random_keys(2000, arity);
        for (std::size_t i = 0; i < keys.size(); ++i) {
            heap.push({keys[i], i});
            ASSERT_TRUE(heap.satisfies_heap_order());
        }
        std::sort(keys.begin(), keys.end());
        for (key_type expected : keys) {
            ASSERT_EQ(heap.top().key, expected);
            ASSERT_EQ(heap.pop_min().key, expected);
        }
        EXPECT_TRUE(heap.empty());
    }
}

TEST(KaryHeapTest, InterleavedOperationsMatchMultiset) {
    KaryHeap heap(4);
    std::multiset<key_type> oracle;
    SplitMix64 rng(7);
    for (int step = 0; step < 20000; ++step) {
        if (oracle.empty() || uniform_below(rng, 3) != 0) {
            key_type const k = uniform_below(rng, 500);
            heap.push({k, static_cast<value_type>(step)});
            oracle.insert(k);
        } else {
            ASSERT_EQ(heap.pop_min().key, *oracle.begin());
            oracle.erase(oracle.begin());
        }
        ASSERT_EQ(heap.size(), oracle.size());
    }
}

TEST(DeletionBufferTest, InsertKeepsOrderAndEqualKeysGoLast) {
    DeletionBuffer buf(8);
    buf.insert({5, 0});
    buf.insert({1, 1});
    buf.insert({9, 2});
    buf.insert({5, 3});
    buf.insert({0, 4});
    buf.insert({5, 5});
    ASSERT_TRUE(buf.is_sorted());
    std::vector<value_type> values;
    for (std::size_t i = 0; i < buf.size(); ++i) {
        values.push_back(buf[i].value);
    }
    EXPECT_EQ(values, (std::vector<value_type>{4, 1, 0, 3, 5, 2}));
    EXPECT_EQ(buf.pop_max().value, 2u);
    EXPECT_EQ(buf.pop_min().value, 4u);
    EXPECT_EQ(buf.min().key, 1u);
    EXPECT_EQ(buf.max().key, 5u);
}

TEST(DeletionBufferTest, WrapsAroundTheRing) {
    DeletionBuffer buf(4);
    std::multiset<key_type> oracle;
    SplitMix64 rng(3);
    for (int step = 0; step < 5000; ++step) {
        bool const can_insert = !buf.full();
        if (buf.empty() || (can_insert && uniform_below(rng, 2) == 0)) {
            key_type const k = uniform_below(rng, 50);
            buf.insert({k, 0});
            oracle.insert(k);
        } else if (uniform_below(rng, 2) == 0) {
            ASSERT_EQ(buf.pop_min().key, *oracle.begin());
            oracle.erase(oracle.begin());
        } else {
            ASSERT_EQ(buf.pop_max().key, *oracle.rbegin());
            oracle.erase(std::prev(oracle.end()));
        }
        ASSERT_TRUE(buf.is_sorted());
        ASSERT_EQ(buf.size(), oracle.size());
    }
}

TEST(BufferedQueueTest, EmptyQueueReportsEmptyKey) {
    BufferedQueue q;
    EXPECT_TRUE(q.empty());
    EXPECT_EQ(q.top_key(), empty_key);
    EXPECT_FALSE(q.delete_min().has_value());
}

TEST(BufferedQueueTest, SmallKeyGoesToDeletionBufferAndEvictsMaximum) {
    BufferedQueue q(BufferConfig{4, 2, 2, build_cache_line_size});
    q.insert({10, 0});
    q.insert({20, 1});
    EXPECT_EQ(q.deletion_buffer().size(), 2u);
    q.insert({5, 2});
    // 20 displaced from the full deletion buffer into the insertion buffer.
    EXPECT_EQ(q.deletion_buffer().min().key, 5u);
    EXPECT_EQ(q.deletion_buffer().max().key, 10u);
    ASSERT_EQ(q.insertion_buffer().size(), 1u);
    EXPECT_EQ(q.insertion_buffer().elements()[0].key, 20u);
    EXPECT_TRUE(q.check_invariants());
}

TEST(BufferedQueueTest, FullInsertionBufferIsFlushedIntoHeap) {
    BufferedQueue q(BufferConfig{2, 1, 2, build_cache_line_size});
    q.insert({1, 0});
    q.insert({7, 1});
    q.insert({8, 2});
    EXPECT_EQ(q.insertion_buffer().size(), 2u);
    q.insert({9, 3});
    EXPECT_EQ(q.heap().size(), 2u);
    EXPECT_EQ(q.insertion_buffer().size(), 1u);
    EXPECT_EQ(q.size(), 4u);
    EXPECT_TRUE(q.check_invariants());
}

TEST(BufferedQueueTest, DeleteRefillsFromInsertionBufferAndHeap) {
    BufferedQueue q(BufferConfig{3, 2, 2, build_cache_line_size});
    for (key_type k : {4, 8, 6, 2, 9, 1, 7, 3, 5}) {
        q.insert({k, k});
        ASSERT_TRUE(q.check_invariants());
    }
    for (key_type expected = 1; expected <= 9; ++expected) {
        ASSERT_EQ(q.top_key(), expected);
        auto const e = q.delete_min();
        ASSERT_TRUE(e.has_value());
        EXPECT_EQ(e->key, expected);
        ASSERT_TRUE(q.check_invariants());
    }
    EXPECT_FALSE(q.delete_min().has_value());
}

class BufferedQueueOracleTest : public ::testing::TestWithParam<BufferConfig> {};

TEST_P(BufferedQueueOracleTest, BehavesLikeExactPriorityQueue) {
    BufferedQueue q(GetParam());
    std::multimap<key_type, value_type> oracle;
    SplitMix64 rng(GetParam().insertion_capacity * 31 + GetParam().deletion_capacity);
    for (value_type step = 0; step < 30000; ++step) {
        if (oracle.empty() || uniform_below(rng, 5) < 3) {
            key_type const k = uniform_below(rng, 1000);
            q.insert({k, step});
            oracle.emplace(k, step);
        } else {
            auto const e = q.delete_min();
            ASSERT_TRUE(e.has_value());
            ASSERT_EQ(e->key, oracle.begin()->first);
            auto range = oracle.equal_range(e->key);
            auto it = std::find_if(range.first, range.second, [&](auto const& kv) { return kv.second == e->value; });
            ASSERT_NE(it, range.second) << "returned element was never inserted";
            oracle.erase(it);
        }
        ASSERT_EQ(q.size(), oracle.size());
        ASSERT_EQ(q.top_key(), oracle.empty() ? empty_key : oracle.begin()->first);
    }
    EXPECT_TRUE(q.check_invariants());
}

INSTANTIATE_TEST_SUITE_P(Capacities, BufferedQueueOracleTest,
                         ::testing::Values(BufferConfig{1, 1, 2, build_cache_line_size},
                                           BufferConfig{16, 16, 8, build_cache_line_size},
                                           BufferConfig{3, 7, 4, build_cache_line_size},
                                           BufferConfig{64, 2, 16, 128}));

}  // namespace
}  // namespace multiqueue
