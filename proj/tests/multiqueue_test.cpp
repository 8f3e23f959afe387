#include "multiqueue/multiqueue.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <thread>
#include <vector>

namespace multiqueue {
namespace {

Config make_config(std::size_t p, std::size_t c, std::size_t d, Stickiness stickiness = Stickiness::none,
                   std::size_t period = 1) {
    Config cfg;
    cfg.num_threads = p;
    cfg.queue_factor = c;
    cfg.candidates = d;
    cfg.stickiness = stickiness;
    cfg.stickiness_period = period;
    return cfg;
}

TEST(ConfigTest, RejectsInvalidCombinations) {
    EXPECT_THROW(make_config(0, 2, 2).validate(), ConfigError);
    EXPECT_THROW(make_config(1, 1, 1).validate(), ConfigError);
    EXPECT_THROW(make_config(2, 2, 5).validate(), ConfigError);
    EXPECT_THROW(make_config(4, 2, 3, Stickiness::simple, 4).validate(), ConfigError);
    EXPECT_THROW(make_config(1, 1, 1, Stickiness::swap, 4).validate(), ConfigError);
    EXPECT_THROW(make_config(2, 2, 2, Stickiness::simple, 0).validate(), ConfigError);
    EXPECT_THROW(make_config(2, 2, 0).validate(), ConfigError);
    Config bad_line = make_config(2, 2, 2);
    bad_line.cache_line_size = 96;
    EXPECT_THROW(bad_line.validate(), ConfigError);
    EXPECT_NO_THROW(make_config(1, 1, 1, Stickiness::simple, 3).validate());
    EXPECT_NO_THROW(make_config(4, 2, 2).validate());
}

TEST(ConfigTest, PresetsMatchTheNamedConfigurations) {
    struct Row {
        Preset preset;
        Stickiness stickiness;
        std::size_t period;
    };
    for (Row const& row : {Row{Preset::strict, Stickiness::none, 1}, Row{Preset::quality, Stickiness::simple, 4},
                           Row{Preset::balanced, Stickiness::swap, 256}, Row{Preset::fast, Stickiness::simple, 4096}}) {
        Config base = make_config(8, 5, 2);
        Config const cfg = apply_preset(base, row.preset);
        EXPECT_EQ(cfg.queue_factor, 2u);
        EXPECT_EQ(cfg.stickiness, row.stickiness);
        EXPECT_EQ(cfg.stickiness_period, row.period);
        EXPECT_EQ(cfg.num_threads, 8u);
        EXPECT_EQ(parse_preset(to_string(row.preset)), row.preset);
    }
    EXPECT_FALSE(parse_preset("custom").has_value());
    EXPECT_EQ(parse_stickiness("swap"), Stickiness::swap);
    EXPECT_FALSE(parse_stickiness("sticky").has_value());
}

TEST(InternalQueueTest, PaddedToCacheLines) {
    EXPECT_EQ(alignof(InternalQueue) % build_cache_line_size, 0u);
    MultiQueue mq(make_config(2, 2, 2));
    auto const a = reinterpret_cast<std::uintptr_t>(&mq.queue(0));
    auto const b = reinterpret_cast<std::uintptr_t>(&mq.queue(1));
    EXPECT_EQ(a % build_cache_line_size, 0u);
    EXPECT_GE(b - a, sizeof(InternalQueue));
}

TEST(InternalQueueTest, RuntimeCacheLineWidensStride) {
    Config cfg = make_config(2, 2, 2);
    cfg.cache_line_size = 512;
    MultiQueue mq(cfg);
    auto const a = reinterpret_cast<std::uintptr_t>(&mq.queue(0));
    auto const b = reinterpret_cast<std::uintptr_t>(&mq.queue(1));
    EXPECT_EQ(a % 512, 0u);
    EXPECT_EQ((b - a) % 512, 0u);
}

TEST(HandleTest, ClaimsAreExclusive) {
    MultiQueue mq(make_config(2, 2, 2));
    {
        auto h0 = mq.get_handle(0);
        EXPECT_THROW(mq.get_handle(0), HandleError);
        EXPECT_THROW(mq.get_handle(2), HandleError);
        auto moved = std::move(h0);
        EXPECT_THROW(mq.get_handle(0), HandleError);
    }
    EXPECT_NO_THROW(mq.get_handle(0));
}

TEST(HandleTest, StatsFoldIntoQueueOnRelease) {
    MultiQueue mq(make_config(1, 4, 2));
    {
        auto h = mq.get_handle(0);
        h.insert({1, 1});
        h.insert({2, 2});
        EXPECT_TRUE(h.try_delete().has_value());
        EXPECT_EQ(h.stats().inserts, 2u);
    }
    auto const stats = mq.stats();
    EXPECT_EQ(stats.inserts, 2u);
    EXPECT_EQ(stats.deletions, 1u);
    EXPECT_EQ(stats.lock_attempts, 3u);
}

TEST(MultiQueueTest, EmptyKeyIsRejected) {
    MultiQueue mq(make_config(1, 2, 2));
    auto h = mq.get_handle(0);
    EXPECT_THROW(h.insert({empty_key, 0}), std::invalid_argument);
}

TEST(MultiQueueTest, DeleteOnEmptyQueueFails) {
    for (Stickiness s : {Stickiness::none, Stickiness::simple, Stickiness::swap}) {
        MultiQueue mq(make_config(2, 2, 2, s, 4));
        auto h = mq.get_handle(1);
        EXPECT_FALSE(h.try_delete().has_value());
        EXPECT_FALSE(h.try_delete_with_scan().has_value());
    }
}

TEST(MultiQueueTest, TwoQueuesTwoCandidatesDeleteExactMinimum) {
    MultiQueue mq(make_config(1, 2, 2));
    auto h = mq.get_handle(0);
    SplitMix64 rng(11);
    std::multiset<key_type> alive;
    for (value_type i = 0; i < 20000; ++i) {
        if (alive.empty() || uniform_below(rng, 2) == 0) {
            key_type const k = uniform_below(rng, 100000);
            h.insert({k, i});
            alive.insert(k);
        } else {
            auto const e = h.try_delete();
            ASSERT_TRUE(e.has_value());
            ASSERT_EQ(e->key, *alive.begin());
            alive.erase(alive.begin());
        }
    }
}

TEST(MultiQueueTest, AllCandidatesCoverAllQueuesMeansExactDeletes) {
    MultiQueue mq(make_config(2, 4, 8));
    auto h = mq.get_handle(0);
    SplitMix64 rng(5);
    std::vector<key_type> keys(5000);
    for (std::size_t i = 0; i < keys.size(); ++i) {
        keys[i] = uniform_below(rng, 1u << 30);
        h.insert({keys[i], i});
    }
    std::sort(keys.begin(), keys.end());
    for (key_type expected : keys) {
        auto const e = h.try_delete();
        ASSERT_TRUE(e.has_value());
        ASSERT_EQ(e->key, expected);
    }
}

TEST(MultiQueueTest, NonEmptyCandidateWinsOverEmptyOne) {
    MultiQueue mq(make_config(1, 2, 2));
    mq.unsafe_insert_into(1, {42, 7});
    auto h = mq.get_handle(0);
    auto const e = h.try_delete();
    ASSERT_TRUE(e.has_value());
    EXPECT_EQ(e->value, 7u);
}

TEST(MultiQueueTest, ScanSkipsLockedQueues) {
    MultiQueue mq(make_config(1, 4, 2));
    mq.unsafe_insert_into(3, {5, 1});
    ASSERT_TRUE(mq.queue(3).try_lock());
    {
        auto h = mq.get_handle(0);
        EXPECT_FALSE(h.try_delete_with_scan().has_value());
        EXPECT_EQ(h.stats().scans, 1u);
    }
    mq.queue(3).unlock();
    auto h = mq.get_handle(0);
    auto const e = h.try_delete_with_scan();
    ASSERT_TRUE(e.has_value());
    EXPECT_EQ(e->key, 5u);
}

TEST(MultiQueueTest, ScanFindsElementInAnyQueue) {
    MultiQueue mq(make_config(1, 64, 2));
    mq.unsafe_insert_into(37, {9, 3});
    auto h = mq.get_handle(0);
    auto const e = h.try_delete_with_scan();
    ASSERT_TRUE(e.has_value());
    EXPECT_EQ(e->value, 3u);
    EXPECT_EQ(mq.unsafe_size(), 0u);
}

TEST(MultiQueueTest, PublishedTopTracksQueueMinimum) {
    MultiQueue mq(make_config(1, 2, 2));
    auto h = mq.get_handle(0);
    for (key_type k : {50, 20, 80, 10, 60}) {
        h.insert({k, k});
        for (std::size_t i = 0; i < mq.num_queues(); ++i) {
            ASSERT_EQ(mq.top_key(i), mq.queue(i).queue.top_key());
        }
    }
}

TEST(StickinessTest, SimpleSetPersistsForThePeriod) {
    MultiQueue mq(make_config(1, 8, 2, Stickiness::simple, 5));
    auto h = mq.get_handle(0);
    h.insert({1, 0});
    auto const set = h.stick_set();
    ASSERT_EQ(set.size(), 2u);
    EXPECT_NE(set[0], set[1]);
    EXPECT_EQ(h.stick_counter(), 4u);
    for (int i = 0; i < 4; ++i) {
        h.insert({static_cast<key_type>(i + 2), static_cast<value_type>(i + 1)});
        EXPECT_EQ(h.stick_set(), set);
    }
    EXPECT_EQ(h.stick_counter(), 0u);
    for (std::size_t i = 0; i < mq.num_queues(); ++i) {
        if (i != set[0] && i != set[1]) {
            EXPECT_EQ(mq.top_key(i), empty_key);
        }
    }
    EXPECT_EQ(h.stats().stick_refreshes, 1u);
    h.insert({100, 100});
    EXPECT_EQ(h.stats().stick_refreshes, 2u);
}

TEST(StickinessTest, PeriodOneRefreshesEveryOperation) {
    MultiQueue mq(make_config(1, 4, 2, Stickiness::simple, 1));
    auto h = mq.get_handle(0);
    for (int i = 0; i < 10; ++i) {
        h.insert({static_cast<key_type>(i + 1), static_cast<value_type>(i)});
    }
    EXPECT_EQ(h.stats().stick_refreshes, 10u);
}

TEST(StickinessTest, LockFailureAbortsTheEpoch) {
    MultiQueue mq(make_config(1, 4, 2, Stickiness::simple, 1000));
    auto h = mq.get_handle(0);
    h.refresh_stick_set();
    auto const set = h.stick_set();
    ASSERT_TRUE(mq.queue(set[0]).try_lock());
    ASSERT_TRUE(mq.queue(set[1]).try_lock());
    // Refreshes redraw until the set contains an unlocked queue.
    h.insert({3, 3});
    mq.queue(set[0]).unlock();
    mq.queue(set[1]).unlock();
    EXPECT_GE(h.stats().stick_aborts, 1u);
    EXPECT_EQ(h.stats().inserts, 1u);
}

// Frequencies of the 28 unordered pairs out of 8 queues after 10^5 refreshes.
TEST(StickinessTest, SimpleRefreshPairsAreUniform) {
    MultiQueue mq(make_config(1, 8, 2, Stickiness::simple, 1));
    auto h = mq.get_handle(0);
    constexpr std::size_t refreshes = 100000;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> counts;
    for (std::size_t i = 0; i < refreshes; ++i) {
        h.refresh_stick_set();
        auto set = h.stick_set();
        ASSERT_NE(set[0], set[1]);
        ++counts[{std::min(set[0], set[1]), std::max(set[0], set[1])}];
    }
    ASSERT_EQ(counts.size(), 28u);
    double const p = 1.0 / 28.0;
    double const expected = refreshes * p;
    double const sigma = std::sqrt(refreshes * p * (1 - p));
    double chi2 = 0;
    for (auto const& [pair, count] : counts) {
        EXPECT_LE(std::abs(static_cast<double>(count) - expected), 3 * sigma) << pair.first << "," << pair.second;
        chi2 += (count - expected) * (count - expected) / expected;
    }
    // 27 degrees of freedom, 0.1% critical value.
    EXPECT_LT(chi2, 55.48);
}

TEST(StickinessTest, SwapRefreshKeepsPermutation) {
    MultiQueue mq(make_config(1, 4, 2, Stickiness::swap, 1));
    auto h = mq.get_handle(0);
    for (int i = 0; i < 1000; ++i) {
        h.refresh_stick_set();
        auto const set = h.stick_set();
        ASSERT_EQ(set.size(), 2u);
        ASSERT_NE(set[0], set[1]);
        ASSERT_LT(set[0], 4u);
        ASSERT_LT(set[1], 4u);
        auto snapshot = mq.permutation_snapshot();
        std::sort(snapshot.begin(), snapshot.end());
        ASSERT_EQ(snapshot, (std::vector<PermutationArray::cell_type>{0, 1, 2, 3}));
    }
}

TEST(StickinessTest, SwapSetsOfThreadsAreDisjoint) {
    MultiQueue mq(make_config(4, 3, 2, Stickiness::swap, 8));
    std::vector<MultiQueue::Handle> handles;
    for (std::size_t t = 0; t < 4; ++t) {
        handles.push_back(mq.get_handle(t));
    }
    for (int round = 0; round < 200; ++round) {
        std::set<std::size_t> seen;
        for (auto& h : handles) {
            h.refresh_stick_set();
        }
        for (auto& h : handles) {
            for (std::size_t q : h.stick_set()) {
                EXPECT_TRUE(seen.insert(q).second);
            }
        }
    }
}

TEST(PermutationArrayTest, ForcedSwap) {
    PermutationArray perm(4);
    std::size_t const draws = perm.swap_slot(0, [] { return std::size_t{2}; });
    EXPECT_EQ(draws, 1u);
    EXPECT_EQ(perm.snapshot(), (std::vector<PermutationArray::cell_type>{2, 1, 0, 3}));
}

TEST(PermutationArrayTest, SelfPickIsRedrawn) {
    PermutationArray perm(4);
    std::array<std::size_t, 3> picks{1, 1, 3};
    std::size_t next = 0;
    std::size_t const draws = perm.swap_slot(1, [&] { return picks[next++]; });
    EXPECT_EQ(draws, 3u);
    EXPECT_EQ(perm.snapshot(), (std::vector<PermutationArray::cell_type>{0, 3, 2, 1}));
}

TEST(PermutationArrayTest, ConcurrentSwapsPreservePermutation) {
    constexpr std::size_t threads = 8;
    constexpr std::size_t size = 64;
    PermutationArray perm(size);
    std::vector<std::thread> workers;
    for (std::size_t t = 0; t < threads; ++t) {
        workers.emplace_back([&, t] {
            SplitMix64 rng(derive_seed(99, t));
            for (int i = 0; i < 20000; ++i) {
                perm.swap_slot_random(t * (size / threads) + uniform_below(rng, size / threads), rng);
            }
        });
    }
    for (auto& w : workers) {
        w.join();
    }
    auto snapshot = perm.snapshot();
    std::sort(snapshot.begin(), snapshot.end());
    std::vector<PermutationArray::cell_type> identity(size);
    std::iota(identity.begin(), identity.end(), 0);
    EXPECT_EQ(snapshot, identity);
}

class ConservationTest : public ::testing::TestWithParam<Preset> {};

TEST_P(ConservationTest, ConcurrentInsertDeleteLosesNothing) {
    constexpr std::size_t p = 4;
    constexpr value_type per_thread = 20000;
    Config cfg = apply_preset(make_config(p, 2, 2), GetParam());
    MultiQueue mq(cfg);
    std::vector<std::vector<value_type>> deleted(p);
    std::vector<std::thread> workers;
    for (std::size_t t = 0; t < p; ++t) {
        workers.emplace_back([&, t] {
            auto h = mq.get_handle(t);
            SplitMix64 rng(derive_seed(3, t));
            for (value_type i = 0; i < per_thread; ++i) {
                h.insert({uniform_below(rng, 1000) + 1, t * per_thread + i});
                if (uniform_below(rng, 3) == 0) {
                    if (auto e = h.try_delete()) {
                        deleted[t].push_back(e->value);
                    }
                }
            }
        });
    }
    for (auto& w : workers) {
        w.join();
    }
    auto h = mq.get_handle(0);
    std::vector<value_type> all;
    for (auto const& d : deleted) {
        all.insert(all.end(), d.begin(), d.end());
    }
    while (auto e = h.try_delete_with_scan()) {
        all.push_back(e->value);
    }
    std::sort(all.begin(), all.end());
    std::vector<value_type> expected(p * per_thread);
    std::iota(expected.begin(), expected.end(), value_type{0});
    EXPECT_EQ(all, expected);
}

INSTANTIATE_TEST_SUITE_P(Presets, ConservationTest,
                         ::testing::Values(Preset::strict, Preset::quality, Preset::balanced, Preset::fast),
                         [](auto const& info) { return std::string(to_string(info.param)); });

TEST(RankErrorModelTest, ClosedForms) {
    RankErrorModel const model{2, 128, 2};
    EXPECT_DOUBLE_EQ(model.num_queues(), 256.0);
    EXPECT_DOUBLE_EQ(model.selection_probability(), 2.0 / 256.0);
    EXPECT_DOUBLE_EQ(model.estimated_mean(), 127.0);
    EXPECT_NEAR(model.two_choice_mean(), 5.0 / 6.0 * 256 - 1 + 1.0 / 1536, 1e-12);
    EXPECT_NEAR(model.two_choice_mean(), 212.3340, 1e-4);
    EXPECT_DOUBLE_EQ(model.tail_probability(0), 1.0);
    double sum = 0;
    for (std::size_t i = 0; i < 20000; ++i) {
        sum += model.point_probability(i);
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    EXPECT_NEAR(model.tail_probability(10), std::pow(1 - 2.0 / 256, 10), 1e-15);
}

}  // namespace
}  // namespace multiqueue
