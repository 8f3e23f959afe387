#pragma once

#include "multiqueue/element.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace multiqueue::quality {

enum class OpKind : std::uint8_t { insert = 0, delete_success = 1, delete_failed = 2 };

// One logged queue operation. Insert timestamps are taken right before the
// operation, deletion timestamps right after it.
struct OpRecord {
    OpKind kind = OpKind::insert;
    std::uint16_t thread_id = 0;
    key_type key = 0;
    value_type value = 0;
    std::uint64_t timestamp = 0;

    friend bool operator==(OpRecord const&, OpRecord const&) = default;
};

using OpLog = std::vector<OpRecord>;

struct DeletionRecord {
    std::uint64_t timestamp = 0;
    key_type key = 0;
    value_type value = 0;
    std::uint64_t rank_error = 0;
    std::uint64_t delay = 0;
    bool failed = false;

    friend bool operator==(DeletionRecord const&, DeletionRecord const&) = default;
};

struct QualityReport {
    std::vector<DeletionRecord> deletions;

    friend bool operator==(QualityReport const&, QualityReport const&) = default;
};

struct QuantileSummary {
    double mean = 0.0;
    std::uint64_t q25 = 0;
    std::uint64_t q50 = 0;
    std::uint64_t q75 = 0;
    std::uint64_t q100 = 0;
};

struct ReportSummary {
    std::uint64_t deletions = 0;
    std::uint64_t failed_deletions = 0;
    std::uint64_t rank_error_sum = 0;
    std::uint64_t delay_sum = 0;
    QuantileSummary rank_error;
    QuantileSummary delay;
};

struct Bin {
    std::uint64_t first_deletion = 0;
    std::uint64_t count = 0;
    QuantileSummary rank_error;
    QuantileSummary delay;
};

// Merges per-thread logs into one sequence ordered by timestamp; ties are
// broken by (thread_id, position in its log). Throws ReplayError if a log is
// not timestamp-sorted.
OpLog merge_logs(std::span<OpLog const> logs);

// Replays a merged log through the augmented tree (fanout configurable).
// Throws ReplayError naming the record index for deletions of elements that
// are not alive and for inserts of values that are already alive.
QualityReport replay(std::span<OpRecord const> sequence, std::size_t fanout = 16);

// Same contract with a flat sorted array; O(n) per operation. Test oracle.
QualityReport replay_naive(std::span<OpRecord const> sequence);

// Nearest-rank quantiles (q-th quantile is the ceil(q * n)-th smallest).
QuantileSummary summarize(std::vector<std::uint64_t> values);

// Delay statistics cover successful deletions only; failed deletions count
// toward the rank error with the queue size.
ReportSummary summarize(QualityReport const& report);

// Consecutive groups of `bin_size` deletions; the last bin may be shorter.
// Delays are summarized as in summarize(QualityReport).
std::vector<Bin> bin_timeseries(QualityReport const& report, std::size_t bin_size);

}  // namespace multiqueue::quality
