#include "multiqueue/quality/replay.hpp"

#include "multiqueue/quality/replay_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>

namespace multiqueue::quality {

namespace {

std::string at_record(std::size_t index) {
    return "record " + std::to_string(index) + ": ";
}

// Shared validation of value uniqueness among alive elements.
class AliveValues {
   public:
    void insert(std::size_t index, OpRecord const& r) {
        if (r.key == empty_key) {
            throw ReplayError(at_record(index) + "insert uses the reserved empty key");
        }
        if (!alive_.emplace(r.value, r.key).second) {
            throw ReplayError(at_record(index) + "value " + std::to_string(r.value) + " inserted while still alive");
        }
    }

    void erase(std::size_t index, OpRecord const& r) {
        auto const it = alive_.find(r.value);
        if (it == alive_.end() || it->second != r.key) {
            throw ReplayError(at_record(index) + "deletes (key " + std::to_string(r.key) + ", value " +
                              std::to_string(r.value) + ") which is not in the queue");
        }
        alive_.erase(it);
    }

   private:
    std::unordered_map<value_type, key_type> alive_;
};

}  // namespace

OpLog merge_logs(std::span<OpLog const> logs) {
    struct Tagged {
        std::uint64_t timestamp;
        std::uint16_t thread_id;
        std::size_t log;
        std::size_t position;
    };
    std::vector<Tagged> order;
    std::size_t total = 0;
    for (OpLog const& log : logs) {
        total += log.size();
    }
    order.reserve(total);
    for (std::size_t l = 0; l < logs.size(); ++l) {
        OpLog const& log = logs[l];
        for (std::size_t i = 0; i < log.size(); ++i) {
            if (i > 0 && log[i].timestamp < log[i - 1].timestamp) {
                throw ReplayError("log " + std::to_string(l) + " is not sorted by timestamp at position " +
                                  std::to_string(i));
            }
            order.push_back({log[i].timestamp, log[i].thread_id, l, i});
        }
    }
    std::sort(order.begin(), order.end(), [](Tagged const& a, Tagged const& b) {
        return std::tie(a.timestamp, a.thread_id, a.log, a.position) <
               std::tie(b.timestamp, b.thread_id, b.log, b.position);
    });
    OpLog merged;
    merged.reserve(total);
    for (Tagged const& t : order) {
        merged.push_back(logs[t.log][t.position]);
    }
    return merged;
}

QualityReport replay(std::span<OpRecord const> sequence, std::size_t fanout) {
    QualityReport report;
    ReplayTree tree(fanout);
    AliveValues alive;
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        OpRecord const& r = sequence[i];
        switch (r.kind) {
            case OpKind::insert:
                alive.insert(i, r);
                tree.insert({r.key, r.value});
                break;
            case OpKind::delete_success: {
                alive.erase(i, r);
                auto const result = tree.erase({r.key, r.value});
                report.deletions.push_back({r.timestamp, r.key, r.value, result.rank_error, result.delay, false});
                break;
            }
            case OpKind::delete_failed:
                report.deletions.push_back({r.timestamp, 0, 0, tree.fail_deletion(), 0, true});
                break;
            default:
                throw ReplayError(at_record(i) + "unknown operation kind");
        }
    }
    return report;
}

QualityReport replay_naive(std::span<OpRecord const> sequence) {
    struct Alive {
        Element element;
        std::uint64_t delay;
    };
    auto const less = [](Alive const& a, Element const& b) {
        return a.element.key < b.key || (a.element.key == b.key && a.element.value < b.value);
    };
    QualityReport report;
    std::vector<Alive> alive_sorted;
    AliveValues alive;
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        OpRecord const& r = sequence[i];
        Element const e{r.key, r.value};
        switch (r.kind) {
            case OpKind::insert: {
                alive.insert(i, r);
                auto const it = std::lower_bound(alive_sorted.begin(), alive_sorted.end(), e, less);
                alive_sorted.insert(it, Alive{e, 0});
                break;
            }
            case OpKind::delete_success: {
                alive.erase(i, r);
                std::uint64_t rank = 0;
                for (Alive const& a : alive_sorted) {
                    if (a.element.key < e.key) {
                        ++rank;
                    }
                }
                auto const it = std::find_if(alive_sorted.begin(), alive_sorted.end(),
                                             [&](Alive const& a) { return a.element == e; });
                std::uint64_t const delay = it->delay;
                alive_sorted.erase(it);
                for (Alive& a : alive_sorted) {
                    if (a.element.key < e.key) {
                        ++a.delay;
                    }
                }
                report.deletions.push_back({r.timestamp, r.key, r.value, rank, delay, false});
                break;
            }
            case OpKind::delete_failed:
                for (Alive& a : alive_sorted) {
                    ++a.delay;
                }
                report.deletions.push_back({r.timestamp, 0, 0, alive_sorted.size(), 0, true});
                break;
            default:
                throw ReplayError(at_record(i) + "unknown operation kind");
        }
    }
    return report;
}

QuantileSummary summarize(std::vector<std::uint64_t> values) {
    QuantileSummary s;
    if (values.empty()) {
        return s;
    }
    std::sort(values.begin(), values.end());
    auto const n = values.size();
    auto const nearest_rank = [&](double q) {
        auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
        rank = std::clamp<std::size_t>(rank, 1, n);
        return values[rank - 1];
    };
    long double sum = 0;
    for (auto v : values) {
        sum += static_cast<long double>(v);
    }
    s.mean = static_cast<double>(sum / static_cast<long double>(n));
    s.q25 = nearest_rank(0.25);
    s.q50 = nearest_rank(0.5);
    s.q75 = nearest_rank(0.75);
    s.q100 = values.back();
    return s;
}

ReportSummary summarize(QualityReport const& report) {
    ReportSummary s;
    std::vector<std::uint64_t> ranks;
    std::vector<std::uint64_t> delays;
    ranks.reserve(report.deletions.size());
    delays.reserve(report.deletions.size());
    for (DeletionRecord const& d : report.deletions) {
        ++s.deletions;
        s.failed_deletions += d.failed ? 1 : 0;
        s.rank_error_sum += d.rank_error;
        s.delay_sum += d.delay;
        ranks.push_back(d.rank_error);
        if (!d.failed) {
            delays.push_back(d.delay);
        }
    }
    s.rank_error = summarize(std::move(ranks));
    s.delay = summarize(std::move(delays));
    return s;
}

std::vector<Bin> bin_timeseries(QualityReport const& report, std::size_t bin_size) {
    if (bin_size == 0) {
        throw std::invalid_argument("bin size must be at least 1");
    }
    std::vector<Bin> bins;
    auto const& dels = report.deletions;
    for (std::size_t first = 0; first < dels.size(); first += bin_size) {
        std::size_t const last = std::min(dels.size(), first + bin_size);
        std::vector<std::uint64_t> ranks;
        std::vector<std::uint64_t> delays;
        for (std::size_t i = first; i < last; ++i) {
            ranks.push_back(dels[i].rank_error);
            if (!dels[i].failed) {
                delays.push_back(dels[i].delay);
            }
        }
        bins.push_back({first, last - first, summarize(std::move(ranks)), summarize(std::move(delays))});
    }
    return bins;
}

}  // namespace multiqueue::quality
