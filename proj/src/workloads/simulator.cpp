#include "multiqueue/workloads/simulator.hpp"

#include "multiqueue/multiqueue.hpp"
#include "multiqueue/quality/replay_tree.hpp"
#include "multiqueue/workloads/stress.hpp"

#include <algorithm>
#include <cmath>

namespace multiqueue::workloads {

namespace {

class Simulation {
   public:
    Simulation(MultiQueue& mq, SimulationResult& result)
        : handle_(mq.get_handle(0)), result_(result) {
    }

    void insert(Element e) {
        tree_.insert(e);
        handle_.insert(e);
        ++clock_;
    }

    // Plain deletion, recording failures, until one succeeds.
    Element delete_retrying() {
        while (true) {
            if (MaybeElement e = handle_.try_delete()) {
                record(*e);
                return *e;
            }
            result_.deletions.push_back({clock_++, 0, 0, tree_.fail_deletion(), 0, true});
        }
    }

    MaybeElement delete_scanning() {
        MaybeElement e = handle_.try_delete_with_scan();
        if (e) {
            record(*e);
        }
        return e;
    }

   private:
    void record(Element e) {
        auto const r = tree_.erase(e);
        result_.deletions.push_back({clock_++, e.key, e.value, r.rank_error, r.delay, false});
    }

    MultiQueue::Handle handle_;
    SimulationResult& result_;
    quality::ReplayTree tree_{32};
    std::uint64_t clock_ = 0;
};

}  // namespace

SimulationResult run_sequential_simulator(SimulatorParams const& params) {
    Config config;
    config.num_threads = 1;
    config.queue_factor = params.num_queues;
    config.candidates = params.candidates;
    config.stickiness = params.stickiness;
    config.stickiness_period = params.stickiness_period;
    config.seed = params.seed;
    config.validate();

    MultiQueue mq(config);
    SimulationResult result;
    SplitMix64 rng(derive_seed(params.seed ^ 0x73696d756c617465ULL, 0));
    std::uint64_t const n = params.prefill;
    std::uint64_t const start = now_ns();
    {
        Simulation sim(mq, result);
        for (std::uint64_t key = 1; key <= n; ++key) {
            sim.insert({key, key - 1});
        }
        std::uint64_t next_value = n;
        if (params.workload == SimWorkload::monotonic) {
            std::uint64_t const total = params.warmup + params.iterations;
            for (std::uint64_t i = 0; i < total; ++i) {
                if (i == params.warmup) {
                    result.measured_begin = result.deletions.size();
                }
                Element const e = sim.delete_retrying();
                sim.insert({uniform_in(rng, e.key, e.key + n), next_value++});
            }
            if (total == params.warmup) {
                result.measured_begin = result.deletions.size();
            }
            result.measured_end = result.deletions.size();
            if (params.drain) {
                while (sim.delete_scanning()) {
                }
            }
        } else {
            // Deletions of the drain are the measured ones.
            result.measured_begin = 0;
            while (sim.delete_scanning()) {
            }
            result.measured_end = result.deletions.size();
        }
    }
    result.seconds = static_cast<double>(now_ns() - start) * 1e-9;

    std::size_t const w = std::max<std::size_t>(params.window, 1);
    for (std::size_t first = result.measured_begin; first < result.measured_end; first += w) {
        std::size_t const last = std::min(result.measured_end, first + w);
        long double sum = 0;
        for (std::size_t i = first; i < last; ++i) {
            sum += static_cast<long double>(result.deletions[i].rank_error);
        }
        result.window_means.push_back(static_cast<double>(sum / static_cast<long double>(last - first)));
    }
    return result;
}

std::vector<std::uint64_t> SimulationResult::measured_rank_errors() const {
    std::vector<std::uint64_t> out;
    out.reserve(measured_end - measured_begin);
    for (std::size_t i = measured_begin; i < measured_end; ++i) {
        out.push_back(deletions[i].rank_error);
    }
    return out;
}

std::vector<std::uint64_t> SimulationResult::measured_delays() const {
    std::vector<std::uint64_t> out;
    out.reserve(measured_end - measured_begin);
    for (std::size_t i = measured_begin; i < measured_end; ++i) {
        out.push_back(deletions[i].delay);
    }
    return out;
}

double SimulationResult::measured_mean_rank_error() const {
    if (measured_end == measured_begin) {
        return 0.0;
    }
    long double sum = 0;
    for (std::size_t i = measured_begin; i < measured_end; ++i) {
        sum += static_cast<long double>(deletions[i].rank_error);
    }
    return static_cast<double>(sum / static_cast<long double>(measured_end - measured_begin));
}

double SimulationResult::final_window_mean() const {
    return window_means.empty() ? 0.0 : window_means.back();
}

std::vector<double> empirical_tail(std::vector<std::uint64_t> const& values) {
    if (values.empty()) {
        return {};
    }
    std::uint64_t const max = *std::max_element(values.begin(), values.end());
    std::vector<std::uint64_t> counts(max + 2, 0);
    for (auto v : values) {
        ++counts[v];
    }
    std::vector<double> tail(max + 1);
    std::uint64_t at_least = 0;
    for (std::size_t i = max + 1; i-- > 0;) {
        at_least += counts[i];
        tail[i] = static_cast<double>(at_least) / static_cast<double>(values.size());
    }
    return tail;
}

double ks_distance(std::vector<std::uint64_t> a, std::vector<std::uint64_t> b) {
    if (a.empty() || b.empty()) {
        return a.empty() && b.empty() ? 0.0 : 1.0;
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double const na = static_cast<double>(a.size());
    double const nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        std::uint64_t const x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) {
            ++i;
        }
        while (j < b.size() && b[j] == x) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

}  // namespace multiqueue::workloads
