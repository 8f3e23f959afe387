#pragma once

#include "multiqueue/config.hpp"
#include "multiqueue/quality/replay.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace multiqueue::workloads {

enum class SimWorkload {
    monotonic,      // alternate delete / insert of a key from [k, k + n]
    insert_delete,  // prefill, then delete until empty
};

struct SimulatorParams {
    std::size_t num_queues = 256;
    std::size_t candidates = 2;
    SimWorkload workload = SimWorkload::monotonic;
    std::uint64_t prefill = 1 << 20;
    std::uint64_t iterations = 1'000'000;  // measured after warm-up
    std::uint64_t warmup = 100'000;
    std::size_t window = 1 << 16;          // deletions per window mean
    bool drain = false;                    // delete everything left at the end
    std::uint64_t seed = 1;
    Stickiness stickiness = Stickiness::none;
    std::size_t stickiness_period = 1;
};

struct SimulationResult {
    // Every deletion in order (warm-up, measured, drain); timestamp is the
    // operation index.
    std::vector<quality::DeletionRecord> deletions;
    std::size_t measured_begin = 0;
    std::size_t measured_end = 0;
    std::vector<double> window_means;  // rank error over consecutive measured windows
    double seconds = 0.0;

    [[nodiscard]] std::vector<std::uint64_t> measured_rank_errors() const;
    [[nodiscard]] std::vector<std::uint64_t> measured_delays() const;
    [[nodiscard]] double measured_mean_rank_error() const;
    [[nodiscard]] double final_window_mean() const;
};

// Runs the MultiQueue on a single thread with `num_queues` queues and
// measures each deletion's rank error and delay exactly against an ordered
// shadow of the queue contents.
SimulationResult run_sequential_simulator(SimulatorParams const& params);

// Empirical P(R >= i) for i = 0..max.
std::vector<double> empirical_tail(std::vector<std::uint64_t> const& values);

// Kolmogorov-Smirnov distance between two empirical distributions.
double ks_distance(std::vector<std::uint64_t> a, std::vector<std::uint64_t> b);

}  // namespace multiqueue::workloads
