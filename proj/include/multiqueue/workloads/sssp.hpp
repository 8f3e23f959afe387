#pragma once

#include "multiqueue/multiqueue.hpp"
#include "multiqueue/workloads/graph.hpp"

#include <cstdint>
#include <vector>

namespace multiqueue::workloads {

struct SsspResult {
    std::vector<distance_type> distances;
    std::uint64_t processed = 0;  // deleted queue elements
    std::uint64_t scanned = 0;    // deletions whose key still matched the tentative distance
    std::uint64_t relaxations = 0;  // successful distance improvements
    double seconds = 0.0;
    OperationStats stats;
};

// Label-correcting parallel SSSP with one worker per handle of `mq`. Elements
// are (tentative distance, node); stale elements are discarded on deletion.
SsspResult run_sssp(Graph const& graph, node_id source, MultiQueue& mq);

}  // namespace multiqueue::workloads
