#include "multiqueue/workloads/sssp.hpp"

#include "multiqueue/termination.hpp"
#include "multiqueue/workloads/stress.hpp"

#include <atomic>
#include <memory>
#include <stdexcept>
#include <thread>

namespace multiqueue::workloads {

SsspResult run_sssp(Graph const& graph, node_id source, MultiQueue& mq) {
    if (source >= graph.num_nodes) {
        throw std::out_of_range("source node out of range");
    }
    std::size_t const p = mq.config().num_threads;
    auto tentative = std::make_unique<std::atomic<distance_type>[]>(graph.num_nodes);
    for (std::size_t v = 0; v < graph.num_nodes; ++v) {
        tentative[v].store(unreachable, std::memory_order_relaxed);
    }
    tentative[source].store(0, std::memory_order_relaxed);
    {
        auto handle = mq.get_handle(0);
        handle.insert({0, source});
    }

    struct Counters {
        std::uint64_t processed = 0;
        std::uint64_t scanned = 0;
        std::uint64_t relaxations = 0;
        OperationStats stats;
    };
    std::vector<Counters> counters(p);
    TerminationState termination(p);
    SpinBarrier start(p);
    std::uint64_t start_ns = 0;

    auto worker = [&](std::size_t t) {
        auto handle = mq.get_handle(t);
        Counters& c = counters[t];
        if (start.arrive_and_wait()) {
            start_ns = now_ns();
        }
        start.arrive_and_wait();
        termination.process_until_empty(
            [&] { return handle.try_delete_with_scan(); },
            [&](Element e) {
                ++c.processed;
                auto const u = static_cast<node_id>(e.value);
                if (e.key > tentative[u].load(std::memory_order_relaxed)) {
                    return;
                }
                ++c.scanned;
                for (Edge const& edge : graph.neighbors(u)) {
                    distance_type const nd = e.key + edge.weight;
                    auto& slot = tentative[edge.target];
                    distance_type current = slot.load(std::memory_order_relaxed);
                    while (nd < current) {
                        if (slot.compare_exchange_weak(current, nd, std::memory_order_relaxed)) {
                            ++c.relaxations;
                            handle.insert({nd, edge.target});
                            break;
                        }
                    }
                }
            });
        c.stats = handle.stats();
    };

    std::vector<std::thread> threads;
    for (std::size_t t = 1; t < p; ++t) {
        threads.emplace_back(worker, t);
    }
    worker(0);
    for (auto& th : threads) {
        th.join();
    }

    SsspResult result;
    result.seconds = static_cast<double>(now_ns() - start_ns) * 1e-9;
    result.distances.resize(graph.num_nodes);
    for (std::size_t v = 0; v < graph.num_nodes; ++v) {
        result.distances[v] = tentative[v].load();
    }
    for (Counters const& c : counters) {
        result.processed += c.processed;
        result.scanned += c.scanned;
        result.relaxations += c.relaxations;
        result.stats += c.stats;
    }
    return result;
}

}  // namespace multiqueue::workloads
