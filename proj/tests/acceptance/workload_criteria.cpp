#include "acceptance.hpp"

#include "multiqueue/multiqueue.hpp"
#include "multiqueue/workloads/graph.hpp"
#include "multiqueue/workloads/knapsack.hpp"
#include "multiqueue/workloads/sssp.hpp"

#include <algorithm>
#include <map>

namespace multiqueue::acceptance {

namespace {

constexpr Preset all_presets[] = {Preset::strict, Preset::quality, Preset::balanced, Preset::fast};
constexpr std::size_t thread_counts[] = {1, 4, 8};

Config preset_config(std::size_t p, Preset preset, std::uint64_t seed) {
    Config cfg;
    cfg.num_threads = p;
    cfg.seed = seed;
    return apply_preset(cfg, preset);
}

struct Overhead {
    double sum = 0.0;
    double max = 0.0;
    std::size_t count = 0;

    void add(double x) {
        sum += x;
        max = std::max(max, x);
        ++count;
    }
    [[nodiscard]] double mean() const {
        return count == 0 ? 0.0 : sum / static_cast<double>(count);
    }
};

Outcome sssp_exactness(Options const& options) {
    std::vector<std::pair<std::string, workloads::Graph>> graphs;
    for (std::size_t g = 0; g < 20; ++g) {
        std::size_t const n = 10'000 + (90'000 * g) / 19;
        graphs.emplace_back(format("random %zu", g), workloads::generate_random_graph(n, 4.0, 1000, 500 + g));
    }
    for (auto const& path : options.graphs) {
        graphs.emplace_back(path, workloads::read_dimacs_gr_file(path));
    }
    std::map<Preset, Overhead> overhead;
    std::size_t runs = 0;
    Stopwatch watch;
    for (auto const& [name, graph] : graphs) {
        auto const oracle = workloads::dijkstra(graph, 0);
        for (std::size_t p : thread_counts) {
            for (Preset preset : all_presets) {
                MultiQueue mq(preset_config(p, preset, runs));
                auto const result = workloads::run_sssp(graph, 0, mq);
                if (result.distances != oracle.distances) {
                    return {false, format("%s: distances differ from Dijkstra at p=%zu %s", name.c_str(), p,
                                          std::string(to_string(preset)).c_str())};
                }
                overhead[preset].add(static_cast<double>(result.scanned) / static_cast<double>(oracle.scanned));
                ++runs;
            }
        }
    }
    std::string detail = format("%zu graphs x p in {1,4,8} x 4 presets = %zu runs exact; scanned/settled", graphs.size(),
                                runs);
    for (Preset preset : all_presets) {
        detail += format(" %s %.3f (max %.3f)", std::string(to_string(preset)).c_str(), overhead[preset].mean(),
                         overhead[preset].max);
    }
    detail += format("; %.1f s", watch.seconds());
    return {true, detail};
}

struct AcceptedInstance {
    workloads::KnapsackInstance instance;
    std::uint64_t sequential_processed;
    std::uint64_t optimum;
};

// Generated instances whose sequential best-first solve expands between 10^4
// and 10^6 nodes.
std::vector<AcceptedInstance> knapsack_instances(std::size_t wanted, std::size_t& generated) {
    constexpr std::uint64_t max_weights[] = {1000, 10000};
    constexpr double profit_factors[] = {1.1, 1.15, 1.2};
    constexpr double capacity_fractions[] = {0.5, 0.9};
    constexpr std::size_t sizes[] = {100, 200, 300};
    std::vector<AcceptedInstance> accepted;
    for (std::uint64_t seed = 0; accepted.size() < wanted; ++seed) {
        auto const inst = workloads::generate_knapsack(max_weights[seed % 2], profit_factors[(seed / 2) % 3],
                                                       capacity_fractions[(seed / 6) % 2], sizes[(seed / 12) % 3],
                                                       seed);
        ++generated;
        auto const sequential = workloads::solve_knapsack_sequential(inst, 1'000'001);
        if (!sequential.completed || sequential.processed < 10'000 || sequential.processed > 1'000'000) {
            continue;
        }
        accepted.push_back({inst, sequential.processed, sequential.optimum});
    }
    return accepted;
}

Outcome knapsack_exactness() {
    Stopwatch watch;
    std::size_t generated = 0;
    auto const instances = knapsack_instances(50, generated);
    std::map<std::size_t, Overhead> ratio;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        auto const& [inst, sequential_processed, sequential_optimum] = instances[i];
        std::uint64_t const dp = workloads::solve_knapsack_dp(inst);
        if (sequential_optimum != dp) {
            return {false, format("instance %zu: sequential optimum %llu != DP %llu", i,
                                  static_cast<unsigned long long>(sequential_optimum),
                                  static_cast<unsigned long long>(dp))};
        }
        for (std::size_t p : thread_counts) {
            MultiQueue mq(preset_config(p, Preset::balanced, i));
            auto const result = workloads::run_knapsack(inst, mq);
            if (result.optimum != dp) {
                return {false, format("instance %zu (%zu items) p=%zu: optimum %llu != DP %llu", i, inst.size(), p,
                                      static_cast<unsigned long long>(result.optimum),
                                      static_cast<unsigned long long>(dp))};
            }
            ratio[p].add(static_cast<double>(result.processed) / static_cast<double>(sequential_processed));
        }
    }
    double worst = 0.0;
    std::string detail = format("%zu instances (of %zu generated) exact at p in {1,4,8}, balanced preset; r mean/max",
                                instances.size(), generated);
    for (std::size_t p : thread_counts) {
        detail += format(" p=%zu %.3f/%.3f", p, ratio[p].mean(), ratio[p].max);
        worst = std::max(worst, ratio[p].max);
    }
    detail += format(" (limit 5); %.1f s", watch.seconds());
    return {worst < 5.0, detail};
}

}  // namespace

std::vector<Criterion> workload_criteria(Options const& options) {
    return {
        {"sssp_exactness", [options] { return sssp_exactness(options); }},
        {"knapsack_exactness", knapsack_exactness},
    };
}

}  // namespace multiqueue::acceptance
