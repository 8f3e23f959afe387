#include "multiqueue/cli/commands.hpp"

#include "multiqueue/multiqueue.hpp"
#include "multiqueue/quality/log_io.hpp"
#include "multiqueue/workloads/graph.hpp"
#include "multiqueue/workloads/knapsack.hpp"
#include "multiqueue/workloads/simulator.hpp"
#include "multiqueue/workloads/sssp.hpp"
#include "multiqueue/workloads/stress.hpp"

#include <algorithm>
#include <ostream>

namespace multiqueue::cli {

namespace {

using nlohmann::ordered_json;

ResultRow base_row(RunSpec const& spec) {
    ResultRow row;
    row.workload = std::string(to_string(spec.subcommand));
    row.p = spec.config.num_threads;
    row.c = spec.config.queue_factor;
    row.d = spec.config.candidates;
    row.s = spec.config.stickiness_period;
    return row;
}

Config rep_config(RunSpec const& spec, std::size_t rep) {
    Config cfg = spec.config;
    cfg.seed = derive_seed(spec.config.seed, rep);
    return cfg;
}

double per_second(std::uint64_t count, double seconds) {
    return seconds > 0 ? static_cast<double>(count) / seconds : 0.0;
}

void fill_quality(ResultRow& row, quality::ReportSummary const& s) {
    row.mean_rank_error = s.rank_error.mean;
    row.max_rank_error = s.rank_error.q100;
    row.mean_delay = s.delay.mean;
    row.max_delay = s.delay.q100;
}

ordered_json stats_json(OperationStats const& s) {
    ordered_json j;
    j["inserts"] = s.inserts;
    j["deletions"] = s.deletions;
    j["failed_deletions"] = s.failed_deletions;
    j["lock_attempts"] = s.lock_attempts;
    j["lock_failures"] = s.lock_failures;
    j["lock_attempts_per_operation"] = s.lock_attempts_per_operation();
    j["stick_refreshes"] = s.stick_refreshes;
    j["stick_aborts"] = s.stick_aborts;
    j["scans"] = s.scans;
    j["stale_wins"] = s.stale_wins;
    return j;
}

void write_side_outputs(RunSpec const& spec, std::vector<quality::DeletionRecord> const& deletions) {
    std::string const comment = config_comment(spec);
    if (!spec.log_quality_path.empty()) {
        auto out = open_output(spec.log_quality_path);
        write_deletion_csv(out, comment, deletions);
    }
    if (!spec.bins_path.empty()) {
        auto out = open_output(spec.bins_path);
        write_bin_csv(out, comment, quality::bin_timeseries(quality::QualityReport{deletions}, spec.bin_size));
    }
}

RunOutcome run_monotonic_stress(RunSpec const& spec) {
    RunOutcome outcome;
    ordered_json reps = ordered_json::array();
    for (std::size_t rep = 0; rep < spec.reps; ++rep) {
        MultiQueue mq(rep_config(spec, rep));
        workloads::MonotonicParams params;
        params.prefill = spec.prefill;
        params.iterations_per_thread = spec.iterations;
        params.timeout_seconds = spec.timeout_seconds;
        params.log_operations = !spec.log_quality_path.empty();
        auto const result = workloads::run_monotonic(mq, params);
        ResultRow row = base_row(spec);
        row.throughput = result.throughput;
        row.processed = result.iterations;
        row.time = result.seconds;
        if (params.log_operations) {
            auto const merged = quality::merge_logs(result.logs);
            if (rep == 0) {
                quality::write_log_file(spec.log_quality_path, merged);
            }
            fill_quality(row, quality::summarize(quality::replay(merged)));
        }
        ordered_json j = row_json(row);
        j["timed_out"] = result.timed_out;
        j["stats"] = stats_json(result.stats);
        reps.push_back(std::move(j));
        outcome.repetitions.push_back(std::move(row));
    }
    outcome.extra["repetitions"] = std::move(reps);
    return outcome;
}

RunOutcome run_insdel_stress(RunSpec const& spec) {
    RunOutcome outcome;
    ordered_json reps = ordered_json::array();
    for (std::size_t rep = 0; rep < spec.reps; ++rep) {
        MultiQueue mq(rep_config(spec, rep));
        workloads::InsertDeleteParams params;
        params.elements_per_thread = spec.iterations;
        auto const result = workloads::run_insert_delete(mq, params);
        double const seconds = result.insert_seconds + result.delete_seconds;
        ResultRow row = base_row(spec);
        row.throughput = per_second(result.inserted + result.deleted, seconds);
        row.processed = result.deleted;
        row.time = seconds;
        if (result.deleted != result.inserted || mq.unsafe_size() != 0) {
            outcome.ok = false;
            outcome.failure = "inserted " + std::to_string(result.inserted) + " elements but deleted " +
                              std::to_string(result.deleted);
        }
        ordered_json j = row_json(row);
        j["insert_throughput"] = result.insert_throughput;
        j["delete_throughput"] = result.delete_throughput;
        j["stats"] = stats_json(result.stats);
        reps.push_back(std::move(j));
        outcome.repetitions.push_back(std::move(row));
    }
    outcome.extra["repetitions"] = std::move(reps);
    return outcome;
}

RunOutcome run_simulation(RunSpec const& spec) {
    RunOutcome outcome;
    ordered_json reps = ordered_json::array();
    for (std::size_t rep = 0; rep < spec.reps; ++rep) {
        workloads::SimulatorParams params;
        params.num_queues = spec.config.num_queues();
        params.candidates = spec.config.candidates;
        params.workload =
            spec.insert_delete_workload ? workloads::SimWorkload::insert_delete : workloads::SimWorkload::monotonic;
        params.prefill = spec.prefill;
        params.iterations = spec.iterations;
        params.warmup = spec.warmup;
        params.window = spec.window;
        params.drain = spec.drain;
        params.seed = derive_seed(spec.config.seed, rep);
        params.stickiness = spec.config.stickiness;
        params.stickiness_period = spec.config.stickiness_period;
        auto const result = workloads::run_sequential_simulator(params);
        std::vector<quality::DeletionRecord> const measured(
            result.deletions.begin() + static_cast<std::ptrdiff_t>(result.measured_begin),
            result.deletions.begin() + static_cast<std::ptrdiff_t>(result.measured_end));
        ResultRow row = base_row(spec);
        row.p = 1;
        row.c = params.num_queues;
        fill_quality(row, quality::summarize(quality::QualityReport{measured}));
        row.processed = measured.size();
        row.throughput = per_second(result.deletions.size(), result.seconds);
        row.time = result.seconds;
        if (rep == 0) {
            write_side_outputs(spec, measured);
        }
        ordered_json j = row_json(row);
        j["final_window_mean"] = result.final_window_mean();
        j["window_means"] = result.window_means;
        reps.push_back(std::move(j));
        outcome.repetitions.push_back(std::move(row));
    }
    RankErrorModel const model{spec.config.num_queues(), 1, spec.config.candidates};
    ordered_json predictions;
    predictions["selection_probability"] = model.selection_probability();
    predictions["geometric_mean"] = model.estimated_mean();
    if (spec.config.candidates == 2) {
        predictions["two_choice_mean"] = model.two_choice_mean();
    }
    outcome.extra["predictions"] = std::move(predictions);
    outcome.extra["repetitions"] = std::move(reps);
    return outcome;
}

RunOutcome run_shortest_paths(RunSpec const& spec) {
    RunOutcome outcome;
    workloads::Graph const graph =
        spec.graph_path.empty()
            ? workloads::generate_random_graph(spec.nodes, spec.degree, spec.max_edge_weight, spec.config.seed)
            : workloads::read_dimacs_gr_file(spec.graph_path);
    if (spec.source >= graph.num_nodes) {
        throw UsageError("--source " + std::to_string(spec.source) + " is not a node of the graph (" +
                         std::to_string(graph.num_nodes) + " nodes)");
    }
    std::optional<workloads::DijkstraResult> oracle;
    if (spec.verify) {
        oracle = workloads::dijkstra(graph, spec.source);
    }
    ordered_json reps = ordered_json::array();
    for (std::size_t rep = 0; rep < spec.reps; ++rep) {
        MultiQueue mq(rep_config(spec, rep));
        auto const result = workloads::run_sssp(graph, spec.source, mq);
        ResultRow row = base_row(spec);
        row.throughput = per_second(result.processed, result.seconds);
        row.processed = result.processed;
        row.scanned = result.scanned;
        row.time = result.seconds;
        ordered_json j = row_json(row);
        j["relaxations"] = result.relaxations;
        if (oracle) {
            bool const match = result.distances == oracle->distances;
            j["verified"] = match;
            j["scan_overhead"] = static_cast<double>(result.scanned) / static_cast<double>(oracle->scanned);
            if (!match) {
                outcome.ok = false;
                outcome.failure = "distances differ from the sequential Dijkstra oracle";
            }
        }
        j["stats"] = stats_json(result.stats);
        reps.push_back(std::move(j));
        outcome.repetitions.push_back(std::move(row));
    }
    outcome.extra["nodes"] = graph.num_nodes;
    outcome.extra["edges"] = graph.num_edges();
    if (oracle) {
        outcome.extra["reachable"] = oracle->scanned;
        outcome.extra["verified"] = outcome.ok;
    }
    outcome.extra["repetitions"] = std::move(reps);
    return outcome;
}

RunOutcome run_branch_and_bound(RunSpec const& spec) {
    RunOutcome outcome;
    auto const inst = workloads::generate_knapsack(spec.max_item_weight, spec.profit_factor, spec.capacity_fraction,
                                                   spec.items, spec.config.seed);
    std::optional<std::uint64_t> dp;
    std::optional<workloads::KnapsackResult> sequential;
    if (spec.verify) {
        dp = workloads::solve_knapsack_dp(inst);
        sequential = workloads::solve_knapsack_sequential(inst);
    }
    ordered_json reps = ordered_json::array();
    for (std::size_t rep = 0; rep < spec.reps; ++rep) {
        MultiQueue mq(rep_config(spec, rep));
        auto const result = workloads::run_knapsack(inst, mq);
        ResultRow row = base_row(spec);
        row.throughput = per_second(result.processed, result.seconds);
        row.processed = result.processed;
        row.time = result.seconds;
        ordered_json j = row_json(row);
        j["optimum"] = result.optimum;
        j["pruned"] = result.pruned;
        if (dp) {
            j["verified"] = result.optimum == *dp;
            j["processed_ratio"] =
                static_cast<double>(result.processed) / static_cast<double>(std::max<std::uint64_t>(1, sequential->processed));
            if (result.optimum != *dp) {
                outcome.ok = false;
                outcome.failure = "optimum " + std::to_string(result.optimum) + " differs from the DP optimum " +
                                  std::to_string(*dp);
            }
        }
        j["stats"] = stats_json(result.stats);
        reps.push_back(std::move(j));
        outcome.repetitions.push_back(std::move(row));
    }
    outcome.extra["items"] = inst.size();
    outcome.extra["capacity"] = inst.capacity();
    if (dp) {
        outcome.extra["dp_optimum"] = *dp;
        outcome.extra["sequential_processed"] = sequential->processed;
        outcome.extra["verified"] = outcome.ok;
    }
    outcome.extra["repetitions"] = std::move(reps);
    return outcome;
}

RunOutcome run_replay(RunSpec const& spec) {
    RunOutcome outcome;
    std::vector<quality::OpLog> logs;
    for (auto const& path : spec.logs) {
        logs.push_back(quality::read_log_file(path));
    }
    auto const merged = quality::merge_logs(logs);
    auto const start = workloads::now_ns();
    auto const report = quality::replay(merged);
    double const seconds = static_cast<double>(workloads::now_ns() - start) * 1e-9;
    auto const summary = quality::summarize(report);
    ResultRow row;
    row.workload = "replay";
    row.p = logs.size();
    fill_quality(row, summary);
    row.processed = summary.deletions;
    row.time = seconds;
    write_side_outputs(spec, report.deletions);
    outcome.repetitions.push_back(row);
    outcome.extra["operations"] = merged.size();
    outcome.extra["failed_deletions"] = summary.failed_deletions;
    outcome.extra["rank_error_sum"] = summary.rank_error_sum;
    outcome.extra["delay_sum"] = summary.delay_sum;
    return outcome;
}

}  // namespace

RunOutcome run(RunSpec const& spec) {
    RunOutcome outcome;
    switch (spec.subcommand) {
        case Subcommand::stress_monotonic:
            outcome = run_monotonic_stress(spec);
            break;
        case Subcommand::stress_insdel:
            outcome = run_insdel_stress(spec);
            break;
        case Subcommand::simulate:
            outcome = run_simulation(spec);
            break;
        case Subcommand::sssp:
            outcome = run_shortest_paths(spec);
            break;
        case Subcommand::knapsack:
            outcome = run_branch_and_bound(spec);
            break;
        case Subcommand::replay:
            outcome = run_replay(spec);
            break;
    }
    outcome.row = mean_row(outcome.repetitions);
    return outcome;
}

void emit_results(RunSpec const& spec, RunOutcome const& outcome, std::ostream& out) {
    if (spec.format == OutputFormat::csv) {
        write_result_csv(out, {outcome.row});
        return;
    }
    ordered_json j;
    j["version"] = MQ_VERSION;
    j["subcommand"] = std::string(to_string(spec.subcommand));
    j["config"] = config_json(spec);
    j["thread_pinning"] = false;
    j["result"] = row_json(outcome.row);
    for (auto const& [key, value] : outcome.extra.items()) {
        j[key] = value;
    }
    out << j.dump(2) << '\n';
}

int run_main(std::vector<std::string> const& args, std::optional<std::string> cache_line_env, std::ostream& out,
             std::ostream& err) {
    RunSpec spec;
    try {
        spec = parse_args(args, std::move(cache_line_env));
    } catch (UsageError const& e) {
        std::string message = e.what();
        if (!message.empty() && message.back() != '\n') {
            message += '\n';
        }
        (e.exit_code() == 0 ? out : err) << message;
        return e.exit_code();
    }
    try {
        RunOutcome const outcome = run(spec);
        if (spec.out_path.empty()) {
            emit_results(spec, outcome, out);
        } else {
            auto file = open_output(spec.out_path);
            emit_results(spec, outcome, file);
            if (!file.flush()) {
                throw OutputError("failed writing " + spec.out_path);
            }
        }
        if (!outcome.ok) {
            err << "mq-bench: verification failed: " << outcome.failure << '\n';
            return 1;
        }
        return 0;
    } catch (UsageError const& e) {
        err << "mq-bench: " << e.what() << '\n';
        return 2;
    } catch (std::exception const& e) {
        err << "mq-bench: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace multiqueue::cli
