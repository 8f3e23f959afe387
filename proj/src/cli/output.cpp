#include "multiqueue/cli/output.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

namespace multiqueue::cli {

namespace {

template <typename T>
void field(std::ostream& out, std::optional<T> const& value) {
    out << ',';
    if (value) {
        out << *value;
    }
}

template <typename T>
nlohmann::ordered_json or_null(std::optional<T> const& value) {
    return value ? nlohmann::ordered_json(*value) : nlohmann::ordered_json(nullptr);
}

template <typename T, typename Get>
std::optional<double> mean_of(std::vector<ResultRow> const& reps, Get get) {
    double sum = 0.0;
    for (auto const& r : reps) {
        std::optional<T> const v = get(r);
        if (!v) {
            return std::nullopt;
        }
        sum += static_cast<double>(*v);
    }
    return sum / static_cast<double>(reps.size());
}

template <typename Get>
std::optional<std::uint64_t> max_of(std::vector<ResultRow> const& reps, Get get) {
    std::optional<std::uint64_t> best;
    for (auto const& r : reps) {
        std::optional<std::uint64_t> const v = get(r);
        if (!v) {
            return std::nullopt;
        }
        best = std::max(best.value_or(0), *v);
    }
    return best;
}

void write_summary(std::ostream& out, quality::QuantileSummary const& q) {
    out << ',' << q.mean << ',' << q.q25 << ',' << q.q50 << ',' << q.q75 << ',' << q.q100;
}

}  // namespace

void write_result_csv(std::ostream& out, std::vector<ResultRow> const& rows) {
    out << result_csv_header << '\n';
    out.precision(10);
    for (auto const& r : rows) {
        out << r.workload << ',' << r.p;
        field(out, r.c);
        field(out, r.d);
        field(out, r.s);
        field(out, r.throughput);
        field(out, r.mean_rank_error);
        field(out, r.max_rank_error);
        field(out, r.mean_delay);
        field(out, r.max_delay);
        field(out, r.processed);
        field(out, r.scanned);
        out << ',' << r.time << '\n';
    }
}

ResultRow mean_row(std::vector<ResultRow> const& reps) {
    if (reps.empty()) {
        throw std::invalid_argument("no repetitions to average");
    }
    ResultRow row = reps.front();
    row.throughput = mean_of<double>(reps, [](ResultRow const& r) { return r.throughput; });
    row.mean_rank_error = mean_of<double>(reps, [](ResultRow const& r) { return r.mean_rank_error; });
    row.mean_delay = mean_of<double>(reps, [](ResultRow const& r) { return r.mean_delay; });
    row.max_rank_error = max_of(reps, [](ResultRow const& r) { return r.max_rank_error; });
    row.max_delay = max_of(reps, [](ResultRow const& r) { return r.max_delay; });
    auto const processed = mean_of<std::uint64_t>(reps, [](ResultRow const& r) { return r.processed; });
    auto const scanned = mean_of<std::uint64_t>(reps, [](ResultRow const& r) { return r.scanned; });
    row.processed = processed ? std::optional<std::uint64_t>(static_cast<std::uint64_t>(*processed + 0.5)) : std::nullopt;
    row.scanned = scanned ? std::optional<std::uint64_t>(static_cast<std::uint64_t>(*scanned + 0.5)) : std::nullopt;
    double time = 0.0;
    for (auto const& r : reps) {
        time += r.time;
    }
    row.time = time / static_cast<double>(reps.size());
    return row;
}

nlohmann::ordered_json config_json(RunSpec const& spec) {
    Config const& c = spec.config;
    nlohmann::ordered_json j;
    j["preset"] = spec.preset;
    j["p"] = c.num_threads;
    j["c"] = c.queue_factor;
    j["d"] = c.candidates;
    j["stickiness"] = std::string(to_string(c.stickiness));
    j["s"] = c.stickiness_period;
    j["queues"] = c.num_queues();
    j["ibuf"] = c.insertion_buffer_size;
    j["dbuf"] = c.deletion_buffer_size;
    j["arity"] = c.heap_arity;
    j["cache_line"] = c.cache_line_size;
    j["seed"] = c.seed;
    j["reps"] = spec.reps;
    switch (spec.subcommand) {
        case Subcommand::stress_monotonic:
            j["prefill"] = spec.prefill;
            j["iterations"] = spec.iterations;
            j["timeout"] = spec.timeout_seconds;
            break;
        case Subcommand::stress_insdel:
            j["iterations"] = spec.iterations;
            break;
        case Subcommand::simulate:
            j["workload"] = spec.insert_delete_workload ? "insdel" : "monotonic";
            j["prefill"] = spec.prefill;
            j["iterations"] = spec.iterations;
            j["warmup"] = spec.warmup;
            j["window"] = spec.window;
            j["drain"] = spec.drain;
            break;
        case Subcommand::sssp:
            if (spec.graph_path.empty()) {
                j["nodes"] = spec.nodes;
                j["degree"] = spec.degree;
                j["max_weight"] = spec.max_edge_weight;
            } else {
                j["graph"] = spec.graph_path;
            }
            j["source"] = spec.source;
            break;
        case Subcommand::knapsack:
            j["items"] = spec.items;
            j["max_weight"] = spec.max_item_weight;
            j["profit_factor"] = spec.profit_factor;
            j["capacity_fraction"] = spec.capacity_fraction;
            break;
        case Subcommand::replay:
            j["logs"] = spec.logs;
            break;
    }
    return j;
}

nlohmann::ordered_json row_json(ResultRow const& row) {
    nlohmann::ordered_json j;
    j["workload"] = row.workload;
    j["p"] = row.p;
    j["c"] = or_null(row.c);
    j["d"] = or_null(row.d);
    j["s"] = or_null(row.s);
    j["throughput"] = or_null(row.throughput);
    j["mean_rank_error"] = or_null(row.mean_rank_error);
    j["max_rank_error"] = or_null(row.max_rank_error);
    j["mean_delay"] = or_null(row.mean_delay);
    j["max_delay"] = or_null(row.max_delay);
    j["processed"] = or_null(row.processed);
    j["scanned"] = or_null(row.scanned);
    j["time"] = row.time;
    return j;
}

void write_deletion_csv(std::ostream& out, std::string const& config_line,
                        std::vector<quality::DeletionRecord> const& deletions) {
    out << "# " << config_line << '\n' << deletion_csv_header << '\n';
    for (std::size_t i = 0; i < deletions.size(); ++i) {
        auto const& d = deletions[i];
        out << i << ',' << d.timestamp << ',';
        if (!d.failed) {
            out << d.key;
        }
        out << ',' << d.rank_error << ',' << d.delay << '\n';
    }
}

void write_bin_csv(std::ostream& out, std::string const& config_line, std::vector<quality::Bin> const& bins) {
    out << "# " << config_line << '\n' << bin_csv_header << '\n';
    out.precision(10);
    for (std::size_t i = 0; i < bins.size(); ++i) {
        out << i << ',' << bins[i].first_deletion << ',' << bins[i].count;
        write_summary(out, bins[i].rank_error);
        write_summary(out, bins[i].delay);
        out << '\n';
    }
}

std::string config_comment(RunSpec const& spec) {
    std::ostringstream out;
    bool first = true;
    auto const config = config_json(spec);
    for (auto const& [key, value] : config.items()) {
        out << (first ? "" : " ") << key << '=' << (value.is_string() ? value.get<std::string>() : value.dump());
        first = false;
    }
    return out.str();
}

std::ofstream open_output(std::string const& path) {
    std::ofstream out(path);
    if (!out) {
        throw OutputError("cannot open " + path + " for writing");
    }
    return out;
}

}  // namespace multiqueue::cli
