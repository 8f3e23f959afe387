#pragma once

#include "multiqueue/cli/run_spec.hpp"
#include "multiqueue/quality/replay.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace multiqueue::cli {

inline constexpr char result_csv_header[] =
    "workload,p,c,d,s,throughput,mean_rank_error,max_rank_error,mean_delay,max_delay,processed,scanned,time";
inline constexpr char deletion_csv_header[] = "index,timestamp,key,rank_error,delay";
inline constexpr char bin_csv_header[] =
    "bin,first_deletion,count,rank_error_mean,rank_error_q25,rank_error_q50,rank_error_q75,rank_error_max,"
    "delay_mean,delay_q25,delay_q50,delay_q75,delay_max";

// One CSV row. Unset optionals are written as empty fields.
struct ResultRow {
    std::string workload;
    std::size_t p = 1;
    std::optional<std::size_t> c;
    std::optional<std::size_t> d;
    std::optional<std::size_t> s;
    std::optional<double> throughput;
    std::optional<double> mean_rank_error;
    std::optional<std::uint64_t> max_rank_error;
    std::optional<double> mean_delay;
    std::optional<std::uint64_t> max_delay;
    std::optional<std::uint64_t> processed;
    std::optional<std::uint64_t> scanned;
    double time = 0.0;
};

class OutputError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

void write_result_csv(std::ostream& out, std::vector<ResultRow> const& rows);

// Mean over repetitions; quality maxima are maxima over repetitions.
ResultRow mean_row(std::vector<ResultRow> const& reps);

nlohmann::ordered_json config_json(RunSpec const& spec);
nlohmann::ordered_json row_json(ResultRow const& row);

// The config line is written as a leading `# ` comment.
void write_deletion_csv(std::ostream& out, std::string const& config_line,
                        std::vector<quality::DeletionRecord> const& deletions);
void write_bin_csv(std::ostream& out, std::string const& config_line, std::vector<quality::Bin> const& bins);

// `key=value` pairs of the queue configuration, for CSV comment lines.
std::string config_comment(RunSpec const& spec);

// Opens `path` for writing, throwing OutputError if that fails.
std::ofstream open_output(std::string const& path);

}  // namespace multiqueue::cli
