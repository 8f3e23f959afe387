#pragma once

#include "multiqueue/cli/output.hpp"
#include "multiqueue/cli/run_spec.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace multiqueue::cli {

struct RunOutcome {
    std::vector<ResultRow> repetitions;
    ResultRow row;                  // mean over repetitions
    nlohmann::ordered_json extra;   // workload-specific details for the JSON summary
    bool ok = true;                 // false if a --verify check or a conservation check failed
    std::string failure;
};

// Runs the workload; writes --log-quality and --bins side outputs.
RunOutcome run(RunSpec const& spec);

// CSV header plus the mean row, or the JSON summary.
void emit_results(RunSpec const& spec, RunOutcome const& outcome, std::ostream& out);

// Exit codes: 0 success, 1 failed verification or I/O error, 2 usage error.
int run_main(std::vector<std::string> const& args, std::optional<std::string> cache_line_env, std::ostream& out,
             std::ostream& err);

}  // namespace multiqueue::cli
