#include "acceptance.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <exception>
#include <set>

using namespace multiqueue::acceptance;

int main(int argc, char** argv) {
    CLI::App app("MultiQueue acceptance suite", "mq_acceptance");
    std::vector<std::string> only;
    std::vector<std::string> known;
    Options options;
    bool list = false;
    app.add_option("--only", only, "Run just these criteria")->delimiter(',');
    app.add_option("--known-failures", known, "Criteria whose failure does not affect the exit code")
        ->delimiter(',');
    app.add_option("--graph", options.graphs, "Extra DIMACS graphs for the SSSP check")->check(CLI::ExistingFile);
    app.add_flag("--list", list, "Print the criterion names");
    CLI11_PARSE(app, argc, argv);

    std::vector<Criterion> criteria = quality_criteria();
    for (auto& group : {concurrency_criteria(), workload_criteria(options)}) {
        criteria.insert(criteria.end(), group.begin(), group.end());
    }
    std::set<std::string> names;
    for (auto const& c : criteria) {
        names.insert(c.name);
    }
    for (auto const& name : only) {
        if (names.count(name) == 0) {
            std::fprintf(stderr, "unknown criterion %s\n", name.c_str());
            return 2;
        }
    }
    if (list) {
        for (auto const& c : criteria) {
            std::printf("%s\n", c.name.c_str());
        }
        return 0;
    }

    int unexpected = 0;
    std::size_t passed = 0;
    std::size_t ran = 0;
    for (auto const& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) {
            continue;
        }
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (std::exception const& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        bool const is_known = std::find(known.begin(), known.end(), c.name) != known.end();
        std::printf("%s %s: %s%s\n", outcome.pass ? "PASS" : "FAIL", c.name.c_str(), outcome.detail.c_str(),
                    !outcome.pass && is_known ? " (known failure)" : "");
        std::fflush(stdout);
        ++ran;
        passed += outcome.pass ? 1 : 0;
        if (!outcome.pass && !is_known) {
            ++unexpected;
        }
    }
    std::printf("%zu/%zu criteria passed\n", passed, ran);
    return unexpected == 0 ? 0 : 1;
}
