#include "multiqueue/workloads/graph.hpp"

#include "multiqueue/rng.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <iterator>
#include <ostream>
#include <queue>
#include <utility>

namespace multiqueue::workloads {

namespace {

class Tokens {
   public:
    Tokens(std::string_view line, std::size_t line_number) : rest_(line), line_(line_number) {
    }

    std::string_view word() {
        skip_space();
        auto const end = std::min(rest_.find_first_of(" \t\r"), rest_.size());
        auto const w = rest_.substr(0, end);
        rest_.remove_prefix(end);
        return w;
    }

    std::uint64_t number(char const* what) {
        auto const w = word();
        std::uint64_t value = 0;
        auto const [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), value);
        if (w.empty() || ec != std::errc{} || ptr != w.data() + w.size()) {
            throw GraphParseError(line_, std::string("expected a nonnegative integer ") + what + ", got '" +
                                             std::string(w) + "'");
        }
        return value;
    }

    void expect_end() {
        skip_space();
        if (!rest_.empty()) {
            throw GraphParseError(line_, "unexpected trailing text '" + std::string(rest_) + "'");
        }
    }

   private:
    void skip_space() {
        auto const start = rest_.find_first_not_of(" \t\r");
        rest_.remove_prefix(start == std::string_view::npos ? rest_.size() : start);
    }

    std::string_view rest_;
    std::size_t line_;
};

}  // namespace

Graph build_graph(std::size_t num_nodes, std::span<std::pair<node_id, Edge> const> arcs) {
    Graph g;
    g.num_nodes = num_nodes;
    g.offsets.assign(num_nodes + 1, 0);
    for (auto const& [u, e] : arcs) {
        if (u >= num_nodes || e.target >= num_nodes) {
            throw std::out_of_range("arc endpoint outside the node range");
        }
        ++g.offsets[u + 1];
    }
    for (std::size_t u = 0; u < num_nodes; ++u) {
        g.offsets[u + 1] += g.offsets[u];
    }
    g.edges.resize(arcs.size());
    std::vector<std::size_t> fill(g.offsets.begin(), g.offsets.end() - 1);
    for (auto const& [u, e] : arcs) {
        g.edges[fill[u]++] = e;
    }
    return g;
}

Graph parse_dimacs_gr(std::string_view text) {
    std::size_t line_number = 0;
    bool have_problem = false;
    std::size_t num_nodes = 0;
    std::size_t declared_arcs = 0;
    std::vector<std::pair<node_id, Edge>> arcs;
    while (!text.empty()) {
        auto const eol = std::min(text.find('\n'), text.size());
        std::string_view const line = text.substr(0, eol);
        text.remove_prefix(std::min(eol + 1, text.size()));
        ++line_number;

        Tokens tokens(line, line_number);
        auto const kind = tokens.word();
        if (kind.empty() || kind == "c") {
            continue;
        }
        if (kind == "p") {
            if (have_problem) {
                throw GraphParseError(line_number, "second problem line");
            }
            if (tokens.word() != "sp") {
                throw GraphParseError(line_number, "problem line must be 'p sp <nodes> <arcs>'");
            }
            num_nodes = tokens.number("node count");
            declared_arcs = tokens.number("arc count");
            tokens.expect_end();
            if (num_nodes > std::numeric_limits<node_id>::max()) {
                throw GraphParseError(line_number, "too many nodes");
            }
            have_problem = true;
            arcs.reserve(declared_arcs);
        } else if (kind == "a") {
            if (!have_problem) {
                throw GraphParseError(line_number, "arc before the problem line");
            }
            auto const u = tokens.number("source");
            auto const v = tokens.number("target");
            auto const w = tokens.number("weight");
            tokens.expect_end();
            if (u < 1 || u > num_nodes || v < 1 || v > num_nodes) {
                throw GraphParseError(line_number, "arc endpoint outside 1.." + std::to_string(num_nodes));
            }
            if (arcs.size() == declared_arcs) {
                throw GraphParseError(line_number, "more arcs than declared (" + std::to_string(declared_arcs) + ")");
            }
            arcs.push_back({static_cast<node_id>(u - 1), Edge{static_cast<node_id>(v - 1), w}});
        } else {
            throw GraphParseError(line_number, "unknown line type '" + std::string(kind) + "'");
        }
    }
    if (!have_problem) {
        throw GraphParseError(line_number, "missing problem line");
    }
    if (arcs.size() != declared_arcs) {
        throw GraphParseError(line_number, "declared " + std::to_string(declared_arcs) + " arcs but found " +
                                               std::to_string(arcs.size()));
    }
    return build_graph(num_nodes, arcs);
}

Graph read_dimacs_gr(std::istream& in) {
    std::string const text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_dimacs_gr(text);
}

// Reads plain or gzip-compressed files alike.
Graph read_dimacs_gr_file(std::string const& path) {
    gzFile file = gzopen(path.c_str(), "rb");
    if (file == nullptr) {
        throw std::runtime_error("cannot open " + path);
    }
    std::string text;
    char buffer[1 << 16];
    int n = 0;
    while ((n = gzread(file, buffer, sizeof buffer)) > 0) {
        text.append(buffer, static_cast<std::size_t>(n));
    }
    int err = 0;
    char const* message = gzerror(file, &err);
    std::string const error = err != Z_OK && err != Z_STREAM_END ? message : "";
    gzclose(file);
    if (n < 0 || !error.empty()) {
        throw std::runtime_error("cannot read " + path + ": " + error);
    }
    return parse_dimacs_gr(text);
}

void write_dimacs_gr(std::ostream& out, Graph const& graph) {
    out << "p sp " << graph.num_nodes << ' ' << graph.num_edges() << '\n';
    for (std::size_t u = 0; u < graph.num_nodes; ++u) {
        for (Edge const& e : graph.neighbors(static_cast<node_id>(u))) {
            out << "a " << u + 1 << ' ' << e.target + 1 << ' ' << e.weight << '\n';
        }
    }
}

Graph generate_random_graph(std::size_t num_nodes, double avg_degree, weight_type max_weight, std::uint64_t seed) {
    if (num_nodes == 0) {
        return Graph{};
    }
    if (max_weight == 0) {
        throw std::invalid_argument("max_weight must be positive");
    }
    SplitMix64 rng(derive_seed(seed, 0x6772617068ULL));
    double const q = num_nodes > 1 ? std::clamp(avg_degree / static_cast<double>(num_nodes - 1), 0.0, 1.0) : 0.0;
    std::vector<std::pair<node_id, Edge>> arcs;
    arcs.reserve(static_cast<std::size_t>(avg_degree * static_cast<double>(num_nodes) * 1.1) + 16);
    auto const uniform01 = [&] { return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53; };
    double const log_miss = std::log1p(-q);
    std::size_t const candidates = num_nodes - 1;
    for (std::size_t u = 0; u < num_nodes && q > 0; ++u) {
        // Geometric skipping over the n - 1 possible targets.
        std::size_t i = 0;
        while (true) {
            if (q < 1.0) {
                double const skip = std::floor(std::log(uniform01()) / log_miss);
                if (skip >= static_cast<double>(candidates - i)) {
                    break;
                }
                i += static_cast<std::size_t>(skip);
            }
            if (i >= candidates) {
                break;
            }
            std::size_t const v = i < u ? i : i + 1;
            arcs.push_back({static_cast<node_id>(u), Edge{static_cast<node_id>(v), uniform_in(rng, 1, max_weight)}});
            ++i;
        }
    }
    return build_graph(num_nodes, arcs);
}

DijkstraResult dijkstra(Graph const& graph, node_id source) {
    if (source >= graph.num_nodes) {
        throw std::out_of_range("source node out of range");
    }
    DijkstraResult result;
    result.distances.assign(graph.num_nodes, unreachable);
    using Item = std::pair<distance_type, node_id>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    result.distances[source] = 0;
    queue.push({0, source});
    while (!queue.empty()) {
        auto const [d, u] = queue.top();
        queue.pop();
        if (d > result.distances[u]) {
            continue;
        }
        ++result.scanned;
        for (Edge const& e : graph.neighbors(u)) {
            distance_type const nd = d + e.weight;
            if (nd < result.distances[e.target]) {
                result.distances[e.target] = nd;
                queue.push({nd, e.target});
            }
        }
    }
    return result;
}

}  // namespace multiqueue::workloads
