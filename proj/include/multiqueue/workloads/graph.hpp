#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace multiqueue::workloads {

using node_id = std::uint32_t;
using weight_type = std::uint64_t;
using distance_type = std::uint64_t;

inline constexpr distance_type unreachable = std::numeric_limits<distance_type>::max();

struct Edge {
    node_id target;
    weight_type weight;

    bool operator==(Edge const&) const = default;
};

// Directed graph in compressed sparse rows.
struct Graph {
    std::size_t num_nodes = 0;
    std::vector<std::size_t> offsets{0};  // num_nodes + 1 entries
    std::vector<Edge> edges;

    [[nodiscard]] std::size_t num_edges() const noexcept {
        return edges.size();
    }
    [[nodiscard]] std::span<Edge const> neighbors(node_id u) const noexcept {
        return {edges.data() + offsets[u], edges.data() + offsets[u + 1]};
    }

    bool operator==(Graph const&) const = default;
};

class GraphParseError : public std::runtime_error {
   public:
    GraphParseError(std::size_t line, std::string const& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {
    }
    [[nodiscard]] std::size_t line() const noexcept {
        return line_;
    }

   private:
    std::size_t line_;
};

// Builds CSR from an arc list; arcs of one source keep their input order.
Graph build_graph(std::size_t num_nodes, std::span<std::pair<node_id, Edge> const> arcs);

// DIMACS shortest-path format: `c` comments, one `p sp <n> <m>` line, then
// `a <u> <v> <w>` arcs with 1-based ids. Duplicate arcs are kept.
Graph parse_dimacs_gr(std::string_view text);
Graph read_dimacs_gr(std::istream& in);
Graph read_dimacs_gr_file(std::string const& path);

void write_dimacs_gr(std::ostream& out, Graph const& graph);

// Directed Gilbert graph: each ordered pair (u, v), u != v, is an arc with
// probability avg_degree / (n - 1); weights uniform in [1, max_weight].
Graph generate_random_graph(std::size_t num_nodes, double avg_degree, weight_type max_weight, std::uint64_t seed);

struct DijkstraResult {
    std::vector<distance_type> distances;
    std::uint64_t scanned = 0;  // settled nodes
};

DijkstraResult dijkstra(Graph const& graph, node_id source);

}  // namespace multiqueue::workloads
