#pragma once

#include "multiqueue/element.hpp"

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace multiqueue::quality {

class ReplayError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// Ordered multiway tree (B+-tree layout: elements live in leaves) keyed by
// (key, value). Every node stores its subtree size and a lazy delay counter;
// the delay of an element is the sum of the counters on its root-to-leaf path
// plus its own entry counter. A fresh element starts with the negated path sum,
// i.e. delay 0. Structural changes keep every element's path sum unchanged.
class ReplayTree {
   public:
    struct Entry {
        Element element;
        std::int64_t delay = 0;
    };

    struct DeletionResult {
        std::uint64_t rank_error;
        std::uint64_t delay;
    };

    explicit ReplayTree(std::size_t fanout = 16);

    [[nodiscard]] std::size_t size() const noexcept;
    [[nodiscard]] bool empty() const noexcept {
        return size() == 0;
    }
    [[nodiscard]] std::size_t fanout() const noexcept {
        return fanout_;
    }

    // Throws ReplayError if an element with the same (key, value) is present.
    void insert(Element e);

    // Removes `e` and reports its rank error (alive elements with a strictly
    // smaller key) and accumulated delay; then every remaining element with a
    // smaller key is delayed by one. Throws ReplayError if `e` is absent.
    DeletionResult erase(Element e);

    // A failed deletion: rank error equals the current size and every alive
    // element is delayed by one. Returns that rank error.
    std::uint64_t fail_deletion();

    // Number of alive elements with key < `key`.
    [[nodiscard]] std::size_t count_less(key_type key) const;

    // Current delay of a present element, or ReplayError.
    [[nodiscard]] std::uint64_t delay_of(Element e) const;

    // Adds `amount` to the delay of every element with key < `key`, placing
    // the increments on the highest nodes that are fully covered.
    void add_delay_below(key_type key, std::int64_t amount);

    // Elements in order with their current delays; throws ReplayError on any
    // broken structural invariant (sizes, ordering, separators, fill).
    [[nodiscard]] std::vector<Entry> audit() const;

    [[nodiscard]] std::size_t height() const noexcept;

    // Nodes touched by count_less since construction (instrumentation).
    [[nodiscard]] std::uint64_t rank_query_node_visits() const noexcept {
        return rank_visits_;
    }

   private:
    using NodeId = std::uint32_t;

    struct Node {
        bool leaf = true;
        std::int64_t delay = 0;
        std::size_t size = 0;
        std::vector<Element> child_max;  // inner: max (key, value) below each child
        std::vector<NodeId> children;    // inner
        std::vector<Entry> entries;      // leaf
    };

    enum class Status { ok, overflow, underflow };

    NodeId allocate(bool leaf);
    void release(NodeId id);

    [[nodiscard]] Element node_max(NodeId id) const;
    [[nodiscard]] std::size_t route(Node const& node, Element const& target) const;
    void push_down(NodeId id);

    Status insert_into(NodeId id, Element e, std::int64_t path_sum);
    Status erase_from(NodeId id, Element e, std::int64_t path_sum, std::int64_t& delay);
    void split_child(NodeId parent, std::size_t index);
    void fix_underflow(NodeId parent, std::size_t index);
    void refresh_child(Node& parent, std::size_t index);

    void audit_node(NodeId id, std::int64_t path_sum, bool is_root, std::vector<Entry>& out,
                    std::size_t& depth_out, std::size_t depth) const;

    std::size_t fanout_;
    std::size_t min_fill_;
    std::vector<Node> nodes_;
    std::vector<NodeId> free_;
    NodeId root_;
    mutable std::uint64_t rank_visits_ = 0;
};

}  // namespace multiqueue::quality
