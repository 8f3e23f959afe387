#include "multiqueue/quality/replay_tree.hpp"

#include <algorithm>
#include <string>

namespace multiqueue::quality {

namespace {

constexpr bool composite_less(Element const& a, Element const& b) noexcept {
    return a.key < b.key || (a.key == b.key && a.value < b.value);
}

std::string describe(Element const& e) {
    return "(key " + std::to_string(e.key) + ", value " + std::to_string(e.value) + ")";
}

}  // namespace

ReplayTree::ReplayTree(std::size_t fanout) : fanout_(fanout), min_fill_(fanout / 2) {
    if (fanout_ < 4) {
        throw std::invalid_argument("replay tree fanout must be at least 4");
    }
    root_ = allocate(true);
}

std::size_t ReplayTree::size() const noexcept {
    return nodes_[root_].size;
}

ReplayTree::NodeId ReplayTree::allocate(bool leaf) {
    NodeId id = 0;
    if (!free_.empty()) {
        id = free_.back();
        free_.pop_back();
        nodes_[id] = Node{};
    } else {
        id = static_cast<NodeId>(nodes_.size());
        nodes_.emplace_back();
    }
    Node& node = nodes_[id];
    node.leaf = leaf;
    if (leaf) {
        node.entries.reserve(fanout_ + 1);
    } else {
        node.children.reserve(fanout_ + 1);
        node.child_max.reserve(fanout_ + 1);
    }
    return id;
}

void ReplayTree::release(NodeId id) {
    nodes_[id] = Node{};
    free_.push_back(id);
}

Element ReplayTree::node_max(NodeId id) const {
    Node const& node = nodes_[id];
    return node.leaf ? node.entries.back().element : node.child_max.back();
}

// First child whose maximum is >= target, or the last child.
std::size_t ReplayTree::route(Node const& node, Element const& target) const {
    auto const it = std::lower_bound(node.child_max.begin(), node.child_max.end(), target, composite_less);
    auto const index = static_cast<std::size_t>(it - node.child_max.begin());
    return std::min(index, node.children.size() - 1);
}

void ReplayTree::push_down(NodeId id) {
    Node& node = nodes_[id];
    if (node.delay == 0) {
        return;
    }
    if (node.leaf) {
        for (Entry& entry : node.entries) {
            entry.delay += node.delay;
        }
    } else {
        for (NodeId child : node.children) {
            nodes_[child].delay += node.delay;
        }
    }
    node.delay = 0;
}

void ReplayTree::refresh_child(Node& parent, std::size_t index) {
    parent.child_max[index] = node_max(parent.children[index]);
}

void ReplayTree::insert(Element e) {
    if (insert_into(root_, e, 0) == Status::overflow) {
        NodeId const old_root = root_;
        NodeId const new_root = allocate(false);
        Node& top = nodes_[new_root];
        top.children.push_back(old_root);
        top.child_max.push_back(node_max(old_root));
        top.size = nodes_[old_root].size;
        root_ = new_root;
        split_child(new_root, 0);
    }
}

ReplayTree::Status ReplayTree::insert_into(NodeId id, Element e, std::int64_t path_sum) {
    path_sum += nodes_[id].delay;
    if (nodes_[id].leaf) {
        Node& node = nodes_[id];
        auto const it = std::lower_bound(node.entries.begin(), node.entries.end(), e,
                                         [](Entry const& a, Element const& b) { return composite_less(a.element, b); });
        if (it != node.entries.end() && it->element == e) {
            throw ReplayError("element " + describe(e) + " inserted twice");
        }
        node.entries.insert(it, Entry{e, -path_sum});
        ++node.size;
        return node.entries.size() > fanout_ ? Status::overflow : Status::ok;
    }
    std::size_t const index = route(nodes_[id], e);
    Status const child_status = insert_into(nodes_[id].children[index], e, path_sum);
    Node& node = nodes_[id];
    ++node.size;
    refresh_child(node, index);
    if (child_status == Status::overflow) {
        split_child(id, index);
    }
    return nodes_[id].children.size() > fanout_ ? Status::overflow : Status::ok;
}

// Splits an overfull child in halves. The new right sibling copies the
// child's delay counter, so path sums below both halves are unchanged.
void ReplayTree::split_child(NodeId parent, std::size_t index) {
    NodeId const left = nodes_[parent].children[index];
    NodeId const right = allocate(nodes_[left].leaf);
    Node& l = nodes_[left];
    Node& r = nodes_[right];
    r.delay = l.delay;
    if (l.leaf) {
        std::size_t const keep = l.entries.size() / 2;
        r.entries.assign(l.entries.begin() + static_cast<std::ptrdiff_t>(keep), l.entries.end());
        l.entries.resize(keep);
        l.size = l.entries.size();
        r.size = r.entries.size();
    } else {
        std::size_t const keep = l.children.size() / 2;
        r.children.assign(l.children.begin() + static_cast<std::ptrdiff_t>(keep), l.children.end());
        r.child_max.assign(l.child_max.begin() + static_cast<std::ptrdiff_t>(keep), l.child_max.end());
        l.children.resize(keep);
        l.child_max.resize(keep);
        r.size = 0;
        for (NodeId c : r.children) {
            r.size += nodes_[c].size;
        }
        l.size -= r.size;
    }
    Node& p = nodes_[parent];
    auto const pos = static_cast<std::ptrdiff_t>(index) + 1;
    p.children.insert(p.children.begin() + pos, right);
    p.child_max.insert(p.child_max.begin() + pos, node_max(right));
    refresh_child(p, index);
}

ReplayTree::DeletionResult ReplayTree::erase(Element e) {
    std::uint64_t const rank = count_less(e.key);
    std::int64_t delay = 0;
    erase_from(root_, e, 0, delay);
    Node& root = nodes_[root_];
    if (!root.leaf && root.children.size() == 1) {
        NodeId const child = root.children.front();
        nodes_[child].delay += root.delay;
        release(root_);
        root_ = child;
    }
    add_delay_below(e.key, 1);
    return {rank, static_cast<std::uint64_t>(delay)};
}

ReplayTree::Status ReplayTree::erase_from(NodeId id, Element e, std::int64_t path_sum, std::int64_t& delay) {
    path_sum += nodes_[id].delay;
    if (nodes_[id].leaf) {
        Node& node = nodes_[id];
        auto const it = std::lower_bound(node.entries.begin(), node.entries.end(), e,
                                         [](Entry const& a, Element const& b) { return composite_less(a.element, b); });
        if (it == node.entries.end() || !(it->element == e)) {
            throw ReplayError("element " + describe(e) + " is not present");
        }
        delay = path_sum + it->delay;
        node.entries.erase(it);
        --node.size;
        return node.entries.size() < min_fill_ ? Status::underflow : Status::ok;
    }
    std::size_t const index = route(nodes_[id], e);
    Status const child_status = erase_from(nodes_[id].children[index], e, path_sum, delay);
    --nodes_[id].size;
    if (child_status == Status::underflow) {
        fix_underflow(id, index);
    } else {
        refresh_child(nodes_[id], index);
    }
    return nodes_[id].children.size() < min_fill_ ? Status::underflow : Status::ok;
}

// Rebalances an underfull child by borrowing from or merging with a sibling.
// Both nodes touched have their counters pushed to their children first.
void ReplayTree::fix_underflow(NodeId parent, std::size_t index) {
    std::size_t const child_count = nodes_[parent].children.size();
    if (child_count == 1) {
        // Only possible directly below the root; the root collapses later.
        if (nodes_[nodes_[parent].children[0]].size > 0) {
            refresh_child(nodes_[parent], 0);
        }
        return;
    }
    std::size_t const left_index = index > 0 ? index - 1 : index;
    std::size_t const right_index = left_index + 1;
    NodeId const left = nodes_[parent].children[left_index];
    NodeId const right = nodes_[parent].children[right_index];
    push_down(left);
    push_down(right);
    Node& l = nodes_[left];
    Node& r = nodes_[right];
    std::size_t const left_count = l.leaf ? l.entries.size() : l.children.size();
    std::size_t const right_count = r.leaf ? r.entries.size() : r.children.size();

    if (left_count + right_count <= fanout_) {
        if (l.leaf) {
            l.entries.insert(l.entries.end(), r.entries.begin(), r.entries.end());
        } else {
            l.children.insert(l.children.end(), r.children.begin(), r.children.end());
            l.child_max.insert(l.child_max.end(), r.child_max.begin(), r.child_max.end());
        }
        l.size += r.size;
        release(right);
        Node& p = nodes_[parent];
        p.children.erase(p.children.begin() + static_cast<std::ptrdiff_t>(right_index));
        p.child_max.erase(p.child_max.begin() + static_cast<std::ptrdiff_t>(right_index));
        refresh_child(p, left_index);
        return;
    }

    // Borrow one item towards the underfull side.
    bool const left_is_short = left_count < right_count;
    if (l.leaf) {
        if (left_is_short) {
            l.entries.push_back(r.entries.front());
            r.entries.erase(r.entries.begin());
        } else {
            r.entries.insert(r.entries.begin(), l.entries.back());
            l.entries.pop_back();
        }
        l.size = l.entries.size();
        r.size = r.entries.size();
    } else {
        if (left_is_short) {
            NodeId const moved = r.children.front();
            std::size_t const moved_size = nodes_[moved].size;
            l.children.push_back(moved);
            l.child_max.push_back(r.child_max.front());
            r.children.erase(r.children.begin());
            r.child_max.erase(r.child_max.begin());
            l.size += moved_size;
            r.size -= moved_size;
        } else {
            NodeId const moved = l.children.back();
            std::size_t const moved_size = nodes_[moved].size;
            r.children.insert(r.children.begin(), moved);
            r.child_max.insert(r.child_max.begin(), l.child_max.back());
            l.children.pop_back();
            l.child_max.pop_back();
            l.size -= moved_size;
            r.size += moved_size;
        }
    }
    Node& p = nodes_[parent];
    refresh_child(p, left_index);
    refresh_child(p, right_index);
}

std::uint64_t ReplayTree::fail_deletion() {
    std::uint64_t const rank = size();
    if (rank > 0) {
        nodes_[root_].delay += 1;
    }
    return rank;
}

std::size_t ReplayTree::count_less(key_type key) const {
    Element const target{key, 0};
    std::size_t count = 0;
    NodeId id = root_;
    while (true) {
        ++rank_visits_;
        Node const& node = nodes_[id];
        if (node.leaf) {
            auto const it = std::lower_bound(node.entries.begin(), node.entries.end(), key,
                                             [](Entry const& a, key_type k) { return a.element.key < k; });
            return count + static_cast<std::size_t>(it - node.entries.begin());
        }
        std::size_t const index = route(node, target);
        for (std::size_t i = 0; i < index; ++i) {
            count += nodes_[node.children[i]].size;
        }
        id = node.children[index];
    }
}

std::uint64_t ReplayTree::delay_of(Element e) const {
    std::int64_t sum = 0;
    NodeId id = root_;
    while (true) {
        Node const& node = nodes_[id];
        sum += node.delay;
        if (node.leaf) {
            auto const it = std::lower_bound(node.entries.begin(), node.entries.end(), e,
                                             [](Entry const& a, Element const& b) { return composite_less(a.element, b); });
            if (it == node.entries.end() || !(it->element == e)) {
                throw ReplayError("element " + describe(e) + " is not present");
            }
            return static_cast<std::uint64_t>(sum + it->delay);
        }
        id = node.children[route(node, e)];
    }
}

void ReplayTree::add_delay_below(key_type key, std::int64_t amount) {
    Element const target{key, 0};
    NodeId id = root_;
    if (nodes_[id].size == 0) {
        return;
    }
    if (composite_less(node_max(id), target)) {
        nodes_[id].delay += amount;
        return;
    }
    // Invariant: the current node holds some element with key >= `key`.
    while (true) {
        Node& node = nodes_[id];
        if (node.leaf) {
            for (Entry& entry : node.entries) {
                if (!(entry.element.key < key)) {
                    break;
                }
                entry.delay += amount;
            }
            return;
        }
        std::size_t i = 0;
        while (composite_less(node.child_max[i], target)) {
            nodes_[node.children[i]].delay += amount;
            ++i;
        }
        id = node.children[i];
    }
}

std::size_t ReplayTree::height() const noexcept {
    std::size_t h = 1;
    NodeId id = root_;
    while (!nodes_[id].leaf) {
        id = nodes_[id].children.front();
        ++h;
    }
    return h;
}

std::vector<ReplayTree::Entry> ReplayTree::audit() const {
    std::vector<Entry> out;
    out.reserve(size());
    std::size_t leaf_depth = 0;
    audit_node(root_, 0, true, out, leaf_depth, 1);
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (!composite_less(out[i - 1].element, out[i].element)) {
            throw ReplayError("audit: elements out of order");
        }
    }
    if (out.size() != size()) {
        throw ReplayError("audit: root size mismatch");
    }
    return out;
}

void ReplayTree::audit_node(NodeId id, std::int64_t path_sum, bool is_root, std::vector<Entry>& out,
                            std::size_t& depth_out, std::size_t depth) const {
    Node const& node = nodes_[id];
    path_sum += node.delay;
    std::size_t const fill = node.leaf ? node.entries.size() : node.children.size();
    if (fill > fanout_ || (!is_root && fill < min_fill_) || (!node.leaf && fill == 0)) {
        throw ReplayError("audit: node fill " + std::to_string(fill) + " out of bounds");
    }
    if (node.leaf) {
        if (depth_out != 0 && depth_out != depth) {
            throw ReplayError("audit: leaves at different depths");
        }
        depth_out = depth;
        if (node.size != node.entries.size()) {
            throw ReplayError("audit: leaf size mismatch");
        }
        for (Entry const& entry : node.entries) {
            if (path_sum + entry.delay < 0) {
                throw ReplayError("audit: negative delay");
            }
            out.push_back(Entry{entry.element, path_sum + entry.delay});
        }
        return;
    }
    std::size_t total = 0;
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        std::size_t const before = out.size();
        audit_node(node.children[i], path_sum, false, out, depth_out, depth + 1);
        total += nodes_[node.children[i]].size;
        if (out.size() == before || !(out.back().element == node.child_max[i])) {
            throw ReplayError("audit: stale child maximum");
        }
    }
    if (total != node.size) {
        throw ReplayError("audit: inner size mismatch");
    }
}

}  // namespace multiqueue::quality
