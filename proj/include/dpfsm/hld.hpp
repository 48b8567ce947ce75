#pragma once

#include <cstdint>
#include <vector>

#include "dpfsm/base.hpp"
#include "dpfsm/suffix_index.hpp"

namespace dpfsm {

// Heavy-light decomposition of a frequency-annotated candidate trie. Every
// bit-level position, including virtual positions inside compressed edges,
// belongs to exactly one heavy path with a designated head; an edge and its
// lower node are always on the same path, so per-node data suffices.
// Immutable after decompose.
class HeavyPathDecomposition {
public:
    static HeavyPathDecomposition decompose(const SuffixIndex& tree) {
        HeavyPathDecomposition d;
        const auto m = static_cast<std::size_t>(tree.node_count());
        d.subtree_nodes_.assign(m, 1);
        for (std::size_t v = m; v-- > 1;)
            d.subtree_nodes_[static_cast<std::size_t>(tree.parent(static_cast<std::int32_t>(v)))] +=
                d.subtree_nodes_[v];

        // Heavy child: largest refined-subtree node count; the sibling chain
        // is sorted by first symbol, so a strict max keeps the smallest one.
        d.heavy_child_.assign(m, -1);
        for (std::size_t v = 0; v < m; ++v) {
            std::int64_t best = -1;
            for (std::int32_t c = tree.first_child(static_cast<std::int32_t>(v)); c != -1;
                 c = tree.next_sibling(c)) {
                if (d.subtree_nodes_[static_cast<std::size_t>(c)] > best) {
                    best = d.subtree_nodes_[static_cast<std::size_t>(c)];
                    d.heavy_child_[v] = c;
                }
            }
        }

        d.path_head_.assign(m, 0);
        for (std::size_t v = 1; v < m; ++v) {
            std::int32_t p = tree.parent(static_cast<std::int32_t>(v));
            d.path_head_[v] = d.heavy_child_[static_cast<std::size_t>(p)] ==
                                      static_cast<std::int32_t>(v)
                                  ? d.path_head_[static_cast<std::size_t>(p)]
                                  : static_cast<std::int32_t>(v);
        }

        d.path_bits_.assign(m, 0);
        for (std::size_t v = 0; v < m; ++v) {
            if (d.path_head_[v] != static_cast<std::int32_t>(v)) continue;
            d.heads_.push_back(static_cast<std::int32_t>(v));
            std::int32_t tail = static_cast<std::int32_t>(v);
            while (d.heavy_child_[static_cast<std::size_t>(tail)] != -1)
                tail = d.heavy_child_[static_cast<std::size_t>(tail)];
            std::int64_t head_depth =
                v == 0 ? 0 : tree.string_depth(tree.parent(static_cast<std::int32_t>(v))) + 1;
            d.path_bits_[v] = tree.string_depth(tail) - head_depth + 1;
        }
        return d;
    }

    std::int64_t node_count() const { return static_cast<std::int64_t>(path_head_.size()); }
    std::int32_t heavy_child(std::int32_t v) const { return heavy_child_[static_cast<std::size_t>(v)]; }
    std::int64_t subtree_node_count(std::int32_t v) const {
        return subtree_nodes_[static_cast<std::size_t>(v)];
    }
    const std::vector<std::int32_t>& heads() const { return heads_; }

    // Head node of the heavy path containing `v` (and its incoming edge).
    std::int32_t path_head_node(std::int32_t v) const { return path_head_[static_cast<std::size_t>(v)]; }

    // Number of bit positions on the path headed at `head` (head position
    // through the end of its heavy chain).
    std::int64_t path_length_bits(std::int32_t head) const {
        return path_bits_[static_cast<std::size_t>(head)];
    }

    // The head position of the path containing `loc`: the first bit position
    // after the light branch (mid-edge when the incoming edge is longer than
    // one symbol), or the root.
    Locus head_of(const SuffixIndex& tree, const Locus& loc) const {
        std::int32_t h = path_head_[static_cast<std::size_t>(loc.node)];
        if (h == 0) return tree.root_locus();
        std::int32_t off = tree.edge_length(h) > 1 ? 1 : 0;
        return Locus{h, off, tree.string_depth(tree.parent(h)) + 1};
    }

    bool is_path_start(const SuffixIndex& tree, const Locus& loc) const {
        if (loc.node == 0) return loc.offset == 0;
        if (path_head_[static_cast<std::size_t>(loc.node)] != loc.node) return false;
        return loc.offset == (tree.edge_length(loc.node) > 1 ? 1 : 0);
    }

    // Light edges entered on the walk from the root down to `v`.
    std::int64_t light_edges_to(const SuffixIndex& tree, std::int32_t v) const {
        std::int64_t crossings = 0;
        while (v > 0) {
            std::int32_t h = path_head_[static_cast<std::size_t>(v)];
            if (h == 0) break;  // joined the root's heavy path
            ++crossings;        // the edge into a non-root head is light
            v = tree.parent(h);
        }
        return crossings;
    }

private:
    HeavyPathDecomposition() = default;
    std::vector<std::int64_t> subtree_nodes_;
    std::vector<std::int32_t> heavy_child_;
    std::vector<std::int32_t> path_head_;
    std::vector<std::int64_t> path_bits_;
    std::vector<std::int32_t> heads_;
};

}  // namespace dpfsm
