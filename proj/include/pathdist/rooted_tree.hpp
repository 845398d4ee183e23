#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pathdist/tree.hpp"

namespace pathdist {

/*
 * A binary phylogeny rooted at a leaf taxon.
 *
 * Vertices are renumbered in depth-first preorder from the root taxon, so the
 * root is vertex 0, its unique neighbour is vertex 1, and every subtree is a
 * contiguous id range [v, subtree_end(v)). Each non-root vertex v owns the
 * edge to its parent; that edge has id v - 1. Edge 0 is therefore the root
 * edge, the unique maximal edge under the "lies below" order.
 */
class RootedTree {
public:
    static constexpr VertexId kRoot = 0;

    RootedTree() = default;

    RootedTree(const UnrootedTree& tree, VertexId root_leaf) {
        if (root_leaf < 0 || root_leaf >= tree.vertex_count() || !tree.is_leaf(root_leaf)) {
            throw TreeError("root must be a leaf vertex");
        }
        const int vertices = tree.vertex_count();
        parent_.assign(vertices, -1);
        children_.assign(vertices, {-1, -1});
        child_count_.assign(vertices, 0);
        length_.assign(vertices, 0.0);
        leaves_below_.assign(vertices, 0);
        subtree_end_.assign(vertices, 0);
        taxon_.assign(vertices, -1);
        source_vertex_.assign(vertices, -1);
        source_edge_.assign(vertices, -1);
        leaf_count_ = tree.leaf_count();
        taxa_ = tree.sorted_taxa();
        vertex_of_taxon_.assign(taxa_.size(), -1);

        // Preorder: children are visited in the order of the source adjacency lists.
        struct Frame {
            VertexId source;
            EdgeId via;
            VertexId id;
            std::size_t next = 0;
        };
        std::vector<Frame> stack;
        VertexId next_id = 0;
        auto enter = [&](VertexId source, EdgeId via, VertexId parent_id) {
            const VertexId id = next_id++;
            source_vertex_[id] = source;
            taxon_[id] = tree.taxon_of(source);
            if (taxon_[id] >= 0) {
                vertex_of_taxon_[taxon_[id]] = id;
            }
            parent_[id] = parent_id;
            if (parent_id >= 0) {
                source_edge_[id] = via;
                length_[id] = tree.edge(via).length;
                children_[parent_id][child_count_[parent_id]++] = id;
            }
            stack.push_back({source, via, id});
        };
        enter(root_leaf, -1, -1);
        while (!stack.empty()) {
            Frame& frame = stack.back();
            const auto& incident = tree.incident(frame.source);
            if (frame.next < incident.size() && incident[frame.next] == frame.via) {
                ++frame.next;
            }
            if (frame.next < incident.size()) {
                const EdgeId e = incident[frame.next++];
                const VertexId parent_id = frame.id;
                enter(tree.edge(e).other(frame.source), e, parent_id);
                continue;
            }
            subtree_end_[frame.id] = next_id;
            stack.pop_back();
        }

        // Children have larger ids than parents, so a reverse sweep is a post-order.
        for (VertexId v = vertices - 1; v > kRoot; --v) {
            if (child_count_[v] == 0) {
                leaves_below_[v] = 1;
            } else {
                leaves_below_[v] = leaves_below_[children_[v][0]] + leaves_below_[children_[v][1]];
                // Small child first; ties keep the smaller (earlier visited) id first.
                if (leaves_below_[children_[v][1]] < leaves_below_[children_[v][0]]) {
                    std::swap(children_[v][0], children_[v][1]);
                }
            }
        }
        leaves_below_[kRoot] = leaves_below_[1];
    }

    int vertex_count() const { return static_cast<int>(parent_.size()); }
    int edge_count() const { return vertex_count() - 1; }
    int leaf_count() const { return leaf_count_; }

    VertexId parent(VertexId v) const { return parent_[v]; }
    bool is_leaf(VertexId v) const { return v != kRoot && child_count_[v] == 0; }
    /// True for the root taxon and every other leaf.
    bool is_taxon(VertexId v) const { return taxon_[v] >= 0; }
    int child_count(VertexId v) const { return child_count_[v]; }
    VertexId small_child(VertexId v) const { return children_[v][0]; }
    VertexId large_child(VertexId v) const { return children_[v][1]; }
    const std::array<VertexId, 2>& children(VertexId v) const { return children_[v]; }

    /// Number of non-root leaves in the subtree of v.
    int leaves_below(VertexId v) const { return leaves_below_[v]; }
    VertexId subtree_end(VertexId v) const { return subtree_end_[v]; }

    // Edge views. Edge e joins child vertex e + 1 to its parent.
    static VertexId child_vertex(EdgeId e) { return e + 1; }
    static EdgeId edge_above(VertexId v) { return v - 1; }
    VertexId parent_vertex(EdgeId e) const { return parent_[e + 1]; }
    double length(EdgeId e) const { return length_[e + 1]; }
    /// Number of leaves whose path to the root crosses e.
    int leaves_through(EdgeId e) const { return leaves_below_[e + 1]; }
    bool is_external(EdgeId e) const { return child_count_[e + 1] == 0; }
    EdgeId left_child_edge(EdgeId e) const { return children_[e + 1][0] - 1; }
    EdgeId right_child_edge(EdgeId e) const { return children_[e + 1][1] - 1; }

    /// Vertices adjacent to v, parent first.
    std::vector<VertexId> neighbours(VertexId v) const {
        std::vector<VertexId> out;
        if (parent_[v] >= 0) {
            out.push_back(parent_[v]);
        }
        for (int i = 0; i < child_count_[v]; ++i) {
            out.push_back(children_[v][i]);
        }
        return out;
    }
    int degree(VertexId v) const { return child_count_[v] + (parent_[v] >= 0 ? 1 : 0); }

    /// Edges incident to v, parent edge first.
    std::vector<EdgeId> incident_edges(VertexId v) const {
        std::vector<EdgeId> out;
        if (parent_[v] >= 0) {
            out.push_back(edge_above(v));
        }
        for (int i = 0; i < child_count_[v]; ++i) {
            out.push_back(edge_above(children_[v][i]));
        }
        return out;
    }

    int taxon(VertexId v) const { return taxon_[v]; }
    VertexId vertex_of_taxon(int taxon) const { return vertex_of_taxon_[taxon]; }
    const std::vector<std::string>& taxa() const { return taxa_; }
    const std::string& root_label() const { return taxa_[taxon_[kRoot]]; }

    VertexId source_vertex(VertexId v) const { return source_vertex_[v]; }
    EdgeId source_edge(EdgeId e) const { return source_edge_[e + 1]; }

private:
    std::vector<VertexId> parent_;
    std::vector<std::array<VertexId, 2>> children_;
    std::vector<int> child_count_;
    std::vector<double> length_;
    std::vector<int> leaves_below_;
    std::vector<VertexId> subtree_end_;
    std::vector<int> taxon_;
    std::vector<VertexId> vertex_of_taxon_;
    std::vector<VertexId> source_vertex_;
    std::vector<EdgeId> source_edge_;
    std::vector<std::string> taxa_;
    int leaf_count_ = 0;
};

inline RootedTree root_at_taxon(const UnrootedTree& tree, std::string_view taxon) {
    const VertexId leaf = tree.find_leaf(taxon);
    if (leaf < 0) {
        throw TreeError("unknown taxon '" + std::string(taxon) + "'");
    }
    return RootedTree(tree, leaf);
}

/// Raised when two trees are not on the same taxon set.
class TaxonMismatchError : public TreeError {
public:
    TaxonMismatchError(std::vector<std::string> only_first, std::vector<std::string> only_second)
        : TreeError(describe(only_first, only_second)),
          only_first_(std::move(only_first)),
          only_second_(std::move(only_second)) {}

    const std::vector<std::string>& only_in_first() const { return only_first_; }
    const std::vector<std::string>& only_in_second() const { return only_second_; }

private:
    static std::string describe(const std::vector<std::string>& a,
                                const std::vector<std::string>& b) {
        std::vector<std::string> all(a);
        all.insert(all.end(), b.begin(), b.end());
        std::sort(all.begin(), all.end());
        std::string out = "taxon sets differ; symmetric difference {";
        for (std::size_t i = 0; i < all.size(); ++i) {
            out += (i ? "," : "") + all[i];
        }
        return out + "}";
    }

    std::vector<std::string> only_first_;
    std::vector<std::string> only_second_;
};

/// Two trees on the same taxa, both rooted at the lexicographically smallest taxon.
struct ValidatedPair {
    UnrootedTree first_tree;
    UnrootedTree second_tree;
    RootedTree first;
    RootedTree second;

    int leaf_count() const { return first.leaf_count(); }
    const std::vector<std::string>& taxa() const { return first.taxa(); }
};

inline ValidatedPair validate_pair(UnrootedTree t1, UnrootedTree t2) {
    const auto& a = t1.sorted_taxa();
    const auto& b = t2.sorted_taxa();
    if (a != b) {
        std::vector<std::string> only_a;
        std::vector<std::string> only_b;
        std::size_t i = 0;
        std::size_t j = 0;
        while (i < a.size() || j < b.size()) {
            if (j == b.size() || (i < a.size() && a[i] < b[j])) {
                only_a.push_back(a[i++]);
            } else if (i == a.size() || b[j] < a[i]) {
                only_b.push_back(b[j++]);
            } else {
                ++i;
                ++j;
            }
        }
        throw TaxonMismatchError(std::move(only_a), std::move(only_b));
    }
    ValidatedPair pair;
    pair.first = root_at_taxon(t1, a.front());
    pair.second = root_at_taxon(t2, a.front());
    pair.first_tree = std::move(t1);
    pair.second_tree = std::move(t2);
    return pair;
}

}  // namespace pathdist
