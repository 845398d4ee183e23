#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pathdist {

using VertexId = int;
using EdgeId = int;

/// Raised when a tree violates the binary phylogeny invariants.
class TreeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Edge {
    VertexId u = -1;
    VertexId v = -1;
    double length = 0.0;

    VertexId other(VertexId w) const { return w == u ? v : u; }
};

inline bool is_valid_taxon_label(std::string_view label) {
    if (label.empty()) {
        return false;
    }
    return std::all_of(label.begin(), label.end(), [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
               c == '_' || c == '.' || c == '-';
    });
}

/*
 * An unrooted binary phylogenetic tree with branch lengths.
 *
 * Leaves carry unique taxon labels; internal vertices carry an empty label.
 * Every internal vertex has degree three, so a tree on n >= 3 taxa has
 * 2n-2 vertices and 2n-3 edges. The two-taxon tree is a single edge.
 */
class UnrootedTree {
public:
    UnrootedTree() = default;

    /// Builds and validates a tree. `labels[v]` is empty for internal vertices.
    UnrootedTree(std::vector<std::string> labels, std::vector<Edge> edges)
        : labels_(std::move(labels)), edges_(std::move(edges)) {
        adjacency_.assign(labels_.size(), {});
        for (EdgeId e = 0; e < static_cast<EdgeId>(edges_.size()); ++e) {
            const Edge& edge = edges_[e];
            if (edge.u < 0 || edge.v < 0 || edge.u >= vertex_count() || edge.v >= vertex_count() ||
                edge.u == edge.v) {
                throw TreeError("edge " + std::to_string(e) + " has invalid endpoints");
            }
            adjacency_[edge.u].push_back(e);
            adjacency_[edge.v].push_back(e);
        }
        validate();
    }

    int vertex_count() const { return static_cast<int>(labels_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    int leaf_count() const { return static_cast<int>(leaf_by_label_.size()); }

    const Edge& edge(EdgeId e) const { return edges_[e]; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<EdgeId>& incident(VertexId v) const { return adjacency_[v]; }
    int degree(VertexId v) const { return static_cast<int>(adjacency_[v].size()); }
    bool is_leaf(VertexId v) const { return adjacency_[v].size() == 1; }
    const std::string& label(VertexId v) const { return labels_[v]; }

    VertexId find_leaf(std::string_view label) const {
        auto it = leaf_by_label_.find(std::string(label));
        return it == leaf_by_label_.end() ? -1 : it->second;
    }

    /// Taxon labels in lexicographic order. A taxon's position here is its taxon id.
    const std::vector<std::string>& sorted_taxa() const { return sorted_taxa_; }

    /// Taxon id (rank in sorted_taxa) of a leaf vertex, -1 for internal vertices.
    int taxon_of(VertexId v) const { return taxon_of_vertex_[v]; }
    VertexId leaf_of_taxon(int taxon) const { return leaf_of_taxon_[taxon]; }

private:
    void validate() {
        const int vertices = vertex_count();
        if (vertices < 2) {
            throw TreeError("a tree needs at least two taxa");
        }
        if (edge_count() != vertices - 1) {
            throw TreeError("a tree on " + std::to_string(vertices) + " vertices needs " +
                            std::to_string(vertices - 1) + " edges, got " +
                            std::to_string(edge_count()));
        }
        for (EdgeId e = 0; e < edge_count(); ++e) {
            const double len = edges_[e].length;
            if (!std::isfinite(len) || len < 0.0) {
                throw TreeError("edge " + std::to_string(e) + " has invalid length " +
                                std::to_string(len));
            }
        }

        // Connectivity; with |E| = |V|-1 this also rules out cycles.
        std::vector<char> seen(vertices, 0);
        std::vector<VertexId> stack{0};
        seen[0] = 1;
        int reached = 1;
        while (!stack.empty()) {
            const VertexId v = stack.back();
            stack.pop_back();
            for (EdgeId e : adjacency_[v]) {
                const VertexId w = edges_[e].other(v);
                if (!seen[w]) {
                    seen[w] = 1;
                    ++reached;
                    stack.push_back(w);
                }
            }
        }
        if (reached != vertices) {
            throw TreeError("tree is disconnected");
        }

        leaf_by_label_.clear();
        for (VertexId v = 0; v < vertices; ++v) {
            const int deg = degree(v);
            if (deg == 1) {
                if (!is_valid_taxon_label(labels_[v])) {
                    throw TreeError("leaf vertex " + std::to_string(v) + " has invalid label '" +
                                    labels_[v] + "'");
                }
                if (!leaf_by_label_.emplace(labels_[v], v).second) {
                    throw TreeError("duplicate taxon label '" + labels_[v] + "'");
                }
            } else if (deg != 3) {
                throw TreeError("vertex " + std::to_string(v) + " has degree " +
                                std::to_string(deg) + "; trees must be binary");
            } else {
                labels_[v].clear();
            }
        }

        sorted_taxa_.clear();
        for (const auto& [label, v] : leaf_by_label_) {
            sorted_taxa_.push_back(label);
        }
        std::sort(sorted_taxa_.begin(), sorted_taxa_.end());
        taxon_of_vertex_.assign(vertices, -1);
        leaf_of_taxon_.assign(sorted_taxa_.size(), -1);
        for (int t = 0; t < static_cast<int>(sorted_taxa_.size()); ++t) {
            const VertexId v = leaf_by_label_.at(sorted_taxa_[t]);
            taxon_of_vertex_[v] = t;
            leaf_of_taxon_[t] = v;
        }
    }

    std::vector<std::string> labels_;
    std::vector<Edge> edges_;
    std::vector<std::vector<EdgeId>> adjacency_;
    std::unordered_map<std::string, VertexId> leaf_by_label_;
    std::vector<std::string> sorted_taxa_;
    std::vector<int> taxon_of_vertex_;
    std::vector<VertexId> leaf_of_taxon_;
};

}  // namespace pathdist
