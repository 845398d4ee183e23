#pragma once

// Brute-force views of a decorated decomposition, shared by the unit and
// acceptance suites.

#include <algorithm>
#include <array>
#include <numeric>
#include <vector>

#include "pathdist/pathdist.hpp"

namespace pathdist::test {

/// Edge holding the leaf of `taxon` (edge 0 for the root taxon).
inline EdgeId pendant_edge(const RootedTree& tree, int taxon) {
    const VertexId v = tree.vertex_of_taxon(taxon);
    return v == RootedTree::kRoot ? 0 : RootedTree::edge_above(v);
}

/// Edges covered by a decomposition node.
inline std::vector<char> covered_edges(const SegmentDecomposition& td, int node, int edge_count) {
    std::vector<char> in(edge_count, 0);
    std::vector<int> stack{node};
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        const DecompositionNode& d = td.nodes[v];
        if (d.is_leaf()) {
            in[d.edge] = 1;
        } else {
            stack.push_back(d.left);
            stack.push_back(d.right);
        }
    }
    return in;
}

/// Bichromatic taxon pairs separated by edge e.
inline long long separated_bichromatic(const RootedTree& tree, const Colouring& colouring, EdgeId e) {
    const VertexId child = RootedTree::child_vertex(e);
    long long black_in = 0;
    long long white_in = 0;
    for (VertexId x = child; x < tree.subtree_end(child); ++x) {
        if (tree.is_taxon(x)) {
            (colouring[tree.taxon(x)] == Colour::black ? black_in : white_in) += 1;
        }
    }
    const long long black_out = colouring.black_count() - black_in;
    const long long white_out = colouring.white_count() - white_in;
    return black_in * white_out + white_in * black_out;
}

struct NodeOracle {
    long long black = 0;
    long long white = 0;
    /// Outside colour counts in the polynomial's variable order.
    std::vector<double> outside;
    /// Sum over covered edges of length times separated bichromatic pairs.
    double weighted_chi = 0.0;
};

/*
 * Recounts a non-root node from scratch: its own leaf colours, the colour
 * counts of outside taxa grouped by the boundary vertex they reach first, and
 * the weighted bichromatic sum over its edges.
 */
inline NodeOracle node_oracle(const RootedTree& tree, const SegmentDecomposition& td, int node,
                              const Colouring& colouring) {
    const int edges = tree.edge_count();
    const std::vector<char> in = covered_edges(td, node, edges);
    const DecompositionNode& d = td.nodes[node];

    // Components of the forest left after deleting the covered edges.
    std::vector<int> component(tree.vertex_count());
    std::iota(component.begin(), component.end(), 0);
    auto find = [&](int v) {
        while (component[v] != v) {
            component[v] = component[component[v]];
            v = component[v];
        }
        return v;
    };
    for (EdgeId e = 0; e < edges; ++e) {
        if (!in[e]) {
            component[find(RootedTree::child_vertex(e))] = find(tree.parent_vertex(e));
        }
    }

    NodeOracle oracle;
    oracle.outside.assign(2 * d.degree, 0.0);
    for (int taxon = 0; taxon < tree.leaf_count(); ++taxon) {
        const bool black = colouring[taxon] == Colour::black;
        if (in[pendant_edge(tree, taxon)]) {
            (black ? oracle.black : oracle.white) += 1;
            continue;
        }
        const int c = find(tree.vertex_of_taxon(taxon));
        for (int slot = 0; slot < d.degree; ++slot) {
            if (find(d.boundary[slot]) == c) {
                oracle.outside[2 * slot + (black ? 0 : 1)] += 1.0;
            }
        }
    }
    for (EdgeId e = 0; e < edges; ++e) {
        if (in[e]) {
            oracle.weighted_chi += tree.length(e) * static_cast<double>(separated_bichromatic(tree, colouring, e));
        }
    }
    return oracle;
}

/// Pairs with the smaller id first, sorted.
inline std::vector<std::pair<int, int>> merge_pairs_normalised(std::vector<std::pair<int, int>> pairs) {
    for (auto& p : pairs) {
        if (p.second < p.first) {
            std::swap(p.first, p.second);
        }
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

}  // namespace pathdist::test
