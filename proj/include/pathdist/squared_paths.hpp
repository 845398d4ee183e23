#pragma once

#include <vector>

#include "pathdist/rooted_tree.hpp"

namespace pathdist {

/// Per-edge leaf counts and weighted subtree sums, indexed by RootedTree edge id.
struct EdgeStats {
    /// Leaves whose path to the root crosses the edge.
    std::vector<int> leaves;
    /// Sum of leaves(e') * length(e') over every edge e' at or below the edge.
    std::vector<double> alpha;
};

inline EdgeStats compute_edge_stats(const RootedTree& tree) {
    const int edges = tree.edge_count();
    EdgeStats stats;
    stats.leaves.assign(edges, 0);
    stats.alpha.assign(edges, 0.0);
    for (EdgeId e = edges - 1; e >= 0; --e) {
        if (tree.is_external(e)) {
            stats.leaves[e] = 1;
            stats.alpha[e] = tree.length(e);
        } else {
            const EdgeId left = tree.left_child_edge(e);
            const EdgeId right = tree.right_child_edge(e);
            stats.leaves[e] = stats.leaves[left] + stats.leaves[right];
            stats.alpha[e] = stats.alpha[left] + stats.alpha[right] + stats.leaves[e] * tree.length(e);
        }
    }
    return stats;
}

/*
 * Sum of squared path lengths over all unordered taxon pairs, in linear time.
 *
 * Every edge contributes x (n - n(e)) (2 alpha(e) - n(e) x), which covers the
 * pairs of edges where one lies below the other plus the edge paired with
 * itself. Each internal edge adds 2 alpha(e_L) alpha(e_R) for edge pairs split
 * across its two child subtrees.
 */
inline double sum_squared_paths(const RootedTree& tree, const EdgeStats& stats) {
    const double n = tree.leaf_count();
    double total = 0.0;
    for (EdgeId e = 0; e < tree.edge_count(); ++e) {
        const double x = tree.length(e);
        const double below = stats.leaves[e];
        total += x * (n - below) * (2.0 * stats.alpha[e] - below * x);
        if (!tree.is_external(e)) {
            total += 2.0 * stats.alpha[tree.left_child_edge(e)] * stats.alpha[tree.right_child_edge(e)];
        }
    }
    return total;
}

inline double sum_squared_paths(const RootedTree& tree) {
    return sum_squared_paths(tree, compute_edge_stats(tree));
}

}  // namespace pathdist
