#pragma once

// Brute-force references and seeded instance generators. Nothing here calls
// into the fast pipeline.

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pathdist/inner_product.hpp"
#include "pathdist/newick.hpp"
#include "pathdist/tree.hpp"

namespace pathdist::testkit {

/*
 * 64-bit linear congruential generator (Knuth's MMIX constants):
 *   state <- state * 6364136223846793005 + 1442695040888963407  (mod 2^64)
 * Outputs use the high 32 bits of the new state.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint32_t next() {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<std::uint32_t>(state_ >> 32);
    }

    /// Uniform integer in [0, bound) via multiply-shift of a 32-bit output.
    std::uint32_t below(std::uint32_t bound) {
        return static_cast<std::uint32_t>((static_cast<std::uint64_t>(next()) * bound) >> 32);
    }

    /// Uniform real in [0, 1) from two outputs (53 bits).
    double unit() {
        const std::uint64_t hi = next() >> 5;  // 27 bits
        const std::uint64_t lo = next() >> 6;  // 26 bits
        return static_cast<double>((hi << 26) | lo) * (1.0 / 9007199254740992.0);
    }

private:
    std::uint64_t state_;
};

enum class LengthMode { integer, real };

/*
 * Seeded random binary tree on taxa T1..Tn.
 *
 * Start from the edge T1-T2. For i = 3..n pick an existing edge uniformly
 * (below(edge count)), subdivide it with a new internal vertex and hang Ti
 * from that vertex. The subdivided edge keeps its id for the upper half; the
 * lower half and the pendant edge are appended in that order. Lengths are
 * drawn last, in edge-id order: below(9) in integer mode, unit() in real mode.
 */
inline UnrootedTree random_binary_tree(int n, std::uint64_t seed, LengthMode mode) {
    if (n < 2) {
        throw std::invalid_argument("random_binary_tree needs n >= 2");
    }
    Rng rng(seed);
    std::vector<std::string> labels{"T1", "T2"};
    std::vector<Edge> edges{{0, 1, 0.0}};
    for (int i = 3; i <= n; ++i) {
        const auto pick = static_cast<EdgeId>(rng.below(static_cast<std::uint32_t>(edges.size())));
        const VertexId middle = static_cast<VertexId>(labels.size());
        labels.emplace_back();
        const VertexId leaf = static_cast<VertexId>(labels.size());
        labels.push_back("T" + std::to_string(i));
        const VertexId lower = edges[pick].v;
        edges[pick].v = middle;
        edges.push_back({middle, lower, 0.0});
        edges.push_back({middle, leaf, 0.0});
    }
    for (Edge& edge : edges) {
        edge.length = mode == LengthMode::integer ? static_cast<double>(rng.below(9)) : rng.unit();
    }
    return UnrootedTree(std::move(labels), std::move(edges));
}

/// Two independent trees on the same taxa, from seeds 2*seed and 2*seed + 1.
inline std::pair<UnrootedTree, UnrootedTree> random_tree_pair(int n, std::uint64_t seed, LengthMode mode) {
    return {random_binary_tree(n, 2 * seed, mode), random_binary_tree(n, 2 * seed + 1, mode)};
}

/// Caterpillar C1..Cn with the given constant length: maximally deep when rooted at an end.
inline UnrootedTree caterpillar_tree(int n, double length = 1.0) {
    if (n < 3) {
        throw std::invalid_argument("caterpillar_tree needs n >= 3");
    }
    std::vector<std::string> labels;
    std::vector<Edge> edges;
    // Spine vertices s_1..s_{n-2}; C1 and C2 hang off s_1, Cn off s_{n-2}.
    for (int i = 0; i < n - 2; ++i) {
        labels.emplace_back();
    }
    for (int i = 1; i <= n; ++i) {
        labels.push_back("C" + std::to_string(i));
    }
    const int leaf0 = n - 2;
    for (int i = 0; i + 1 < n - 2; ++i) {
        edges.push_back({i, i + 1, length});
    }
    edges.push_back({0, leaf0, length});
    for (int i = 1; i < n - 1; ++i) {
        edges.push_back({i - 1, leaf0 + i, length});
    }
    edges.push_back({n - 3, leaf0 + n - 1, length});
    return UnrootedTree(std::move(labels), std::move(edges));
}

/// Path lengths from one taxon to every taxon (indexed by taxon id), one traversal.
inline std::vector<double> path_length_row(const UnrootedTree& tree, int taxon) {
    std::vector<double> dist(tree.vertex_count(), -1.0);
    std::vector<VertexId> stack{tree.leaf_of_taxon(taxon)};
    dist[stack.back()] = 0.0;
    while (!stack.empty()) {
        const VertexId v = stack.back();
        stack.pop_back();
        for (EdgeId e : tree.incident(v)) {
            const VertexId w = tree.edge(e).other(v);
            if (dist[w] < 0.0) {
                dist[w] = dist[v] + tree.edge(e).length;
                stack.push_back(w);
            }
        }
    }
    std::vector<double> row(tree.leaf_count());
    for (int t = 0; t < tree.leaf_count(); ++t) {
        row[t] = dist[tree.leaf_of_taxon(t)];
    }
    return row;
}

/// Path length for every unordered taxon pair, keyed by (smaller label, larger label).
using PathLengthMatrix = std::map<std::pair<std::string, std::string>, double>;

inline PathLengthMatrix all_pairs_path_lengths(const UnrootedTree& tree) {
    PathLengthMatrix matrix;
    const auto& taxa = tree.sorted_taxa();
    for (int i = 0; i < tree.leaf_count(); ++i) {
        const std::vector<double> row = path_length_row(tree, i);
        for (int j = i + 1; j < tree.leaf_count(); ++j) {
            matrix[{taxa[i], taxa[j]}] = row[j];
        }
    }
    return matrix;
}

inline void require_same_taxa(const UnrootedTree& t1, const UnrootedTree& t2) {
    if (t1.sorted_taxa() != t2.sorted_taxa()) {
        throw TreeError("taxon sets differ");
    }
}

inline double sum_squared_bruteforce(const UnrootedTree& tree) {
    double total = 0.0;
    for (int i = 0; i < tree.leaf_count(); ++i) {
        const std::vector<double> row = path_length_row(tree, i);
        for (int j = i + 1; j < tree.leaf_count(); ++j) {
            total += row[j] * row[j];
        }
    }
    return total;
}

/// Sum over pairs of (p_ij - q_ij)^2, one row of each matrix at a time.
inline double delta_bruteforce(const UnrootedTree& t1, const UnrootedTree& t2) {
    require_same_taxa(t1, t2);
    double total = 0.0;
    for (int i = 0; i < t1.leaf_count(); ++i) {
        const std::vector<double> p = path_length_row(t1, i);
        const std::vector<double> q = path_length_row(t2, i);
        for (int j = i + 1; j < t1.leaf_count(); ++j) {
            const double d = p[j] - q[j];
            total += d * d;
        }
    }
    return total;
}

inline double inner_product_bruteforce(const UnrootedTree& t1, const UnrootedTree& t2) {
    require_same_taxa(t1, t2);
    double total = 0.0;
    for (int i = 0; i < t1.leaf_count(); ++i) {
        const std::vector<double> p = path_length_row(t1, i);
        const std::vector<double> q = path_length_row(t2, i);
        for (int j = i + 1; j < t1.leaf_count(); ++j) {
            total += p[j] * q[j];
        }
    }
    return total;
}

/// Taxa on the side of edge f containing its endpoint `edge(f).u`.
inline std::vector<char> side_of_edge(const UnrootedTree& tree, EdgeId f) {
    std::vector<char> side(tree.vertex_count(), 0);
    std::vector<VertexId> stack{tree.edge(f).u};
    side[tree.edge(f).u] = 1;
    while (!stack.empty()) {
        const VertexId v = stack.back();
        stack.pop_back();
        for (EdgeId e : tree.incident(v)) {
            const VertexId w = tree.edge(e).other(v);
            if (e != f && !side[w]) {
                side[w] = 1;
                stack.push_back(w);
            }
        }
    }
    std::vector<char> taxon_side(tree.leaf_count());
    for (int t = 0; t < tree.leaf_count(); ++t) {
        taxon_side[t] = side[tree.leaf_of_taxon(t)];
    }
    return taxon_side;
}

/// Number of taxon pairs with different colours on different sides of f, by enumeration.
inline long long chi_tilde_bruteforce(const UnrootedTree& tree, const Colouring& colouring, EdgeId f) {
    const std::vector<char> side = side_of_edge(tree, f);
    long long count = 0;
    for (int i = 0; i < tree.leaf_count(); ++i) {
        for (int j = i + 1; j < tree.leaf_count(); ++j) {
            if (colouring[i] != colouring[j] && side[i] != side[j]) {
                ++count;
            }
        }
    }
    return count;
}

inline double chi_weighted_sum_bruteforce(const UnrootedTree& tree, const Colouring& colouring) {
    double total = 0.0;
    for (EdgeId f = 0; f < tree.edge_count(); ++f) {
        total += tree.edge(f).length * static_cast<double>(chi_tilde_bruteforce(tree, colouring, f));
    }
    return total;
}

inline Colouring random_colouring(int taxa, Rng& rng) {
    Colouring colouring(taxa, Colour::white);
    for (int t = 0; t < taxa; ++t) {
        if (rng.below(2) == 1) {
            colouring.set(t, Colour::black);
        }
    }
    return colouring;
}

/*
 * Label-preserving canonical form: rooted at the smallest taxon, children
 * sorted by their own canonical text, lengths in shortest round-trip form.
 * Two trees are isomorphic with identical lengths iff their forms are equal.
 */
inline std::string canonical_form(const UnrootedTree& tree) {
    const VertexId root = tree.leaf_of_taxon(0);
    std::vector<std::string> text(tree.vertex_count());
    std::vector<VertexId> order;
    std::vector<EdgeId> via(tree.vertex_count(), -1);
    std::vector<VertexId> stack{root};
    std::vector<char> seen(tree.vertex_count(), 0);
    seen[root] = 1;
    while (!stack.empty()) {
        const VertexId v = stack.back();
        stack.pop_back();
        order.push_back(v);
        for (EdgeId e : tree.incident(v)) {
            const VertexId w = tree.edge(e).other(v);
            if (!seen[w]) {
                seen[w] = 1;
                via[w] = e;
                stack.push_back(w);
            }
        }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const VertexId v = *it;
        std::vector<std::string> parts;
        for (EdgeId e : tree.incident(v)) {
            if (e != via[v]) {
                const VertexId w = tree.edge(e).other(v);
                parts.push_back(text[w] + ":" + format_length(tree.edge(e).length));
                text[w].clear();
            }
        }
        if (parts.empty()) {
            text[v] = tree.label(v);
            continue;
        }
        std::sort(parts.begin(), parts.end());
        std::string joined = "(";
        for (std::size_t i = 0; i < parts.size(); ++i) {
            joined += (i ? "," : "") + parts[i];
        }
        text[v] = joined + ")" + (v == root ? tree.label(v) : "");
    }
    return text[root];
}

}  // namespace pathdist::testkit
