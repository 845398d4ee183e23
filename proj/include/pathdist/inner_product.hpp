#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pathdist/quad_poly.hpp"
#include "pathdist/rooted_tree.hpp"
#include "pathdist/segment_decomposition.hpp"

namespace pathdist {

enum class Colour : unsigned char { white = 0, black = 1 };

inline Colour opposite(Colour c) { return c == Colour::black ? Colour::white : Colour::black; }

/// Black/white assignment to taxa, indexed by taxon id.
class Colouring {
public:
    Colouring() = default;
    Colouring(int taxa, Colour initial)
        : colour_(taxa, initial), black_(initial == Colour::black ? taxa : 0) {}

    int size() const { return static_cast<int>(colour_.size()); }
    Colour operator[](int taxon) const { return colour_[taxon]; }
    int black_count() const { return black_; }
    int white_count() const { return size() - black_; }

    void set(int taxon, Colour c) {
        if (colour_[taxon] == c) {
            return;
        }
        black_ += c == Colour::black ? 1 : -1;
        colour_[taxon] = c;
    }

private:
    std::vector<Colour> colour_;
    int black_ = 0;
};

/*
 * Per-node state under the current colouring.
 *
 * black/white count the taxa whose leaf edge lies in the node's segment.
 * phi maps outside colour counts to the sum over the segment's edges of
 * length times the number of bichromatic pairs separated by the edge. For a
 * degree-1 segment its variables are (b, w) of all outside taxa; for degree
 * two they are (b1, w1, b2, w2), split by which boundary vertex (smaller id
 * first) the outside taxon is nearer to.
 */
struct NodeDecoration {
    long long black = 0;
    long long white = 0;
    QuadPoly phi;
};

/*
 * A segment decomposition decorated with counts and polynomials for one
 * colouring of the taxa, supporting incremental recolouring.
 *
 * Each child polynomial is evaluated at the colour counts outside that child:
 * at a boundary vertex the child shares with its parent the parent's variable
 * passes through; at the vertex shared with the sibling the sibling's counts
 * are added to every parent variable not on the child's far side.
 */
class DecoratedDecomposition {
public:
    DecoratedDecomposition(const RootedTree& tree, const SegmentDecomposition& td, Colouring colouring)
        : tree_(&tree), td_(&td), colouring_(std::move(colouring)) {
        if (tree.leaf_count() < 3) {
            throw std::invalid_argument("decoration needs at least three taxa");
        }
        if (colouring_.size() != tree.leaf_count()) {
            throw std::invalid_argument("colouring does not cover the taxa");
        }
        const int nodes = static_cast<int>(td.nodes.size());
        decoration_.assign(nodes, {});
        plans_.assign(nodes, {});
        mark_.assign(nodes, 0);
        buckets_.assign(td.height() + 1, {});
        for (int v = 0; v < nodes; ++v) {
            if (!td.nodes[v].is_leaf()) {
                plans_[v] = make_plan(v);
            }
        }
        redecorate_all();
    }

    const Colouring& colouring() const { return colouring_; }
    const NodeDecoration& decoration(int node) const { return decoration_[node]; }
    const SegmentDecomposition& decomposition() const { return *td_; }

    /// Rebuilds every node bottom-up from the current colouring.
    void redecorate_all() {
        // Node ids increase from children to parents.
        for (int v = 0; v < static_cast<int>(td_->nodes.size()); ++v) {
            if (v != td_->root) {
                recompute(v);
            }
        }
    }

    /// Sum over all edges f of length(f) times the number of bichromatic pairs split by f.
    double eval_root() const {
        const DecompositionNode& root = td_->nodes[td_->root];
        const NodeDecoration& left = decoration_[root.left];
        const NodeDecoration& right = decoration_[root.right];
        const std::array<double, 2> at_left{static_cast<double>(right.black), static_cast<double>(right.white)};
        const std::array<double, 2> at_right{static_cast<double>(left.black), static_cast<double>(left.white)};
        return left.phi.evaluate(at_left) + right.phi.evaluate(at_right);
    }

    /*
     * Sets the given taxa to `colour` and recomputes exactly the union of the
     * root paths of the affected leaves, children before parents. Returns the
     * number of recomputed nodes.
     */
    std::size_t recolour(std::span<const int> taxa, Colour colour) {
        ++round_;
        std::size_t touched = 0;
        for (int taxon : taxa) {
            if (taxon < 0 || taxon >= colouring_.size()) {
                throw std::out_of_range("unknown taxon id " + std::to_string(taxon));
            }
            if (colouring_[taxon] == colour) {
                continue;
            }
            colouring_.set(taxon, colour);
            ++recoloured_total_;
            const VertexId leaf = tree_->vertex_of_taxon(taxon);
            int u = td_->leaf_of_edge[leaf == RootedTree::kRoot ? 0 : RootedTree::edge_above(leaf)];
            while (u != td_->root && mark_[u] != round_) {
                mark_[u] = round_;
                buckets_[td_->nodes[u].height].push_back(u);
                u = td_->nodes[u].parent;
            }
        }
        for (auto& bucket : buckets_) {
            for (int v : bucket) {
                recompute(v);
            }
            touched += bucket.size();
            bucket.clear();
        }
        touched_total_ += static_cast<long long>(touched);
        return touched;
    }

    long long touched_total() const { return touched_total_; }
    long long recoloured_total() const { return recoloured_total_; }

private:
    struct SlotRule {
        bool sibling = false;
        int parent_count = 0;
        std::array<int, 2> parent_slots{};
    };
    struct ChildRule {
        int slots = 0;
        std::array<SlotRule, 2> rule{};
    };
    struct Plan {
        std::array<ChildRule, 2> child{};
    };

    Plan make_plan(int v) const {
        const DecompositionNode& node = td_->nodes[v];
        const DecompositionNode& left = td_->nodes[node.left];
        const DecompositionNode& right = td_->nodes[node.right];
        VertexId shared = -1;
        for (VertexId x : left.boundary_vertices()) {
            for (VertexId y : right.boundary_vertices()) {
                if (x == y) {
                    shared = x;
                }
            }
        }
        if (shared < 0) {
            throw std::logic_error("children of node " + std::to_string(v) + " do not touch");
        }
        Plan plan;
        const std::array<const DecompositionNode*, 2> kids{&left, &right};
        for (int c = 0; c < 2; ++c) {
            const DecompositionNode& child = *kids[c];
            ChildRule& rule = plan.child[c];
            rule.slots = child.degree;
            VertexId far = -1;
            for (VertexId x : child.boundary_vertices()) {
                if (x != shared) {
                    far = x;
                }
            }
            for (int j = 0; j < child.degree; ++j) {
                const VertexId x = child.boundary[j];
                SlotRule& slot = rule.rule[j];
                if (x == shared) {
                    slot.sibling = true;
                    for (int k = 0; k < node.degree; ++k) {
                        if (node.boundary[k] != far) {
                            slot.parent_slots[slot.parent_count++] = k;
                        }
                    }
                } else {
                    for (int k = 0; k < node.degree; ++k) {
                        if (node.boundary[k] == x) {
                            slot.parent_slots[slot.parent_count++] = k;
                        }
                    }
                    if (slot.parent_count != 1) {
                        throw std::logic_error("boundary vertex " + std::to_string(x) +
                                               " of a child is missing from its parent");
                    }
                }
            }
        }
        return plan;
    }

    void recompute(int v) {
        const DecompositionNode& node = td_->nodes[v];
        NodeDecoration& out = decoration_[v];
        if (node.is_leaf()) {
            const EdgeId f = node.edge;
            const double y = tree_->length(f);
            VertexId taxon_vertex = -1;
            if (tree_->is_leaf(RootedTree::child_vertex(f))) {
                taxon_vertex = RootedTree::child_vertex(f);
            } else if (tree_->parent_vertex(f) == RootedTree::kRoot) {
                taxon_vertex = RootedTree::kRoot;
            }
            if (taxon_vertex >= 0) {
                const bool black = colouring_[tree_->taxon(taxon_vertex)] == Colour::black;
                out.black = black ? 1 : 0;
                out.white = black ? 0 : 1;
                out.phi = QuadPoly(2);
                out.phi.linear(0) = y * static_cast<double>(out.white);
                out.phi.linear(1) = y * static_cast<double>(out.black);
            } else {
                out.black = 0;
                out.white = 0;
                out.phi = QuadPoly(4);
                out.phi.quadratic(0, 3) = y;
                out.phi.quadratic(1, 2) = y;
            }
            return;
        }
        const Plan& plan = plans_[v];
        const NodeDecoration& left = decoration_[node.left];
        const NodeDecoration& right = decoration_[node.right];
        out.black = left.black + right.black;
        out.white = left.white + right.white;
        const int arity = 2 * node.degree;
        out.phi = substitute(left.phi, substitution(plan.child[0], right), arity);
        out.phi += substitute(right.phi, substitution(plan.child[1], left), arity);
    }

    struct Substitution {
        std::array<SumTerm, 4> terms{};
        int size = 0;
        operator std::span<const SumTerm>() const { return {terms.data(), static_cast<std::size_t>(size)}; }
    };

    static Substitution substitution(const ChildRule& rule, const NodeDecoration& sibling) {
        Substitution s;
        s.size = 2 * rule.slots;
        for (int j = 0; j < rule.slots; ++j) {
            const SlotRule& slot = rule.rule[j];
            SumTerm& b = s.terms[2 * j];
            SumTerm& w = s.terms[2 * j + 1];
            if (slot.sibling) {
                b.constant = static_cast<double>(sibling.black);
                w.constant = static_cast<double>(sibling.white);
            }
            for (int k = 0; k < slot.parent_count; ++k) {
                b.add_var(2 * slot.parent_slots[k]);
                w.add_var(2 * slot.parent_slots[k] + 1);
            }
        }
        return s;
    }

    const RootedTree* tree_;
    const SegmentDecomposition* td_;
    Colouring colouring_;
    std::vector<NodeDecoration> decoration_;
    std::vector<Plan> plans_;
    std::vector<unsigned> mark_;
    std::vector<std::vector<int>> buckets_;
    unsigned round_ = 0;
    long long touched_total_ = 0;
    long long recoloured_total_ = 0;
};

inline DecoratedDecomposition decorate(const RootedTree& tree, const SegmentDecomposition& td,
                                       Colouring colouring) {
    return DecoratedDecomposition(tree, td, std::move(colouring));
}

struct InnerProductOptions {
    /// Check the colouring invariant on entry to every traversal step (O(n) each).
    bool check_invariants = false;
};

struct InnerProductResult {
    double value = 0.0;
    long long touched_nodes = 0;
    long long recoloured = 0;
};

/*
 * Sum over all taxon pairs of p_ij * q_ij, where p and q are path lengths in
 * the first and second tree.
 *
 * The second tree is decomposed and decorated once, starting from "root taxon
 * black, everything else white". A preorder walk over the first tree then
 * keeps the colouring equal to the bipartition of the current edge, always
 * recolouring the smaller child subtree, and adds length(e) * eval_root().
 */
inline InnerProductResult inner_product_sum(const ValidatedPair& pair, const InnerProductOptions& options = {}) {
    const RootedTree& t1 = pair.first;
    const RootedTree& t2 = pair.second;
    const int n = t1.leaf_count();
    InnerProductResult result;
    if (n == 2) {
        result.value = t1.length(0) * t2.length(0);
        return result;
    }
    const SegmentDecomposition td = build_segment_decomposition(t2);
    Colouring initial(n, Colour::white);
    initial.set(t1.taxon(RootedTree::kRoot), Colour::black);
    DecoratedDecomposition deco(t2, td, std::move(initial));

    std::vector<int> taxa;
    auto subtree_taxa = [&](VertexId u) {
        taxa.clear();
        for (VertexId x = u; x < t1.subtree_end(u); ++x) {
            if (t1.is_leaf(x)) {
                taxa.push_back(t1.taxon(x));
            }
        }
        return std::span<const int>(taxa);
    };
    auto check_entry = [&](VertexId u) {
        if (deco.colouring().black_count() != n - t1.leaves_below(u)) {
            throw std::logic_error("black set is not the complement of the subtree at vertex " +
                                   std::to_string(u));
        }
        for (int taxon : subtree_taxa(u)) {
            if (deco.colouring()[taxon] != Colour::white) {
                throw std::logic_error("subtree taxon coloured black at vertex " + std::to_string(u));
            }
        }
    };

    struct Frame {
        VertexId vertex;
        int stage;
    };
    std::vector<Frame> stack{{1, 0}};
    double total = 0.0;
    while (!stack.empty()) {
        Frame& frame = stack.back();
        const VertexId u = frame.vertex;
        if (frame.stage == 0) {
            if (options.check_invariants) {
                check_entry(u);
            }
            total += t1.length(RootedTree::edge_above(u)) * deco.eval_root();
            if (t1.is_leaf(u)) {
                const int taxon = t1.taxon(u);
                deco.recolour(std::span<const int>(&taxon, 1), Colour::black);
                stack.pop_back();
                continue;
            }
            deco.recolour(subtree_taxa(t1.small_child(u)), Colour::black);
            frame.stage = 1;
            stack.push_back({t1.large_child(u), 0});
        } else if (frame.stage == 1) {
            deco.recolour(subtree_taxa(t1.small_child(u)), Colour::white);
            frame.stage = 2;
            stack.push_back({t1.small_child(u), 0});
        } else {
            stack.pop_back();
        }
    }
    if (options.check_invariants && deco.colouring().black_count() != n) {
        throw std::logic_error("traversal finished with white taxa left");
    }
    result.value = total;
    result.touched_nodes = deco.touched_total();
    result.recoloured = deco.recoloured_total();
    return result;
}

}  // namespace pathdist
