#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "pathdist/rooted_tree.hpp"

namespace pathdist {

/*
 * Hierarchical decomposition of a tree's edge set into segments.
 *
 * A segment is a connected set of edges with at most two boundary vertices
 * (vertices touching edges both inside and outside the set). Leaves of the
 * decomposition are single edges; every internal node is the disjoint union
 * of its two children. Vertex ids are RootedTree preorder ids, and boundaries
 * are kept sorted so that slot 0 is always the smaller vertex id.
 */
struct DecompositionNode {
    int left = -1;
    int right = -1;
    int parent = -1;
    EdgeId edge = -1;  // leaves only
    std::array<VertexId, 2> boundary{-1, -1};
    int degree = 0;
    int edge_count = 1;
    int height = 0;

    bool is_leaf() const { return left < 0 && right < 0; }
    std::span<const VertexId> boundary_vertices() const {
        return {boundary.data(), static_cast<std::size_t>(degree)};
    }
};

struct MergeRound {
    int segments = 0;
    int pairs = 0;
};

struct SegmentDecomposition {
    std::vector<DecompositionNode> nodes;
    std::vector<int> leaf_of_edge;
    std::vector<MergeRound> rounds;
    int root = -1;

    int height() const { return root < 0 ? 0 : nodes[root].height; }

    /// Sum of partition sizes over all merge rounds.
    long long construction_work() const {
        long long work = 0;
        for (const MergeRound& round : rounds) {
            work += round.segments;
        }
        return work;
    }
};

/// ceil(log_{4/3}(edges)): the height bound for a decomposition of `edges` edges.
inline int decomposition_height_bound(int edges) {
    if (edges <= 1) {
        return 0;
    }
    return static_cast<int>(std::ceil(std::log(static_cast<double>(edges)) / std::log(4.0 / 3.0) - 1e-12));
}

/// 1 / log2(4/3), the local-balance constant.
inline double local_balance_constant() { return 1.0 / std::log2(4.0 / 3.0); }

// ---------------------------------------------------------------------------
// Contracted graph and its maximal paths

/// Graph on boundary vertices whose edges are degree-2 segments.
struct ContractedGraph {
    /// Tree vertex id of each local vertex; used to orient paths.
    std::vector<VertexId> vertices;
    std::vector<std::pair<int, int>> edges;
};

struct MaximalPath {
    std::vector<int> vertices;  // local ids, in path order
    std::vector<int> edges;     // edges[i] joins vertices[i] and vertices[i + 1]
};

/*
 * Splits a forest of maximum degree three into maximal paths whose interior
 * vertices all have degree two. Each path is oriented so that its first
 * vertex has the smaller tree vertex id. An edgeless graph yields one
 * single-vertex path per vertex.
 */
inline std::vector<MaximalPath> decompose_paths(const ContractedGraph& graph) {
    const int n = static_cast<int>(graph.vertices.size());
    std::vector<std::vector<int>> incident(n);
    for (int e = 0; e < static_cast<int>(graph.edges.size()); ++e) {
        incident[graph.edges[e].first].push_back(e);
        incident[graph.edges[e].second].push_back(e);
    }
    std::vector<MaximalPath> paths;
    if (graph.edges.empty()) {
        for (int v = 0; v < n; ++v) {
            paths.push_back({{v}, {}});
        }
        return paths;
    }
    auto other = [&](int e, int v) {
        return graph.edges[e].first == v ? graph.edges[e].second : graph.edges[e].first;
    };
    std::vector<char> used(graph.edges.size(), 0);
    for (int start = 0; start < n; ++start) {
        if (incident[start].size() == 2 || incident[start].empty()) {
            continue;
        }
        for (int first_edge : incident[start]) {
            if (used[first_edge]) {
                continue;
            }
            MaximalPath path;
            path.vertices.push_back(start);
            int v = start;
            int e = first_edge;
            for (;;) {
                used[e] = 1;
                const int w = other(e, v);
                path.edges.push_back(e);
                path.vertices.push_back(w);
                if (incident[w].size() != 2) {
                    break;
                }
                e = incident[w][0] == e ? incident[w][1] : incident[w][0];
                v = w;
            }
            if (graph.vertices[path.vertices.back()] < graph.vertices[path.vertices.front()]) {
                std::reverse(path.vertices.begin(), path.vertices.end());
                std::reverse(path.edges.begin(), path.edges.end());
            }
            paths.push_back(std::move(path));
        }
    }
    if (std::find(used.begin(), used.end(), 0) != used.end()) {
        throw std::logic_error("contracted graph contains a cycle");
    }
    return paths;
}

/// A segment whose boundary lies on a path, by 1-based path positions (lo <= hi).
struct PathSegment {
    int segment = -1;
    int lo = 0;
    int hi = 0;
};

/// Orders by larger boundary position, then smaller, then segment id.
inline std::vector<int> order_segments_on_path(std::vector<PathSegment> segments) {
    std::sort(segments.begin(), segments.end(), [](const PathSegment& a, const PathSegment& b) {
        return std::tie(a.hi, a.lo, a.segment) < std::tie(b.hi, b.lo, b.segment);
    });
    std::vector<int> order;
    order.reserve(segments.size());
    for (const PathSegment& s : segments) {
        order.push_back(s.segment);
    }
    return order;
}

// ---------------------------------------------------------------------------
// Merge bookkeeping

/*
 * The current partition of the edge set into maximal segments.
 *
 * For every internal tree vertex we record which segment owns each of its
 * three incident edges. A vertex is a boundary vertex exactly while those
 * owners differ, so merging two segments touches only their (at most four)
 * boundary vertices.
 */
class MergeState {
public:
    /// One singleton segment per edge; segment id == edge id.
    explicit MergeState(const RootedTree& tree) : tree_(&tree) {
        std::vector<int> owner(tree.edge_count());
        for (EdgeId e = 0; e < tree.edge_count(); ++e) {
            owner[e] = e;
        }
        init(owner, tree.edge_count());
    }

    /// Arbitrary partition; segment id == block index.
    MergeState(const RootedTree& tree, const std::vector<std::vector<EdgeId>>& blocks) : tree_(&tree) {
        std::vector<int> owner(tree.edge_count(), -1);
        for (int b = 0; b < static_cast<int>(blocks.size()); ++b) {
            for (EdgeId e : blocks[b]) {
                if (e < 0 || e >= tree.edge_count() || owner[e] >= 0) {
                    throw std::invalid_argument("blocks do not partition the edge set");
                }
                owner[e] = b;
            }
        }
        if (std::find(owner.begin(), owner.end(), -1) != owner.end()) {
            throw std::invalid_argument("blocks do not cover the edge set");
        }
        init(owner, static_cast<int>(blocks.size()));
    }

    const RootedTree& tree() const { return *tree_; }
    const std::vector<int>& active() const { return active_; }
    int degree(int segment) const { return degree_[segment]; }
    std::span<const VertexId> boundary(int segment) const {
        return {boundary_[segment].data(), static_cast<std::size_t>(degree_[segment])};
    }
    const std::array<VertexId, 2>& boundary_array(int segment) const { return boundary_[segment]; }

    /// Builds the contracted graph; `segment_of_edge[i]` receives the segment behind edge i.
    ContractedGraph contracted_graph(std::vector<int>& segment_of_edge, std::vector<int>& local_of_vertex) const {
        ContractedGraph graph;
        segment_of_edge.clear();
        local_of_vertex.assign(tree_->vertex_count(), -1);
        auto local = [&](VertexId v) {
            if (local_of_vertex[v] < 0) {
                local_of_vertex[v] = static_cast<int>(graph.vertices.size());
                graph.vertices.push_back(v);
            }
            return local_of_vertex[v];
        };
        for (int segment : active_) {
            for (VertexId v : boundary(segment)) {
                local(v);
            }
            if (degree_[segment] == 2) {
                graph.edges.emplace_back(local_of_vertex[boundary_[segment][0]],
                                         local_of_vertex[boundary_[segment][1]]);
                segment_of_edge.push_back(segment);
            }
        }
        return graph;
    }

    /// Replaces segments a and b by their union, registered under id `merged`.
    void merge(int a, int b, int merged) {
        if (merged >= static_cast<int>(degree_.size())) {
            degree_.resize(merged + 1, 0);
            boundary_.resize(merged + 1, {-1, -1});
            alive_.resize(merged + 1, 0);
        }
        std::array<VertexId, 4> candidates{};
        int count = 0;
        for (int s : {a, b}) {
            for (VertexId v : boundary(s)) {
                if (std::find(candidates.begin(), candidates.begin() + count, v) ==
                    candidates.begin() + count) {
                    candidates[count++] = v;
                }
            }
        }
        std::array<VertexId, 2> out{-1, -1};
        int out_degree = 0;
        for (int i = 0; i < count; ++i) {
            const VertexId v = candidates[i];
            auto& slots = owner_[v];
            for (int& s : slots) {
                if (s == a || s == b) {
                    s = merged;
                }
            }
            if (slots[0] != slots[1] || slots[1] != slots[2]) {
                if (out_degree == 2) {
                    throw std::logic_error("merged set has more than two boundary vertices");
                }
                out[out_degree++] = v;
            }
        }
        if (out_degree == 2 && out[1] < out[0]) {
            std::swap(out[0], out[1]);
        }
        boundary_[merged] = out;
        degree_[merged] = out_degree;
        alive_[a] = 0;
        alive_[b] = 0;
        alive_[merged] = 1;
        pending_.push_back(merged);
    }

    /// Closes a round of merges: survivors keep their order, new segments follow.
    void finish_round() {
        std::vector<int> next;
        next.reserve(active_.size());
        for (int s : active_) {
            if (alive_[s]) {
                next.push_back(s);
            }
        }
        next.insert(next.end(), pending_.begin(), pending_.end());
        pending_.clear();
        active_ = std::move(next);
    }

private:
    void init(const std::vector<int>& owner, int segments) {
        const RootedTree& tree = *tree_;
        owner_.assign(tree.vertex_count(), {-1, -1, -1});
        degree_.assign(segments, 0);
        boundary_.assign(segments, {-1, -1});
        alive_.assign(segments, 1);
        for (VertexId v = 0; v < tree.vertex_count(); ++v) {
            if (tree.degree(v) != 3) {
                continue;
            }
            const std::vector<EdgeId> edges = tree.incident_edges(v);
            for (int i = 0; i < 3; ++i) {
                owner_[v][i] = owner[edges[i]];
            }
            auto& slots = owner_[v];
            if (slots[0] == slots[1] && slots[1] == slots[2]) {
                continue;
            }
            for (int i = 0; i < 3; ++i) {
                const int s = slots[i];
                if (std::find(slots.begin(), slots.begin() + i, s) != slots.begin() + i) {
                    continue;
                }
                if (degree_[s] == 2) {
                    throw std::invalid_argument("block " + std::to_string(s) +
                                                " has more than two boundary vertices");
                }
                boundary_[s][degree_[s]++] = v;
            }
        }
        // Vertices are scanned in increasing id order, so boundaries are already sorted.
        active_.resize(segments);
        for (int s = 0; s < segments; ++s) {
            active_[s] = s;
        }
    }

    const RootedTree* tree_;
    std::vector<std::array<int, 3>> owner_;
    std::vector<int> degree_;
    std::vector<std::array<VertexId, 2>> boundary_;
    std::vector<char> alive_;
    std::vector<int> active_;
    std::vector<int> pending_;
};

/*
 * Pairs up current segments so that each pair's union is again a segment.
 *
 * The contracted graph is split into maximal paths; segments are grouped by
 * the path holding their boundary, sorted along it, and consecutive segments
 * are paired. At least ceil(|M| / 4) disjoint pairs result.
 */
inline std::vector<std::pair<int, int>> find_merge_pairs(const MergeState& state) {
    std::vector<std::pair<int, int>> pairs;
    if (state.active().size() < 2) {
        return pairs;
    }
    std::vector<int> segment_of_edge;
    std::vector<int> local_of_vertex;
    const ContractedGraph graph = state.contracted_graph(segment_of_edge, local_of_vertex);
    if (graph.edges.empty() && graph.vertices.size() != 1) {
        throw std::logic_error("contracted graph is disconnected");
    }

    // Degree-1 segments hang off a single contracted vertex.
    const int local_count = static_cast<int>(graph.vertices.size());
    std::vector<std::array<int, 3>> pendant(local_count, {-1, -1, -1});
    for (int s : state.active()) {
        if (state.degree(s) == 1) {
            auto& slots = pendant[local_of_vertex[state.boundary(s)[0]]];
            auto free_slot = std::find(slots.begin(), slots.end(), -1);
            if (free_slot == slots.end()) {
                throw std::logic_error("vertex carries more than three segments");
            }
            *free_slot = s;
        } else if (state.degree(s) == 0) {
            throw std::logic_error("segment without boundary in a partition of size > 1");
        }
    }

    std::vector<int> position(local_count, 0);
    std::vector<char> taken(local_count, 0);
    std::vector<PathSegment> members;
    for (const MaximalPath& path : decompose_paths(graph)) {
        members.clear();
        for (int i = 0; i < static_cast<int>(path.vertices.size()); ++i) {
            const int v = path.vertices[i];
            position[v] = i + 1;
            if (taken[v]) {
                continue;
            }
            taken[v] = 1;
            for (int s : pendant[v]) {
                if (s >= 0) {
                    members.push_back({s, i + 1, i + 1});
                }
            }
        }
        for (int e : path.edges) {
            const int s = segment_of_edge[e];
            int lo = position[graph.edges[e].first];
            int hi = position[graph.edges[e].second];
            if (hi < lo) {
                std::swap(lo, hi);
            }
            members.push_back({s, lo, hi});
        }
        const std::vector<int> order = order_segments_on_path(members);
        for (std::size_t i = 0; i + 1 < order.size(); i += 2) {
            pairs.emplace_back(order[i], order[i + 1]);
        }
    }
    return pairs;
}

// ---------------------------------------------------------------------------
// Construction

/// Agglomerative construction: merge rounds until a single segment remains.
inline SegmentDecomposition build_segment_decomposition(const RootedTree& tree) {
    SegmentDecomposition td;
    const int edges = tree.edge_count();
    if (edges < 1) {
        throw std::invalid_argument("tree has no edges");
    }
    MergeState state(tree);
    td.nodes.resize(edges);
    td.leaf_of_edge.resize(edges);
    for (EdgeId e = 0; e < edges; ++e) {
        DecompositionNode& node = td.nodes[e];
        node.edge = e;
        node.degree = state.degree(e);
        node.boundary = state.boundary_array(e);
        td.leaf_of_edge[e] = e;
    }
    td.nodes.reserve(2 * edges);

    while (state.active().size() > 1) {
        const int segments = static_cast<int>(state.active().size());
        const auto pairs = find_merge_pairs(state);
        const int required = (segments + 3) / 4;
        if (static_cast<int>(pairs.size()) < required) {
            throw std::logic_error("merge round found " + std::to_string(pairs.size()) +
                                   " pairs among " + std::to_string(segments) + " segments");
        }
        for (const auto& [a, b] : pairs) {
            const int id = static_cast<int>(td.nodes.size());
            state.merge(a, b, id);
            DecompositionNode node;
            node.left = a;
            node.right = b;
            node.degree = state.degree(id);
            node.boundary = state.boundary_array(id);
            node.edge_count = td.nodes[a].edge_count + td.nodes[b].edge_count;
            node.height = 1 + std::max(td.nodes[a].height, td.nodes[b].height);
            td.nodes[a].parent = id;
            td.nodes[b].parent = id;
            td.nodes.push_back(node);
        }
        state.finish_round();
        td.rounds.push_back({segments, static_cast<int>(pairs.size())});
    }
    td.root = state.active().front();
    return td;
}

// ---------------------------------------------------------------------------
// Verification

struct DecompositionReport {
    bool ok = true;
    std::string property;  // empty when ok
    int node = -1;
    std::string detail;
    /// max over nodes of height / (1 + log2 |Q_v|)
    double max_balance_ratio = 0.0;

    explicit operator bool() const { return ok; }
};

/*
 * Recomputes every node's edge set from scratch and checks the decomposition
 * properties. Properties are reported as "D1" (leaf/edge bijection), "D2"
 * (connectivity, boundary, degree), "D3" (disjoint union), "structure",
 * "root", "height" and "balance". Stops at the first violation.
 */
inline DecompositionReport verify_decomposition(const SegmentDecomposition& td, const RootedTree& tree) {
    DecompositionReport report;
    auto fail = [&](std::string property, int node, std::string detail) {
        report.ok = false;
        report.property = std::move(property);
        report.node = node;
        report.detail = std::move(detail);
        return report;
    };
    const int node_count = static_cast<int>(td.nodes.size());
    const int edges = tree.edge_count();

    // D1
    std::vector<int> leaf_for_edge(edges, -1);
    int leaves = 0;
    for (int v = 0; v < node_count; ++v) {
        const DecompositionNode& node = td.nodes[v];
        if ((node.left < 0) != (node.right < 0)) {
            return fail("structure", v, "node has exactly one child");
        }
        if (!node.is_leaf()) {
            continue;
        }
        ++leaves;
        if (node.edge < 0 || node.edge >= edges) {
            return fail("D1", v, "leaf maps to no edge");
        }
        if (leaf_for_edge[node.edge] >= 0) {
            return fail("D1", v, "edge " + std::to_string(node.edge) + " is also the leaf of node " +
                                     std::to_string(leaf_for_edge[node.edge]));
        }
        leaf_for_edge[node.edge] = v;
    }
    if (leaves != edges) {
        return fail("D1", -1, std::to_string(leaves) + " leaves for " + std::to_string(edges) + " edges");
    }
    if (td.root < 0 || td.root >= node_count) {
        return fail("structure", td.root, "missing root");
    }

    // Preorder from the root; a node reached twice lies in two sibling subtrees.
    std::vector<int> order;
    std::vector<int> via(node_count, -1);
    std::vector<char> reached(node_count, 0);
    std::vector<int> stack{td.root};
    reached[td.root] = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        order.push_back(v);
        const DecompositionNode& node = td.nodes[v];
        if (node.is_leaf()) {
            continue;
        }
        for (int c : {node.left, node.right}) {
            if (c < 0 || c >= node_count) {
                return fail("structure", v, "child id out of range");
            }
            if (reached[c]) {
                const int first_parent = via[c];
                return fail("D3", v, "child " + std::to_string(c) + " is shared with node " +
                                         std::to_string(first_parent) + "; segments overlap");
            }
            reached[c] = 1;
            via[c] = v;
            stack.push_back(c);
        }
    }
    for (int v = 0; v < node_count; ++v) {
        if (!reached[v]) {
            return fail("structure", v, "node is not reachable from the root");
        }
        if (v != td.root && td.nodes[v].parent != via[v]) {
            return fail("structure", v, "parent link disagrees with child links");
        }
    }

    // Per-node edge sets, recomputed by walking down to the leaves.
    std::vector<int> edge_mark(edges, -1);
    std::vector<int> vertex_mark(tree.vertex_count(), -1);
    std::vector<int> height(node_count, 0);
    std::vector<int> collected;
    std::vector<int> walk;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int v = *it;
        const DecompositionNode& node = td.nodes[v];
        if (!node.is_leaf()) {
            height[v] = 1 + std::max(height[node.left], height[node.right]);
            // D3: children's edge sets are disjoint (their union is v's set by construction).
            collected.clear();
            walk.assign(1, node.left);
            while (!walk.empty()) {
                const int u = walk.back();
                walk.pop_back();
                if (td.nodes[u].is_leaf()) {
                    edge_mark[td.nodes[u].edge] = v;
                } else {
                    walk.push_back(td.nodes[u].left);
                    walk.push_back(td.nodes[u].right);
                }
            }
            walk.assign(1, node.right);
            while (!walk.empty()) {
                const int u = walk.back();
                walk.pop_back();
                if (td.nodes[u].is_leaf()) {
                    if (edge_mark[td.nodes[u].edge] == v) {
                        return fail("D3", v, "children share edge " + std::to_string(td.nodes[u].edge));
                    }
                } else {
                    walk.push_back(td.nodes[u].left);
                    walk.push_back(td.nodes[u].right);
                }
            }
        }
        if (height[v] != node.height) {
            return fail("structure", v, "stored height " + std::to_string(node.height) +
                                            " differs from " + std::to_string(height[v]));
        }

        // Edge set of v, marked with stamp v + node_count to stay distinct from the D3 stamp.
        const int stamp = v + node_count;
        collected.clear();
        walk.assign(1, v);
        while (!walk.empty()) {
            const int u = walk.back();
            walk.pop_back();
            if (td.nodes[u].is_leaf()) {
                collected.push_back(td.nodes[u].edge);
                edge_mark[td.nodes[u].edge] = stamp;
            } else {
                walk.push_back(td.nodes[u].left);
                walk.push_back(td.nodes[u].right);
            }
        }
        if (static_cast<int>(collected.size()) != node.edge_count) {
            return fail("structure", v, "stored edge count " + std::to_string(node.edge_count) +
                                            " differs from " + std::to_string(collected.size()));
        }

        // D2: a set of k edges is connected iff it touches exactly k + 1 vertices.
        int touched = 0;
        std::vector<VertexId> boundary;
        for (EdgeId e : collected) {
            for (VertexId x : {tree.parent_vertex(e), RootedTree::child_vertex(e)}) {
                if (vertex_mark[x] == stamp) {
                    continue;
                }
                vertex_mark[x] = stamp;
                ++touched;
                for (EdgeId f : tree.incident_edges(x)) {
                    if (edge_mark[f] != stamp) {
                        boundary.push_back(x);
                        break;
                    }
                }
            }
        }
        if (touched != static_cast<int>(collected.size()) + 1) {
            return fail("D2", v, "edge set is not connected");
        }
        std::sort(boundary.begin(), boundary.end());
        if (boundary.size() > 2) {
            return fail("D2", v, "degree " + std::to_string(boundary.size()) + " exceeds two");
        }
        const auto stored = node.boundary_vertices();
        if (node.degree < 0 || node.degree > 2 ||
            !std::equal(boundary.begin(), boundary.end(), stored.begin(), stored.end())) {
            return fail("D2", v, "stored boundary differs from recomputed boundary");
        }
    }

    const DecompositionNode& root = td.nodes[td.root];
    if (root.degree != 0 || root.edge_count != edges) {
        return fail("root", td.root, "root segment is not the whole edge set");
    }
    if (!root.is_leaf() && (td.nodes[root.left].degree != 1 || td.nodes[root.right].degree != 1)) {
        return fail("root", td.root, "root children must both have degree one");
    }
    const int bound = decomposition_height_bound(edges);
    if (height[td.root] > bound) {
        return fail("height", td.root, "height " + std::to_string(height[td.root]) + " exceeds " +
                                           std::to_string(bound));
    }
    const double k = local_balance_constant();
    for (int v = 0; v < node_count; ++v) {
        const double scale = 1.0 + std::log2(static_cast<double>(td.nodes[v].edge_count));
        const double ratio = height[v] / scale;
        report.max_balance_ratio = std::max(report.max_balance_ratio, ratio);
        if (ratio > k) {
            return fail("balance", v, "height " + std::to_string(height[v]) + " over " +
                                          std::to_string(td.nodes[v].edge_count) + " edges");
        }
    }
    return report;
}

/// Indented text dump: one line per node in preorder, left child first.
inline std::string dump_decomposition(const SegmentDecomposition& td) {
    std::ostringstream out;
    std::vector<std::pair<int, int>> stack;
    if (td.root >= 0) {
        stack.emplace_back(td.root, 0);
    }
    while (!stack.empty()) {
        const auto [v, depth] = stack.back();
        stack.pop_back();
        const DecompositionNode& node = td.nodes[v];
        out << std::string(2 * depth, ' ') << '#' << v << " deg=" << node.degree << " boundary={";
        for (int i = 0; i < node.degree; ++i) {
            out << (i ? "," : "") << node.boundary[i];
        }
        out << "} edges=" << node.edge_count;
        if (node.is_leaf()) {
            out << " edge=" << node.edge;
        }
        out << '\n';
        if (!node.is_leaf()) {
            stack.emplace_back(node.right, depth + 1);
            stack.emplace_back(node.left, depth + 1);
        }
    }
    return out.str();
}

}  // namespace pathdist
