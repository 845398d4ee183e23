#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "pathdist/tree.hpp"

namespace pathdist {

/// Parse failure with a byte offset into the input text.
class NewickError : public std::runtime_error {
public:
    NewickError(std::string_view text, std::size_t offset, const std::string& message)
        : std::runtime_error(locate(text, offset) + ": " + message), offset_(offset) {}

    std::size_t offset() const { return offset_; }

private:
    static std::string locate(std::string_view text, std::size_t offset) {
        std::size_t line = 1;
        std::size_t column = 1;
        for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        return "line " + std::to_string(line) + ", column " + std::to_string(column);
    }

    std::size_t offset_;
};

struct NewickOptions {
    /// Ignore branch lengths and use 1.0 for every edge of the unrooted tree.
    bool topology_only = false;
};

namespace detail {

inline bool is_label_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '.' || c == '-';
}

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

struct ParsedNode {
    int parent = -1;
    std::vector<int> children;
    std::string label;
    double length = 0.0;
    bool has_length = false;
    std::size_t offset = 0;
};

class NewickParser {
public:
    explicit NewickParser(std::string_view text) : text_(text) {}

    std::vector<ParsedNode> parse() {
        skip_space();
        if (at_end()) {
            fail("empty input");
        }
        std::vector<int> open;
        bool expect_subtree = true;
        for (;;) {
            skip_space();
            if (expect_subtree) {
                const int node = new_node(open.empty() ? -1 : open.back());
                if (peek() == '(') {
                    ++pos_;
                    open.push_back(node);
                    continue;
                }
                nodes_[node].label = read_label();
                if (nodes_[node].label.empty()) {
                    fail(at_end() ? "unexpected end of input" : "expected a taxon label or '('");
                }
                read_length(node);
                expect_subtree = false;
                if (open.empty()) {
                    break;
                }
                continue;
            }
            if (at_end()) {
                fail("unbalanced parentheses: missing ')'");
            }
            const char c = text_[pos_];
            if (c == ',') {
                ++pos_;
                expect_subtree = true;
            } else if (c == ')') {
                ++pos_;
                const int node = open.back();
                open.pop_back();
                skip_space();
                read_label();  // internal labels are tolerated and dropped
                read_length(node);
                if (open.empty()) {
                    break;
                }
            } else if (c == ';') {
                fail("unbalanced parentheses: missing ')'");
            } else {
                fail(std::string("unexpected character '") + c + "'");
            }
        }
        skip_space();
        if (at_end() || text_[pos_] != ';') {
            if (!at_end() && text_[pos_] == ')') {
                fail("unbalanced parentheses: unexpected ')'");
            }
            fail("expected ';'");
        }
        ++pos_;
        skip_space();
        if (!at_end()) {
            fail("trailing characters after ';'");
        }
        return std::move(nodes_);
    }

    [[noreturn]] void fail_at(std::size_t offset, const std::string& message) const {
        throw NewickError(text_, offset, message);
    }

private:
    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }

    void skip_space() {
        while (!at_end() && is_space(text_[pos_])) {
            ++pos_;
        }
    }

    [[noreturn]] void fail(const std::string& message) const { fail_at(pos_, message); }

    int new_node(int parent) {
        ParsedNode node;
        node.parent = parent;
        node.offset = pos_;
        nodes_.push_back(std::move(node));
        const int id = static_cast<int>(nodes_.size()) - 1;
        if (parent >= 0) {
            nodes_[parent].children.push_back(id);
        }
        return id;
    }

    std::string read_label() {
        const std::size_t start = pos_;
        while (!at_end() && is_label_char(text_[pos_])) {
            ++pos_;
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    void read_length(int node) {
        skip_space();
        if (peek() != ':') {
            return;
        }
        ++pos_;
        skip_space();
        const std::size_t start = pos_;
        double value = 0.0;
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + text_.size();
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr == first) {
            fail("malformed branch length");
        }
        pos_ += static_cast<std::size_t>(ptr - first);
        if (!std::isfinite(value)) {
            fail_at(start, "branch length must be finite");
        }
        if (value < 0.0) {
            fail_at(start, "branch length must be nonnegative");
        }
        nodes_[node].length = value;
        nodes_[node].has_length = true;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::vector<ParsedNode> nodes_;
};

}  // namespace detail

/*
 * Parses one Newick statement into an unrooted binary tree.
 *
 * A bifurcating top level is unrooted by suppressing the root and joining its
 * two children with an edge whose length is the sum of theirs. A trifurcating
 * top level is used as-is. Internal node labels are dropped and a length on
 * the outermost group is ignored.
 */
inline UnrootedTree parse_newick(std::string_view text, const NewickOptions& options = {}) {
    detail::NewickParser parser(text);
    std::vector<detail::ParsedNode> nodes = parser.parse();

    const detail::ParsedNode& root = nodes[0];
    if (root.children.empty()) {
        parser.fail_at(root.offset, "a tree needs at least two taxa");
    }
    if (root.children.size() == 1) {
        parser.fail_at(root.offset, "root group at offset " + std::to_string(root.offset) +
                                        " has a single child (degree-2 vertex)");
    }
    if (root.children.size() > 3) {
        parser.fail_at(root.offset, "root group at offset " + std::to_string(root.offset) +
                                        " has " + std::to_string(root.children.size()) +
                                        " children (non-binary vertex)");
    }

    std::unordered_set<std::string> labels;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const detail::ParsedNode& node = nodes[i];
        if (!node.has_length && !options.topology_only) {
            parser.fail_at(node.offset, "missing branch length");
        }
        if (node.children.empty()) {
            if (!labels.insert(node.label).second) {
                parser.fail_at(node.offset, "duplicate taxon label '" + node.label + "'");
            }
        } else if (node.children.size() != 2) {
            const std::size_t degree = node.children.size() + 1;
            parser.fail_at(node.offset, "group at offset " + std::to_string(node.offset) +
                                            " forms a vertex of degree " +
                                            std::to_string(degree) + "; trees must be binary");
        }
    }

    // Parsed node i becomes vertex i, except that a suppressed root has no vertex.
    const bool suppress_root = root.children.size() == 2;
    std::vector<int> vertex_of(nodes.size(), -1);
    std::vector<std::string> vertex_labels;
    for (std::size_t i = suppress_root ? 1 : 0; i < nodes.size(); ++i) {
        vertex_of[i] = static_cast<int>(vertex_labels.size());
        vertex_labels.push_back(nodes[i].children.empty() ? nodes[i].label : std::string());
    }

    std::vector<Edge> edges;
    edges.reserve(vertex_labels.size());
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const detail::ParsedNode& node = nodes[i];
        if (node.parent == 0 && suppress_root) {
            continue;
        }
        edges.push_back({vertex_of[node.parent], vertex_of[i], node.length});
    }
    if (suppress_root) {
        const int left = root.children[0];
        const int right = root.children[1];
        edges.push_back({vertex_of[left], vertex_of[right], nodes[left].length + nodes[right].length});
    }
    if (options.topology_only) {
        for (Edge& edge : edges) {
            edge.length = 1.0;
        }
    }
    try {
        return UnrootedTree(std::move(vertex_labels), std::move(edges));
    } catch (const TreeError& error) {
        parser.fail_at(0, error.what());
    }
}

/// Shortest decimal text that parses back to exactly `value`.
inline std::string format_length(double value) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

/*
 * Serializes a tree as a top-level trifurcation around its lowest-numbered
 * internal vertex. The two-taxon tree is written as "(A:len,B:0);", which
 * parses back to the same single edge.
 */
inline std::string write_newick(const UnrootedTree& tree) {
    if (tree.vertex_count() == 2) {
        const Edge& edge = tree.edge(0);
        return "(" + tree.label(edge.u) + ":" + format_length(edge.length) + "," +
               tree.label(edge.v) + ":0);";
    }
    VertexId center = 0;
    while (tree.is_leaf(center)) {
        ++center;
    }

    struct Frame {
        VertexId vertex;
        EdgeId via;
        std::size_t next = 0;
    };
    std::string out = "(";
    std::vector<Frame> stack;
    stack.push_back({center, -1});
    while (!stack.empty()) {
        Frame& frame = stack.back();
        const auto& incident = tree.incident(frame.vertex);
        if (frame.next < incident.size() && incident[frame.next] == frame.via) {
            ++frame.next;
        }
        if (frame.next < incident.size()) {
            const EdgeId e = incident[frame.next++];
            if (out.back() != '(') {
                out += ',';
            }
            const VertexId child = tree.edge(e).other(frame.vertex);
            if (tree.is_leaf(child)) {
                out += tree.label(child);
                out += ':';
                out += format_length(tree.edge(e).length);
            } else {
                out += '(';
                stack.push_back({child, e});
            }
            continue;
        }
        const EdgeId via = frame.via;
        stack.pop_back();
        out += ')';
        if (via >= 0) {
            out += ':';
            out += format_length(tree.edge(via).length);
        }
    }
    out += ';';
    return out;
}

}  // namespace pathdist
