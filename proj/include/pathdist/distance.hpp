#pragma once

#include <chrono>
#include <cmath>
#include <string_view>

#include "pathdist/inner_product.hpp"
#include "pathdist/rooted_tree.hpp"
#include "pathdist/squared_paths.hpp"
#include "pathdist/testkit.hpp"

namespace pathdist {

enum class Method { fast, quadratic };

inline std::string_view method_name(Method m) { return m == Method::fast ? "fast" : "quadratic"; }

struct DistanceResult {
    /// Sum over taxon pairs of squared path-length differences.
    double delta = 0.0;
    /// The metric itself.
    double sqrt_delta = 0.0;
    /// Method actually used (trees on at most three taxa always use quadratic).
    Method method = Method::fast;
    /// Set when a negative rounding residue was clamped to zero.
    bool clamped = false;
    // Fast-path terms; zero under the quadratic method.
    double sum_squared_first = 0.0;
    double sum_squared_second = 0.0;
    double inner_product = 0.0;
    double millis = 0.0;
    long long touched_nodes = 0;
};

/*
 * Path-length distance between the two trees of a validated pair.
 *
 * The fast method expands the squared differences into
 *   sum p^2 + sum q^2 - 2 sum p q
 * with the first two terms from the linear edge-statistics pass and the
 * cross term from the decomposition-based traversal.
 */
inline DistanceResult path_length_distance(const ValidatedPair& pair, Method method = Method::fast) {
    const auto start = std::chrono::steady_clock::now();
    DistanceResult result;
    if (method == Method::quadratic || pair.leaf_count() <= 3) {
        result.method = Method::quadratic;
        result.delta = testkit::delta_bruteforce(pair.first_tree, pair.second_tree);
    } else {
        result.method = Method::fast;
        result.sum_squared_first = sum_squared_paths(pair.first);
        result.sum_squared_second = sum_squared_paths(pair.second);
        const InnerProductResult cross = inner_product_sum(pair);
        result.inner_product = cross.value;
        result.touched_nodes = cross.touched_nodes;
        result.delta = result.sum_squared_first + result.sum_squared_second - 2.0 * cross.value;
        if (result.delta < 0.0) {
            result.delta = 0.0;
            result.clamped = true;
        }
    }
    result.sqrt_delta = std::sqrt(result.delta);
    result.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace pathdist
