// Distance between two small trees, with the three terms of the expansion.
#include <iostream>

#include "pathdist/pathdist.hpp"

int main() {
    using namespace pathdist;

    const UnrootedTree first = parse_newick("((A:1,B:1):0.5,(C:1,D:1):0.5);");
    const UnrootedTree second = parse_newick("((A:1,C:1):0.5,(B:1,D:1):0.5);");
    const ValidatedPair pair = validate_pair(first, second);

    const DistanceResult fast = path_length_distance(pair, Method::fast);
    std::cout << "sum p^2   = " << fast.sum_squared_first << '\n'
              << "sum q^2   = " << fast.sum_squared_second << '\n'
              << "sum p q   = " << fast.inner_product << '\n'
              << "delta     = " << fast.delta << '\n'
              << "sqrt      = " << fast.sqrt_delta << '\n';

    const DistanceResult slow = path_length_distance(pair, Method::quadratic);
    std::cout << "quadratic = " << slow.delta << '\n';
    return 0;
}
