#pragma once

#include <cstdint>
#include <vector>

#include "bugpred/matrix.hpp"
#include "bugpred/rng.hpp"
#include "bugpred/syntax_tree.hpp"

namespace bugpred::testutil {

// Random code tree with at most `budget` nodes (at least 1), kinds in [1, kinds].
inline CodeTree random_code_tree(int budget, int kinds, Rng& rng) {
    CodeTree node{1 + static_cast<int>(rng.next_below(static_cast<std::size_t>(kinds))), {}};
    int remaining = budget - 1;
    while (remaining > 0) {
        if (rng.next_double() < 0.25) break;
        int child_budget = 1 + static_cast<int>(rng.next_below(static_cast<std::size_t>(remaining)));
        node.children.push_back(random_code_tree(child_budget, kinds, rng));
        remaining -= child_budget;
    }
    return node;
}

// Two separable clusters: label 0 near -center, label 1 near +center in
// every coordinate, spread roughly unit (sum of three uniforms).
inline void two_cluster_data(std::size_t n_per_class, std::size_t dims, double center,
                             std::uint64_t seed, Matrix& x, std::vector<int>& y) {
    Rng rng(seed);
    x = Matrix(2 * n_per_class, dims);
    y.assign(2 * n_per_class, 0);
    for (std::size_t r = 0; r < 2 * n_per_class; ++r) {
        int label = r < n_per_class ? 0 : 1;
        y[r] = label;
        double mu = label == 0 ? -center : center;
        for (std::size_t c = 0; c < dims; ++c)
            x(r, c) = mu + (rng.next_double() + rng.next_double() + rng.next_double() - 1.5);
    }
}

}  // namespace bugpred::testutil
