#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bugpred/classifiers.hpp"
#include "bugpred/matrix.hpp"

namespace bugpred {

// Fully connected net with ReLU hidden layers and one sigmoid output unit.
// Parameters live in one flat vector (per layer: weights row-major
// in x out, then biases), which keeps the finite-difference gradient check
// a straight loop over coordinates.
struct MlpNet {
    std::vector<int> layer_sizes;  // input, hidden..., 1
    std::vector<double> params;

    std::size_t param_count() const;
    static MlpNet init(int inputs, int hidden_layers, int hidden_units, std::uint64_t seed);
};

// Mean binary cross-entropy over the given rows plus l2_beta * sum(W^2)
// (biases unpenalized). grad may be null when only the loss is needed.
double mlp_loss_and_gradient(const MlpNet& net, const Matrix& x, const std::vector<int>& y,
                             std::span<const std::size_t> rows, double l2_beta,
                             std::vector<double>* grad);

std::vector<double> mlp_scores(const MlpNet& net, const Matrix& x);

MlpNet fit_mlp(const Matrix& x, const std::vector<int>& y, const MlpParams& params,
               std::uint64_t seed);

}  // namespace bugpred
