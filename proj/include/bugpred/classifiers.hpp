#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bugpred/matrix.hpp"

namespace bugpred {

enum class ClassifierFamily { kNaiveBayes, kLinear, kLogistic, kTree, kForest, kKnn, kMlp };

enum class SplitCriterion { kGini, kEntropy };

struct NaiveBayesParams {
    bool operator==(const NaiveBayesParams&) const = default;
};

struct LinearParams {
    double threshold = 0.5;
    bool operator==(const LinearParams&) const = default;
};

struct LogisticParams {
    double c = 2.0;       // regularization weight; lambda = 1 / (c * N) on the mean log-loss
    double tol = 1e-4;
    bool operator==(const LogisticParams&) const = default;
};

struct TreeParams {
    int max_depth = 10;
    SplitCriterion criterion = SplitCriterion::kGini;
    bool operator==(const TreeParams&) const = default;
};

struct ForestParams {
    int n_trees = 100;
    int max_depth = 10;
    SplitCriterion criterion = SplitCriterion::kEntropy;
    bool operator==(const ForestParams&) const = default;
};

struct KnnParams {
    int k = 18;  // uniform weights; 9-9 vote ties resolve to label 0
    bool operator==(const KnnParams&) const = default;
};

// Feed-forward binary classifier: `hidden_layers` ReLU layers of
// `hidden_units` each, one sigmoid output unit, binary cross-entropy loss,
// AdaGrad updates.
struct MlpParams {
    int hidden_layers = 5;
    int hidden_units = 200;
    double learning_rate = 0.05;
    int epochs = 10;
    int batch_size = 100;
    double l2_beta = 0.0;
    bool early_stopping = false;         // F-score on a held-out slice of the training data
    double validation_fraction = 0.1;
    int patience = 5;
    int max_epochs = 50;                 // cap when early stopping is on
    bool operator==(const MlpParams&) const = default;
};

struct ClassifierSpec {
    ClassifierFamily family = ClassifierFamily::kLogistic;
    std::variant<NaiveBayesParams, LinearParams, LogisticParams, TreeParams, ForestParams,
                 KnnParams, MlpParams>
        params;
    std::string preset;  // non-empty for named mlp presets ("sdnnc", "cdnnc")

    std::string name() const;  // preset name, or the family name

    static ClassifierSpec defaults(ClassifierFamily family);
    static ClassifierSpec sdnnc();  // 5 x 200, lr 0.05, 10 epochs, batch 100
    static ClassifierSpec cdnnc();  // 5 x 250, L2 beta 5e-4, F-score early stopping
    static std::optional<ClassifierSpec> from_name(std::string_view name);
    static std::vector<ClassifierSpec> full_roster();

    template <class T>
    const T& as() const { return std::get<T>(params); }
};

const char* family_name(ClassifierFamily f);

class TrainedModel;

// Trains `spec` on X (N x F) and binary y. Requirements: N >= 2, finite
// features, both classes present (knn tolerates one). Sampling families
// (forest, mlp) draw from streams derived from `seed`; forest trees may run
// in parallel since tree i's stream depends only on (seed, i).
TrainedModel fit(const ClassifierSpec& spec, const Matrix& x, const std::vector<int>& y,
                 std::uint64_t seed, int workers = 1);

class TrainedModel {
public:
    // Binary labels. For score-based families: label = score >= 0.5.
    std::vector<int> predict(const Matrix& x) const;

    // Scores in [0, 1] (linear scores are clamped).
    std::vector<double> predict_score(const Matrix& x) const;

    ClassifierFamily family() const { return family_; }
    std::size_t feature_count() const { return feature_count_; }

    struct Impl;
    explicit TrainedModel(std::shared_ptr<const Impl> impl);

private:
    std::shared_ptr<const Impl> impl_;
    ClassifierFamily family_;
    std::size_t feature_count_ = 0;
};

namespace detail {

// Single CART tree, exposed so the forest path can be checked against a
// directly grown tree.
struct TreeNodeSplit {
    int feature = -1;          // -1 marks a leaf
    double threshold = 0.0;    // x[feature] <= threshold goes left
    int left = -1, right = -1;
    int leaf_label = 0;
    double leaf_score = 0.0;   // fraction of label-1 rows in the leaf
};

struct DecisionTree {
    std::vector<TreeNodeSplit> nodes;
    int predict_row(std::span<const double> row) const;
    double score_row(std::span<const double> row) const;
};

struct TreeGrowConfig {
    int max_depth = 10;
    SplitCriterion criterion = SplitCriterion::kGini;
    int features_per_split = 0;  // 0 = all features
};

DecisionTree grow_tree(const Matrix& x, const std::vector<int>& y,
                       const std::vector<std::size_t>& rows, const TreeGrowConfig& config,
                       std::uint64_t feature_rng_seed);

std::vector<std::size_t> bootstrap_rows(std::size_t n, std::uint64_t seed);

}  // namespace detail

}  // namespace bugpred
