#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bugpred/classifiers.hpp"
#include "bugpred/dataset.hpp"
#include "bugpred/doc2vec.hpp"
#include "bugpred/syntax_tree.hpp"

namespace bugpred {

struct Scores {
    double precision = 0.0;
    double recall = 0.0;
    double f = 0.0;
};

// precision = tp/(tp+fp), recall = tp/(tp+fn), f = 2pr/(p+r); every
// zero-denominator case yields 0.
Scores f_score(long tp, long fp, long fn);

struct FoldPlan {
    std::vector<int> fold_of_row;  // values in [0, k)
    int k = 10;
    std::uint64_t seed = 0;
};

// Positives and negatives are shuffled independently (seeded) and dealt
// round-robin, so per-fold class counts differ by at most one. Throws when
// either class has fewer than k members.
FoldPlan stratified_folds(std::span<const int> labels, int k, std::uint64_t seed);

struct ExperimentDescriptor {
    FeatureMode mode = FeatureMode::kEmbedding;
    std::optional<Doc2VecHyper> embedding;  // absent for metrics-only experiments
    std::string classifier;
    int k_folds = 10;
    double upsample_ratio = 0.5;
    std::uint64_t seed = 0;
    std::optional<int> permutation;

    // Canonical key; reports sort by it, and per-cell seeds derive from it
    // so any grid subset reproduces the full run's results.
    std::string key() const;
};

struct FoldMetrics {
    long tp = 0, fp = 0, fn = 0;
    double precision = 0.0, recall = 0.0, f = 0.0;
};

struct EvalReport {
    ExperimentDescriptor descriptor;
    std::vector<FoldMetrics> folds;
    double mean_precision = 0.0, mean_recall = 0.0, mean_f = 0.0;
};

// Test hook: observes what each fold's preprocessing actually used.
struct CrossValObserver {
    virtual ~CrossValObserver() = default;
    virtual void on_fold(int fold, std::span<const std::size_t> train_rows,
                         std::span<const std::size_t> test_rows, const Standardizer& standardizer,
                         std::span<const std::size_t> upsample_sources) = 0;
};

// Per fold: fit the standardizer on the training rows, transform both
// sides, upsample the transformed training rows, fit, score the untouched
// test fold. Nothing from the test fold reaches the standardizer, the
// upsampler, or fit. The aggregate is the mean of per-fold metrics.
EvalReport cross_validate(const FeatureTable& table, const ClassifierSpec& spec, int k,
                          std::uint64_t seed, double upsample_ratio,
                          CrossValObserver* observer = nullptr);

// Relabels rows: row i takes the label of row perm[i]. perm must be a
// permutation of 0..N-1; the label multiset is preserved.
FeatureTable apply_label_permutation(const FeatureTable& table,
                                     std::span<const std::size_t> perm);

std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed);

// Runs cross_validate on n copies of the table with permuted labels;
// permutation i and its fold seeds derive from (seed, i). The input table
// is untouched. Permutations run in parallel across workers.
std::vector<EvalReport> permutation_test(const FeatureTable& table, const ClassifierSpec& spec,
                                         int n_permutations, std::uint64_t seed, int k = 10,
                                         double upsample_ratio = 0.5, int workers = 1);

struct GridSpec {
    std::vector<Doc2VecMethod> methods;
    std::vector<int> dims;
    std::vector<int> windows;
    std::vector<int> epochs;
    int negatives = 5;
    double alpha_start = 0.025;
    double alpha_end = 0.0001;
    std::vector<ClassifierSpec> classifiers;
    std::vector<FeatureMode> modes;
    int k_folds = 10;
    double upsample_ratio = 0.5;

    std::size_t embedding_config_count() const {
        return methods.size() * dims.size() * windows.size() * epochs.size();
    }

    // methods {pvdm, pvdbow} x dims {25,50,75,150} x windows {4,8,12}
    // x epochs {6,10,20,40,60,80,100}; the full classifier roster.
    static GridSpec defaults();
};

struct GridCellResult {
    ExperimentDescriptor descriptor;
    std::optional<EvalReport> report;
    std::string error;  // non-empty when the cell failed
};

// Trains one embedding model per grid configuration (seeded from the
// config's descriptor), assembles each requested feature mode, and
// cross-validates every classifier. Configurations run in parallel; each
// task is single-threaded and seeded, so results are identical at any
// worker count. Failures are recorded per cell without aborting the grid.
// Results come back sorted by descriptor key.
std::vector<GridCellResult> grid_run(std::span<const TokenSequence> corpus, const GridSpec& grid,
                                     const std::map<std::string, int>& labels,
                                     const MetricsData* metrics, std::uint64_t master_seed,
                                     int workers);

struct SynthCorpus {
    std::vector<TokenSequence> docs;
    std::map<std::string, int> labels;
};

// Desk-scale fixture: every document is a flattened random tree (so
// validate_sequence holds). Background tokens are uniform over
// [1, vocab_size] minus the motif tokens; label-1 documents embed the motif
// as one contiguous chain with probability p_motif, label-0 documents never
// do.
SynthCorpus synth_corpus(int n_per_class, int vocab_size, std::span<const int> motif,
                         double p_motif, std::uint64_t seed);

}  // namespace bugpred
