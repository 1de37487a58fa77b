#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bugpred/matrix.hpp"

namespace bugpred {

struct LabelRecord {
    std::string doc_id;
    long bug_count = 0;
};

// Labels file: comma-separated, header "doc_id,bug_count". Duplicate ids
// and negative counts are errors.
std::vector<LabelRecord> load_labels(const std::string& path);

// label = 1 iff bug_count > 0. Idempotent on already-binary counts.
std::map<std::string, int> binarize(std::span<const LabelRecord> records);

struct MetricsRecord {
    std::string doc_id;
    std::vector<double> values;  // aligned to MetricsData::metric_names
};

struct MetricsData {
    std::vector<std::string> metric_names;
    std::vector<MetricsRecord> records;
};

// Metrics file: comma-separated, header "doc_id,<metric abbreviations...>".
// Header order is preserved. A missing or non-numeric cell is a hard error
// reported with its row and column; there is no imputation.
MetricsData load_metrics(const std::string& path);

struct VectorData {
    std::vector<std::string> doc_ids;
    Matrix vectors;
};

// Reads the vectors export written by the embed stage
// (header "doc_id,v0,...,v{dim-1}").
VectorData load_vectors(const std::string& path);

enum class FeatureMode { kEmbedding, kMetrics, kCombined };

const char* mode_name(FeatureMode m);
std::optional<FeatureMode> mode_from_name(std::string_view name);

struct FeatureTable {
    std::vector<std::string> doc_ids;  // sorted ascending
    Matrix features;                   // N x F
    std::vector<int> labels;           // N, binary
    std::vector<std::string> feature_names;
    FeatureMode mode = FeatureMode::kEmbedding;

    std::size_t size() const { return doc_ids.size(); }
};

// Per-column mean / population standard deviation fitted on training rows.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stddev;          // stored as fitted, zeros included
    std::vector<bool> zero_variance;     // flagged sigma == 0 columns
};

Standardizer fit_standardizer(const Matrix& features);

// column j -> (x - mean_j) / stddev_j; zero-variance columns center to 0.
Matrix apply_standardizer(const Standardizer& s, const Matrix& features);

// Row indices (into `labels`) of the minority rows to duplicate so that
// minority count reaches round(ratio * majority count). Empty when the
// minority already meets the target. Draws are with replacement, seeded.
std::vector<std::size_t> upsample_draws(std::span<const int> labels, double ratio,
                                        std::uint64_t seed);

// Appends the drawn duplicates to the table; originals are all retained and
// the majority class is untouched. Throws on single-class tables or a ratio
// outside (0, 1].
FeatureTable upsample(const FeatureTable& table, double ratio, std::uint64_t seed);

struct JoinReport {
    std::size_t vectors_in = 0;
    std::size_t metrics_in = 0;
    std::size_t labels_in = 0;
    std::size_t joined = 0;
    std::size_t dropped_vectors = 0;
    std::size_t dropped_metrics = 0;
    std::size_t dropped_labels = 0;

    std::string to_string() const;
};

// Inner join on doc_id across the sources the mode requires; rows come out
// sorted by doc_id regardless of input order. Combined mode lays embedding
// columns out first, then metrics. An empty join is an error that reports
// the per-source row counts.
FeatureTable assemble(FeatureMode mode, const VectorData* vectors, const MetricsData* metrics,
                      const std::map<std::string, int>& labels, JoinReport* report = nullptr);

// Feature table file: comma-separated, header "doc_id,<names...>,label".
void write_feature_table(const FeatureTable& table, const std::string& path);

}  // namespace bugpred
