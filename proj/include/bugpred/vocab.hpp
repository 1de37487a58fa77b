#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "bugpred/syntax_tree.hpp"

namespace bugpred {

// Token vocabulary over a flattened corpus. Indices are assigned in first
// occurrence order, so the mapping is a pure function of the corpus. The
// noise table is the cumulative distribution with P(token) proportional to
// count^0.75, used for negative sampling.
class Vocabulary {
public:
    Vocabulary() = default;

    int size() const { return static_cast<int>(index_to_token_.size()); }
    int index_of(int token) const;            // -1 when absent
    int token_at(int index) const { return index_to_token_[index]; }
    std::int64_t count_at(int index) const { return counts_[index]; }

    // Probability mass of each token under the noise distribution.
    double noise_probability(int index) const;

    // Maps u in [0,1) to a token index by inverting the noise CDF.
    int sample_noise(double u) const;

    bool operator==(const Vocabulary&) const;

    static Vocabulary build(std::span<const TokenSequence> corpus);
    static Vocabulary from_counts(std::vector<int> tokens, std::vector<std::int64_t> counts);

private:
    void rebuild_noise_table();

    std::unordered_map<int, int> token_to_index_;
    std::vector<int> index_to_token_;
    std::vector<std::int64_t> counts_;
    std::vector<double> noise_cdf_;
};

// Every distinct token (markers included) gets an index; counts are corpus
// frequencies; all tokens are kept (min_count = 1). Throws on an empty
// corpus or an empty document.
Vocabulary build_vocab(std::span<const TokenSequence> corpus);

}  // namespace bugpred
