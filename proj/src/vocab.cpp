#include "bugpred/vocab.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bugpred {

int Vocabulary::index_of(int token) const {
    auto it = token_to_index_.find(token);
    return it == token_to_index_.end() ? -1 : it->second;
}

double Vocabulary::noise_probability(int index) const {
    return index == 0 ? noise_cdf_[0] : noise_cdf_[index] - noise_cdf_[index - 1];
}

int Vocabulary::sample_noise(double u) const {
    auto it = std::upper_bound(noise_cdf_.begin(), noise_cdf_.end(), u);
    if (it == noise_cdf_.end()) --it;
    return static_cast<int>(it - noise_cdf_.begin());
}

bool Vocabulary::operator==(const Vocabulary& o) const {
    return index_to_token_ == o.index_to_token_ && counts_ == o.counts_;
}

void Vocabulary::rebuild_noise_table() {
    noise_cdf_.resize(counts_.size());
    double total = 0.0;
    for (std::int64_t c : counts_) total += std::pow(static_cast<double>(c), 0.75);
    double acc = 0.0;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        acc += std::pow(static_cast<double>(counts_[i]), 0.75) / total;
        noise_cdf_[i] = acc;
    }
    noise_cdf_.back() = 1.0;  // absorb rounding in the last bucket
}

Vocabulary Vocabulary::build(std::span<const TokenSequence> corpus) {
    if (corpus.empty()) throw std::runtime_error("empty corpus");
    Vocabulary v;
    for (const TokenSequence& seq : corpus) {
        if (seq.tokens.empty())
            throw std::runtime_error("empty document: " + seq.doc_id);
        for (int t : seq.tokens) {
            auto [it, inserted] = v.token_to_index_.try_emplace(t, v.size());
            if (inserted) {
                v.index_to_token_.push_back(t);
                v.counts_.push_back(0);
            }
            ++v.counts_[it->second];
        }
    }
    v.rebuild_noise_table();
    return v;
}

Vocabulary Vocabulary::from_counts(std::vector<int> tokens, std::vector<std::int64_t> counts) {
    if (tokens.size() != counts.size() || tokens.empty())
        throw std::runtime_error("malformed vocabulary");
    Vocabulary v;
    v.index_to_token_ = std::move(tokens);
    v.counts_ = std::move(counts);
    for (std::size_t i = 0; i < v.index_to_token_.size(); ++i)
        v.token_to_index_[v.index_to_token_[i]] = static_cast<int>(i);
    v.rebuild_noise_table();
    return v;
}

Vocabulary build_vocab(std::span<const TokenSequence> corpus) { return Vocabulary::build(corpus); }

}  // namespace bugpred
