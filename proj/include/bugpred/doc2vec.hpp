#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bugpred/matrix.hpp"
#include "bugpred/syntax_tree.hpp"
#include "bugpred/vocab.hpp"

namespace bugpred {

enum class Doc2VecMethod { kPvDm, kPvDbow };

const char* method_name(Doc2VecMethod m);
std::optional<Doc2VecMethod> method_from_name(std::string_view name);

struct Doc2VecHyper {
    Doc2VecMethod method = Doc2VecMethod::kPvDm;
    int dim = 25;
    int window = 12;
    int epochs = 80;
    int negatives = 5;
    double alpha_start = 0.025;
    double alpha_end = 0.0001;
    std::uint64_t seed = 1;

    // Throws std::invalid_argument when any bound is violated.
    void validate() const;

    bool operator==(const Doc2VecHyper&) const = default;
};

// Learned paragraph-vector model. doc_vecs rows align with doc_ids; for
// PV-DBOW no input word matrix exists (word_in stays empty).
struct Doc2VecModel {
    Doc2VecHyper hyper;
    Vocabulary vocab;
    Matrix word_in;   // V x dim, PV-DM only
    Matrix doc_vecs;  // D x dim
    Matrix word_out;  // V x dim
    std::vector<std::string> doc_ids;
    std::unordered_map<std::string, int> doc_index;

    bool operator==(const Doc2VecModel& o) const {
        return hyper == o.hyper && vocab == o.vocab && word_in == o.word_in &&
               doc_vecs == o.doc_vecs && word_out == o.word_out && doc_ids == o.doc_ids;
    }
};

struct TrainStats {
    std::vector<double> epoch_mean_loss;
};

// One negative-sampling pair: s = sigmoid(dot(input, target)),
// loss = -[label*log(s) + (1-label)*log(1-s)].
double pair_loss(std::span<const double> input, std::span<const double> target, int label);

// Gradients of pair_loss: d/d(target) = (s-label)*input, d/d(input) = (s-label)*target.
void pair_gradient(std::span<const double> input, std::span<const double> target, int label,
                   std::span<double> grad_input, std::span<double> grad_target);

// One SGD step on the pair: with g = alpha*(label - s),
//   target += g * input,  input += g * target   (pre-update target).
void sgd_step_pair(std::span<double> input, std::span<double> target, int label, double alpha);

// Trains a model over the corpus. Single-threaded; the training order and
// all noise draws are pure functions of hyper.seed, so identical inputs give
// bitwise-identical models. The learning rate decays linearly from
// alpha_start to alpha_end over (epoch, document) progress.
Doc2VecModel train(std::span<const TokenSequence> corpus, const Doc2VecHyper& hyper,
                   TrainStats* stats = nullptr);

// Trained paragraph vector for a document. Throws on unknown ids.
std::span<const double> doc_vector(const Doc2VecModel& model, const std::string& doc_id);

// dot(a,b) / (|a||b|). Throws on zero-norm input or length mismatch.
double cosine(std::span<const double> a, std::span<const double> b);

// Self-describing binary container (format documented in save_model's
// implementation). load(save(m)) == m bitwise; truncated files and version
// mismatches raise errors without producing a partial model.
void save_model(const Doc2VecModel& model, const std::string& path);
Doc2VecModel load_model(const std::string& path);

// Tabular export: header "doc_id,v0,...,v{dim-1}", one row per document,
// full-precision decimal.
void export_vectors(const Doc2VecModel& model, const std::string& path);

}  // namespace bugpred
