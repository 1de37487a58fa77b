#include "bugpred/doc2vec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "bugpred/rng.hpp"

namespace bugpred {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

const char* method_name(Doc2VecMethod m) {
    return m == Doc2VecMethod::kPvDm ? "pvdm" : "pvdbow";
}

std::optional<Doc2VecMethod> method_from_name(std::string_view name) {
    if (name == "pvdm" || name == "pv-dm" || name == "dm") return Doc2VecMethod::kPvDm;
    if (name == "pvdbow" || name == "pv-dbow" || name == "dbow") return Doc2VecMethod::kPvDbow;
    return std::nullopt;
}

void Doc2VecHyper::validate() const {
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (negatives < 1) throw std::invalid_argument("negatives must be >= 1");
    if (!(alpha_start > alpha_end) || !(alpha_end > 0.0))
        throw std::invalid_argument("need alpha_start > alpha_end > 0");
}

double pair_loss(std::span<const double> input, std::span<const double> target, int label) {
    // Stable form of -[y*log(s) + (1-y)*log(1-s)] with s = sigmoid(z).
    double z = dot(input, target);
    double y = static_cast<double>(label);
    return std::max(z, 0.0) - y * z + std::log1p(std::exp(-std::abs(z)));
}

void pair_gradient(std::span<const double> input, std::span<const double> target, int label,
                   std::span<double> grad_input, std::span<double> grad_target) {
    double s = sigmoid(dot(input, target));
    double d = s - static_cast<double>(label);
    for (std::size_t i = 0; i < input.size(); ++i) {
        grad_input[i] = d * target[i];
        grad_target[i] = d * input[i];
    }
}

void sgd_step_pair(std::span<double> input, std::span<double> target, int label, double alpha) {
    double g = alpha * (static_cast<double>(label) - sigmoid(dot(input, target)));
    for (std::size_t i = 0; i < input.size(); ++i) {
        double t_pre = target[i];
        target[i] += g * input[i];
        input[i] += g * t_pre;
    }
}

namespace {

struct StepAccum {
    double loss = 0.0;
    std::int64_t steps = 0;
};

// Runs the positive pair plus `negatives` noise pairs against `input`,
// mutating input and the word_out rows in place. Noise draws that hit the
// target index are skipped (the draw is still consumed).
void run_pairs(std::span<double> input, Matrix& word_out, int target_index,
               const Vocabulary& vocab, int negatives, double alpha, Rng& rng, StepAccum& acc) {
    acc.loss += pair_loss(input, word_out.row(target_index), 1);
    ++acc.steps;
    sgd_step_pair(input, word_out.row(target_index), 1, alpha);
    for (int n = 0; n < negatives; ++n) {
        int noise = vocab.sample_noise(rng.next_double());
        if (noise == target_index) continue;
        acc.loss += pair_loss(input, word_out.row(noise), 0);
        ++acc.steps;
        sgd_step_pair(input, word_out.row(noise), 0, alpha);
    }
}

}  // namespace

Doc2VecModel train(std::span<const TokenSequence> corpus, const Doc2VecHyper& hyper,
                   TrainStats* stats) {
    hyper.validate();

    Doc2VecModel model;
    model.hyper = hyper;
    model.vocab = build_vocab(corpus);

    const int dim = hyper.dim;
    const int vocab_size = model.vocab.size();
    const std::size_t doc_count = corpus.size();
    const bool dm = hyper.method == Doc2VecMethod::kPvDm;

    model.doc_ids.reserve(doc_count);
    for (const TokenSequence& seq : corpus) {
        model.doc_index.emplace(seq.doc_id, static_cast<int>(model.doc_ids.size()));
        model.doc_ids.push_back(seq.doc_id);
    }
    if (model.doc_index.size() != doc_count) throw std::runtime_error("duplicate document ids");

    Rng rng(hyper.seed);
    auto init_uniform = [&](Matrix& m, std::size_t rows) {
        m = Matrix(rows, static_cast<std::size_t>(dim));
        for (double& x : m.data) x = rng.next_in(-0.5 / dim, 0.5 / dim);
    };
    init_uniform(model.doc_vecs, doc_count);
    if (dm) init_uniform(model.word_in, static_cast<std::size_t>(vocab_size));
    model.word_out = Matrix(static_cast<std::size_t>(vocab_size), static_cast<std::size_t>(dim));

    // Token indices per document, resolved once.
    std::vector<std::vector<int>> docs(doc_count);
    for (std::size_t d = 0; d < doc_count; ++d) {
        docs[d].reserve(corpus[d].tokens.size());
        for (int t : corpus[d].tokens) docs[d].push_back(model.vocab.index_of(t));
    }

    const double total_progress_units = static_cast<double>(hyper.epochs) * doc_count;
    std::vector<double> mean(dim);
    std::vector<double> mean_pre(dim);
    std::int64_t processed_docs = 0;

    // Noise draws are seeded per (document, position), not from a running
    // stream: every epoch contrasts the same fixed noise set, which makes
    // the per-epoch mean loss a function of the model state alone.
    const std::uint64_t noise_base = derive_seed(hyper.seed, 0x6e6f6973);

    if (stats) stats->epoch_mean_loss.clear();
    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        StepAccum acc;
        for (std::size_t d = 0; d < doc_count; ++d) {
            double alpha = hyper.alpha_start +
                           (hyper.alpha_end - hyper.alpha_start) *
                               (static_cast<double>(processed_docs) / total_progress_units);
            const std::vector<int>& doc = docs[d];
            const int len = static_cast<int>(doc.size());
            std::span<double> doc_row = model.doc_vecs.row(d);

            for (int t = 0; t < len; ++t) {
                const int target = doc[t];
                Rng noise_rng(derive_seed(noise_base, d, static_cast<std::uint64_t>(t)));
                if (!dm) {
                    run_pairs(doc_row, model.word_out, target, model.vocab, hyper.negatives,
                              alpha, noise_rng, acc);
                    continue;
                }

                // PV-DM: input is the mean of the document vector and the
                // context word vectors; the input-side delta is split
                // evenly back across the contributors.
                int lo = std::max(0, t - hyper.window);
                int hi = std::min(len - 1, t + hyper.window);
                int contributors = 1 + (hi - lo);  // doc vector + context (t excluded)
                for (int i = 0; i < dim; ++i) mean[i] = doc_row[i];
                for (int c = lo; c <= hi; ++c) {
                    if (c == t) continue;
                    std::span<const double> w = model.word_in.row(doc[c]);
                    for (int i = 0; i < dim; ++i) mean[i] += w[i];
                }
                for (int i = 0; i < dim; ++i) mean[i] /= contributors;
                std::copy(mean.begin(), mean.end(), mean_pre.begin());

                run_pairs(mean, model.word_out, target, model.vocab, hyper.negatives, alpha,
                          noise_rng, acc);

                for (int i = 0; i < dim; ++i) mean[i] = (mean[i] - mean_pre[i]) / contributors;
                for (int i = 0; i < dim; ++i) doc_row[i] += mean[i];
                for (int c = lo; c <= hi; ++c) {
                    if (c == t) continue;
                    std::span<double> w = model.word_in.row(doc[c]);
                    for (int i = 0; i < dim; ++i) w[i] += mean[i];
                }
            }
            ++processed_docs;
        }
        if (stats)
            stats->epoch_mean_loss.push_back(acc.steps ? acc.loss / static_cast<double>(acc.steps)
                                                       : 0.0);
    }
    return model;
}

std::span<const double> doc_vector(const Doc2VecModel& model, const std::string& doc_id) {
    auto it = model.doc_index.find(doc_id);
    if (it == model.doc_index.end()) throw std::runtime_error("unknown document id: " + doc_id);
    return model.doc_vecs.row(static_cast<std::size_t>(it->second));
}

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("cosine: length mismatch");
    double na = std::sqrt(dot(a, a));
    double nb = std::sqrt(dot(b, b));
    if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine: zero-norm input");
    return dot(a, b) / (na * nb);
}

// ---------------------------------------------------------------------------
// Model container. Layout (little-endian, all sizes fixed):
//   magic "BPD2V1\n"                       7 bytes
//   u32   format version (currently 1)
//   u8    method (0 = PV-DM, 1 = PV-DBOW)
//   i32   dim, window, epochs, negatives
//   f64   alpha_start, alpha_end
//   u64   seed
//   u32   V;  V * (i32 token, i64 count)   first-occurrence order
//   u32   D;  D * (u32 len, bytes) doc ids
//   u8    has_word_in
//   per matrix (word_in?, doc_vecs, word_out): u64 rows, u64 cols, raw f64
//   magic "END\n"                          4 bytes
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[] = "BPD2V1\n";
constexpr char kTrailer[] = "END\n";
constexpr std::uint32_t kFormatVersion = 1;

template <class T>
void put(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw std::runtime_error("model file truncated");
    return value;
}

void put_matrix(std::ostream& out, const Matrix& m) {
    put<std::uint64_t>(out, m.rows);
    put<std::uint64_t>(out, m.cols);
    out.write(reinterpret_cast<const char*>(m.data.data()),
              static_cast<std::streamsize>(m.data.size() * sizeof(double)));
}

Matrix get_matrix(std::istream& in) {
    Matrix m;
    m.rows = static_cast<std::size_t>(get<std::uint64_t>(in));
    m.cols = static_cast<std::size_t>(get<std::uint64_t>(in));
    m.data.resize(m.rows * m.cols);
    in.read(reinterpret_cast<char*>(m.data.data()),
            static_cast<std::streamsize>(m.data.size() * sizeof(double)));
    if (!in) throw std::runtime_error("model file truncated");
    return m;
}

}  // namespace

void save_model(const Doc2VecModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open model file for writing: " + path);

    out.write(kMagic, sizeof(kMagic) - 1);
    put<std::uint32_t>(out, kFormatVersion);
    put<std::uint8_t>(out, model.hyper.method == Doc2VecMethod::kPvDm ? 0 : 1);
    put<std::int32_t>(out, model.hyper.dim);
    put<std::int32_t>(out, model.hyper.window);
    put<std::int32_t>(out, model.hyper.epochs);
    put<std::int32_t>(out, model.hyper.negatives);
    put<double>(out, model.hyper.alpha_start);
    put<double>(out, model.hyper.alpha_end);
    put<std::uint64_t>(out, model.hyper.seed);

    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.vocab.size()));
    for (int i = 0; i < model.vocab.size(); ++i) {
        put<std::int32_t>(out, model.vocab.token_at(i));
        put<std::int64_t>(out, model.vocab.count_at(i));
    }
    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.doc_ids.size()));
    for (const std::string& id : model.doc_ids) {
        put<std::uint32_t>(out, static_cast<std::uint32_t>(id.size()));
        out.write(id.data(), static_cast<std::streamsize>(id.size()));
    }
    put<std::uint8_t>(out, model.word_in.empty() ? 0 : 1);
    if (!model.word_in.empty()) put_matrix(out, model.word_in);
    put_matrix(out, model.doc_vecs);
    put_matrix(out, model.word_out);
    out.write(kTrailer, sizeof(kTrailer) - 1);
    if (!out) throw std::runtime_error("write failed: " + path);
}

Doc2VecModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path);

    char magic[sizeof(kMagic) - 1];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
        throw std::runtime_error("not a model file: " + path);
    std::uint32_t version = get<std::uint32_t>(in);
    if (version != kFormatVersion)
        throw std::runtime_error("model format version " + std::to_string(version) +
                                 " is not supported (this build reads version " +
                                 std::to_string(kFormatVersion) + ")");

    Doc2VecModel model;
    model.hyper.method = get<std::uint8_t>(in) == 0 ? Doc2VecMethod::kPvDm : Doc2VecMethod::kPvDbow;
    model.hyper.dim = get<std::int32_t>(in);
    model.hyper.window = get<std::int32_t>(in);
    model.hyper.epochs = get<std::int32_t>(in);
    model.hyper.negatives = get<std::int32_t>(in);
    model.hyper.alpha_start = get<double>(in);
    model.hyper.alpha_end = get<double>(in);
    model.hyper.seed = get<std::uint64_t>(in);

    std::uint32_t vocab_size = get<std::uint32_t>(in);
    std::vector<int> tokens(vocab_size);
    std::vector<std::int64_t> counts(vocab_size);
    for (std::uint32_t i = 0; i < vocab_size; ++i) {
        tokens[i] = get<std::int32_t>(in);
        counts[i] = get<std::int64_t>(in);
    }
    model.vocab = Vocabulary::from_counts(std::move(tokens), std::move(counts));

    std::uint32_t doc_count = get<std::uint32_t>(in);
    model.doc_ids.resize(doc_count);
    for (std::uint32_t i = 0; i < doc_count; ++i) {
        std::uint32_t len = get<std::uint32_t>(in);
        std::string id(len, '\0');
        in.read(id.data(), len);
        if (!in) throw std::runtime_error("model file truncated");
        model.doc_ids[i] = std::move(id);
        model.doc_index.emplace(model.doc_ids[i], static_cast<int>(i));
    }
    bool has_word_in = get<std::uint8_t>(in) != 0;
    if (has_word_in) model.word_in = get_matrix(in);
    model.doc_vecs = get_matrix(in);
    model.word_out = get_matrix(in);

    char trailer[sizeof(kTrailer) - 1];
    in.read(trailer, sizeof(trailer));
    if (!in || std::memcmp(trailer, kTrailer, sizeof(trailer)) != 0)
        throw std::runtime_error("model file truncated");
    return model;
}

void export_vectors(const Doc2VecModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open vectors file for writing: " + path);
    out << "doc_id";
    for (int i = 0; i < model.hyper.dim; ++i) out << ",v" << i;
    out << '\n';
    char buf[40];
    for (std::size_t d = 0; d < model.doc_ids.size(); ++d) {
        out << model.doc_ids[d];
        for (double x : model.doc_vecs.row(d)) {
            std::snprintf(buf, sizeof(buf), "%.17g", x);
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace bugpred
