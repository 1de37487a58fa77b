#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bugpred/doc2vec.hpp"
#include "bugpred/rng.hpp"
#include "bugpred/vocab.hpp"

using namespace bugpred;

namespace {

std::vector<TokenSequence> toy_corpus() {
    return {
        {"a", {1, 2, 3, -2, 2, 1, -2}},
        {"b", {2, 3, 3, -2, 1, -2, -2}},
        {"c", {3, 1, 2, -2, -2, 1, 2}},
    };
}

Doc2VecHyper small_hyper(Doc2VecMethod method, std::uint64_t seed = 7) {
    Doc2VecHyper h;
    h.method = method;
    h.dim = 10;
    h.window = 2;
    h.epochs = 50;
    h.negatives = 5;
    h.seed = seed;
    return h;
}

}  // namespace

TEST_CASE("vocabulary counts and indices") {
    std::vector<TokenSequence> corpus = {{"a", {1, 2, 2}}, {"b", {2, 3}}};
    Vocabulary v = build_vocab(corpus);
    CHECK(v.size() == 3);
    CHECK(v.count_at(v.index_of(1)) == 1);
    CHECK(v.count_at(v.index_of(2)) == 3);
    CHECK(v.count_at(v.index_of(3)) == 1);
    CHECK(v.index_of(99) == -1);

    std::vector<TokenSequence> single = {{"a", {7}}};
    Vocabulary vs = build_vocab(single);
    CHECK(vs.size() == 1);
    CHECK(vs.noise_probability(0) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS(build_vocab(std::vector<TokenSequence>{}));
    CHECK_THROWS(build_vocab(std::vector<TokenSequence>{{"a", {}}}));
}

TEST_CASE("noise distribution is count^0.75 normalized") {
    // counts {a:1, b:8}: 8^0.75 = 4.75682846..., so p(a) = 1/(1+8^0.75).
    std::vector<TokenSequence> corpus = {{"a", {4, 9, 9, 9, 9, 9, 9, 9, 9}}};
    Vocabulary v = build_vocab(corpus);
    double expected_a = 1.0 / (1.0 + std::pow(8.0, 0.75));
    CHECK(v.noise_probability(v.index_of(4)) == doctest::Approx(expected_a).epsilon(1e-12));
    CHECK(v.noise_probability(v.index_of(4)) == doctest::Approx(0.1737).epsilon(1e-3));
    CHECK(v.noise_probability(v.index_of(9)) == doctest::Approx(0.8263).epsilon(1e-3));

    double total = v.noise_probability(0) + v.noise_probability(1);
    CHECK(std::abs(total - 1.0) <= 1e-9);

    // CDF inversion picks each token with its mass.
    CHECK(v.sample_noise(0.0) == 0);
    CHECK(v.sample_noise(0.999999) == 1);
}

TEST_CASE("sgd_step_pair matches the hand-computed 1-d update") {
    // input = target = 0.5, label 1, alpha 0.1:
    // s = sigmoid(0.25), both values become 0.5 + 0.1*(1-s)*0.5.
    std::vector<double> input{0.5}, target{0.5};
    double s = 1.0 / (1.0 + std::exp(-0.25));
    double expected = 0.5 + 0.1 * (1.0 - s) * 0.5;
    sgd_step_pair(input, target, 1, 0.1);
    CHECK(input[0] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(target[0] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(input[0] == doctest::Approx(0.52189).epsilon(1e-4));

    // zero input: target cannot move, input moves toward the target.
    std::vector<double> zero{0.0, 0.0}, t2{0.3, -0.4};
    std::vector<double> t2_before = t2;
    sgd_step_pair(zero, t2, 1, 0.1);
    CHECK(t2 == t2_before);
    CHECK(zero[0] == doctest::Approx(0.1 * 0.5 * 0.3));  // g = alpha*(1 - sigmoid(0))
    CHECK(zero[1] == doctest::Approx(0.1 * 0.5 * -0.4));

    // saturated positive pair: updates vanish.
    std::vector<double> big_in{40.0}, big_t{40.0};
    sgd_step_pair(big_in, big_t, 1, 0.1);
    CHECK(big_in[0] == doctest::Approx(40.0).epsilon(1e-12));
    CHECK(big_t[0] == doctest::Approx(40.0).epsilon(1e-12));
}

TEST_CASE("pair gradients match central finite differences") {
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        int dim = 1 + static_cast<int>(rng.next_below(8));
        int label = static_cast<int>(rng.next_below(2));
        std::vector<double> input(dim), target(dim);
        for (double& x : input) x = rng.next_in(-2.0, 2.0);
        for (double& x : target) x = rng.next_in(-2.0, 2.0);

        std::vector<double> grad_in(dim), grad_t(dim);
        pair_gradient(input, target, label, grad_in, grad_t);

        const double h = 1e-5;
        for (int i = 0; i < dim; ++i) {
            auto perturbed = [&](std::vector<double> v, double delta) {
                v[i] += delta;
                return v;
            };
            double num_in = (pair_loss(perturbed(input, h), target, label) -
                             pair_loss(perturbed(input, -h), target, label)) /
                            (2 * h);
            double num_t = (pair_loss(input, perturbed(target, h), label) -
                            pair_loss(input, perturbed(target, -h), label)) /
                           (2 * h);
            double denom_in = std::max({std::abs(num_in), std::abs(grad_in[i]), 1e-8});
            double denom_t = std::max({std::abs(num_t), std::abs(grad_t[i]), 1e-8});
            CHECK(std::abs(num_in - grad_in[i]) / denom_in < 1e-4);
            CHECK(std::abs(num_t - grad_t[i]) / denom_t < 1e-4);
        }
    }
}

TEST_CASE("hyper validation") {
    Doc2VecHyper h = small_hyper(Doc2VecMethod::kPvDm);
    CHECK_NOTHROW(h.validate());
    h.dim = 0;
    CHECK_THROWS(h.validate());
    h = small_hyper(Doc2VecMethod::kPvDm);
    h.epochs = 0;
    CHECK_THROWS(h.validate());
    h = small_hyper(Doc2VecMethod::kPvDm);
    h.alpha_end = h.alpha_start;
    CHECK_THROWS(h.validate());
}

TEST_CASE("training is bitwise deterministic per seed") {
    for (Doc2VecMethod method : {Doc2VecMethod::kPvDm, Doc2VecMethod::kPvDbow}) {
        auto corpus = toy_corpus();
        Doc2VecModel m1 = train(corpus, small_hyper(method));
        Doc2VecModel m2 = train(corpus, small_hyper(method));
        CHECK(m1 == m2);
        Doc2VecModel m3 = train(corpus, small_hyper(method, 8));
        CHECK(m1.doc_vecs.data != m3.doc_vecs.data);
    }
}

TEST_CASE("PV-DBOW stores no input word matrix, PV-DM does") {
    auto corpus = toy_corpus();
    CHECK(train(corpus, small_hyper(Doc2VecMethod::kPvDbow)).word_in.empty());
    CHECK_FALSE(train(corpus, small_hyper(Doc2VecMethod::kPvDm)).word_in.empty());
}

TEST_CASE("identical documents converge to nearby vectors") {
    std::vector<TokenSequence> corpus = {
        {"twin1", {1, 4, 4, 2, -2, 5, 1, -2}},
        {"twin2", {1, 4, 4, 2, -2, 5, 1, -2}},
        {"other", {9, 8, 8, 7, -2, 9, 7, -2, 8, -2}},
    };
    Doc2VecModel m = train(corpus, small_hyper(Doc2VecMethod::kPvDbow));
    CHECK(cosine(doc_vector(m, "twin1"), doc_vector(m, "twin2")) > 0.9);
}

TEST_CASE("per-epoch loss is non-increasing after warm-up") {
    // A corpus large enough that noise-draw variance does not mask the
    // trend: 24 documents of 40 tokens over a 12-token vocabulary.
    std::vector<TokenSequence> corpus;
    Rng gen(4242);
    for (int d = 0; d < 24; ++d) {
        TokenSequence seq;
        seq.doc_id = "doc" + std::to_string(d);
        for (int t = 0; t < 40; ++t)
            seq.tokens.push_back(1 + static_cast<int>(gen.next_below(12)));
        corpus.push_back(std::move(seq));
    }
    for (Doc2VecMethod method : {Doc2VecMethod::kPvDm, Doc2VecMethod::kPvDbow}) {
        Doc2VecHyper h = small_hyper(method);
        h.epochs = 30;
        TrainStats stats;
        train(corpus, h, &stats);
        REQUIRE(stats.epoch_mean_loss.size() == 30);
        for (std::size_t e = 2; e + 1 < stats.epoch_mean_loss.size(); ++e)
            CHECK(stats.epoch_mean_loss[e + 1] <= stats.epoch_mean_loss[e] + 1e-9);
    }
}

TEST_CASE("constant alpha when endpoints coincide is rejected, near-equal works") {
    // epochs=1 with alpha_end just under alpha_start: every step's alpha is
    // within the two endpoints.
    auto corpus = toy_corpus();
    Doc2VecHyper h = small_hyper(Doc2VecMethod::kPvDbow);
    h.epochs = 1;
    h.alpha_start = 0.025;
    h.alpha_end = 0.0249999;
    CHECK_NOTHROW(train(corpus, h));
}

TEST_CASE("doc_vector access") {
    auto corpus = toy_corpus();
    Doc2VecModel m = train(corpus, small_hyper(Doc2VecMethod::kPvDbow));
    CHECK(doc_vector(m, "a").size() == 10);
    CHECK_THROWS(doc_vector(m, "nope"));

    // Rows are independent storage.
    std::vector<double> before(doc_vector(m, "b").begin(), doc_vector(m, "b").end());
    m.doc_vecs(0, 0) += 100.0;
    std::vector<double> after(doc_vector(m, "b").begin(), doc_vector(m, "b").end());
    CHECK(before == after);
}

TEST_CASE("cosine closed forms") {
    std::vector<double> v{0.3, -0.2, 0.9};
    CHECK(cosine(v, v) == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> e1{1.0, 0.0}, e2{0.0, 1.0}, d{1.0, 1.0};
    CHECK(cosine(e1, e2) == doctest::Approx(0.0));
    CHECK(cosine(d, e1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    std::vector<double> zero{0.0, 0.0};
    CHECK_THROWS(cosine(zero, e1));
    CHECK_THROWS(cosine(e1, v));
}

TEST_CASE("model save/load round trip is bitwise") {
    namespace fs = std::filesystem;
    auto corpus = toy_corpus();
    Doc2VecModel m = train(corpus, small_hyper(Doc2VecMethod::kPvDm));
    fs::path path = fs::temp_directory_path() / "bugpred_model_test.d2v";
    save_model(m, path.string());
    Doc2VecModel back = load_model(path.string());
    CHECK(back == m);

    // the serialized PV-DBOW container carries no input word matrix
    Doc2VecModel dbow = train(corpus, small_hyper(Doc2VecMethod::kPvDbow));
    save_model(dbow, path.string());
    CHECK(load_model(path.string()).word_in.empty());

    // Truncation: every proper prefix fails without a partial model.
    auto size = fs::file_size(path);
    fs::path cut = fs::temp_directory_path() / "bugpred_model_cut.d2v";
    std::ifstream in(path, std::ios::binary);
    std::string bytes(static_cast<std::size_t>(size), '\0');
    in.read(bytes.data(), static_cast<std::streamsize>(size));
    {
        std::ofstream out(cut, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(size / 2));
    }
    CHECK_THROWS(load_model(cut.string()));

    // Version bump: the error names both versions.
    std::string bumped = bytes;
    bumped[7] = 9;  // version u32 starts after the 7-byte magic
    {
        std::ofstream out(cut, std::ios::binary);
        out.write(bumped.data(), static_cast<std::streamsize>(bumped.size()));
    }
    try {
        load_model(cut.string());
        FAIL("expected version error");
    } catch (const std::exception& e) {
        std::string what = e.what();
        CHECK(what.find("9") != std::string::npos);
        CHECK(what.find("1") != std::string::npos);
    }
    fs::remove(path);
    fs::remove(cut);
}

TEST_CASE("vector export format") {
    namespace fs = std::filesystem;
    auto corpus = toy_corpus();
    Doc2VecHyper h = small_hyper(Doc2VecMethod::kPvDbow);
    h.dim = 2;
    Doc2VecModel m = train(corpus, h);
    fs::path path = fs::temp_directory_path() / "bugpred_vectors_test.csv";
    export_vectors(m, path.string());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "doc_id,v0,v1");
    std::string row;
    std::getline(in, row);
    CHECK(row.substr(0, 2) == "a,");
    fs::remove(path);
}
