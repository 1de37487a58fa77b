#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "bugpred/dataset.hpp"
#include "bugpred/rng.hpp"

using namespace bugpred;

namespace {

namespace fs = std::filesystem;

fs::path write_temp(const std::string& name, const std::string& content) {
    fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p;
}

}  // namespace

TEST_CASE("labels load and binarize") {
    auto p = write_temp("bp_labels.csv", "doc_id,bug_count\na,0\nb,2\nc,1\n");
    auto records = load_labels(p.string());
    REQUIRE(records.size() == 3);
    auto labels = binarize(records);
    CHECK(labels.at("a") == 0);
    CHECK(labels.at("b") == 1);
    CHECK(labels.at("c") == 1);

    // binarize of already-binary counts changes nothing
    std::vector<LabelRecord> binary;
    for (const auto& [id, lab] : labels) binary.push_back({id, lab});
    CHECK(binarize(binary) == labels);

    auto dup = write_temp("bp_labels_dup.csv", "doc_id,bug_count\na,0\na,1\n");
    CHECK_THROWS(load_labels(dup.string()));
    auto neg = write_temp("bp_labels_neg.csv", "doc_id,bug_count\na,-1\n");
    CHECK_THROWS(load_labels(neg.string()));
    fs::remove(p);
    fs::remove(dup);
    fs::remove(neg);
}

TEST_CASE("metrics load preserves header order and rejects bad cells") {
    auto p = write_temp("bp_metrics.csv", "doc_id,LOC,CBO,WMC\na,10,2,5\nb,20,0,7\n");
    MetricsData d = load_metrics(p.string());
    CHECK(d.metric_names == std::vector<std::string>{"LOC", "CBO", "WMC"});
    REQUIRE(d.records.size() == 2);
    CHECK(d.records[0].values == std::vector<double>{10, 2, 5});

    auto empty = write_temp("bp_metrics_empty.csv", "doc_id,LOC,CBO\n");
    MetricsData e = load_metrics(empty.string());
    CHECK(e.records.empty());
    CHECK(e.metric_names.size() == 2);

    auto bad = write_temp("bp_metrics_bad.csv", "doc_id,LOC\na,xyz\n");
    CHECK_THROWS_WITH(load_metrics(bad.string()), doctest::Contains("row 2"));
    auto missing = write_temp("bp_metrics_missing.csv", "doc_id,LOC,CBO\na,1\n");
    CHECK_THROWS(load_metrics(missing.string()));  // short row is a hard error
    fs::remove(p);
    fs::remove(empty);
    fs::remove(bad);
    fs::remove(missing);
}

TEST_CASE("standardizer uses population sigma and flags constant columns") {
    Matrix x(3, 2);
    x(0, 0) = 1;
    x(1, 0) = 2;
    x(2, 0) = 3;
    x(0, 1) = 5;
    x(1, 1) = 5;
    x(2, 1) = 5;
    Standardizer s = fit_standardizer(x);
    CHECK(s.mean[0] == doctest::Approx(2.0));
    CHECK(s.stddev[0] == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
    CHECK(s.zero_variance[1]);

    Matrix out = apply_standardizer(s, x);
    CHECK(out(0, 0) == doctest::Approx(-1.224744871391589).epsilon(1e-12));
    CHECK(out(1, 0) == doctest::Approx(0.0));
    CHECK(out(2, 0) == doctest::Approx(1.224744871391589).epsilon(1e-12));
    CHECK(out(0, 1) == 0.0);
    CHECK(out(2, 1) == 0.0);

    // applying a fitted standardizer to its own data re-centers to 0
    double col_mean = (out(0, 0) + out(1, 0) + out(2, 0)) / 3.0;
    CHECK(std::abs(col_mean) < 1e-9);
}

TEST_CASE("upsample reaches round(ratio * majority) exactly") {
    FeatureTable t;
    t.mode = FeatureMode::kMetrics;
    std::size_t neg = 900, pos = 100;
    t.features = Matrix(neg + pos, 1);
    for (std::size_t i = 0; i < neg + pos; ++i) {
        t.doc_ids.push_back("r" + std::to_string(i));
        t.labels.push_back(i < pos ? 1 : 0);
        t.features(i, 0) = static_cast<double>(i);
    }
    FeatureTable up = upsample(t, 0.5, 13);
    std::size_t pos_after = std::count(up.labels.begin(), up.labels.end(), 1);
    std::size_t neg_after = std::count(up.labels.begin(), up.labels.end(), 0);
    CHECK(pos_after == 450);
    CHECK(neg_after == 900);
    CHECK(up.size() == 1350);

    // originals retained in place
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(up.doc_ids[i] == t.doc_ids[i]);
        CHECK(up.features(i, 0) == t.features(i, 0));
    }
    // duplicates are copies of minority rows
    for (std::size_t i = t.size(); i < up.size(); ++i) CHECK(up.labels[i] == 1);

    // determinism
    FeatureTable up2 = upsample(t, 0.5, 13);
    CHECK(up2.features.data == up.features.data);
    CHECK(up2.doc_ids == up.doc_ids);

    // no-op when the minority already meets the target
    FeatureTable small;
    small.mode = FeatureMode::kMetrics;
    small.features = Matrix(160, 1);
    for (std::size_t i = 0; i < 160; ++i) {
        small.doc_ids.push_back("r" + std::to_string(i));
        small.labels.push_back(i < 60 ? 1 : 0);
    }
    FeatureTable same = upsample(small, 0.5, 13);
    CHECK(same.size() == 160);

    // single-class input is an error
    FeatureTable one;
    one.features = Matrix(4, 1);
    one.doc_ids = {"a", "b", "c", "d"};
    one.labels = {1, 1, 1, 1};
    CHECK_THROWS(upsample(one, 0.5, 13));
    CHECK_THROWS(upsample(small, 0.0, 13));
    CHECK_THROWS(upsample(small, 1.5, 13));
}

TEST_CASE("upsample target fuzz") {
    Rng rng(555);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t majority = 10 + rng.next_below(500);
        std::size_t minority = 1 + rng.next_below(majority);
        std::vector<int> labels;
        for (std::size_t i = 0; i < minority; ++i) labels.push_back(1);
        for (std::size_t i = 0; i < majority; ++i) labels.push_back(0);
        auto draws = upsample_draws(labels, 0.5, rng.next_u64());
        auto target = static_cast<std::size_t>(std::llround(0.5 * static_cast<double>(majority)));
        if (minority >= target) {
            CHECK(draws.empty());
        } else {
            CHECK(minority + draws.size() == target);
            for (std::size_t d : draws) CHECK(labels[d] == 1);
        }
    }
}

TEST_CASE("assemble inner-joins sorted by doc_id") {
    VectorData vectors;
    vectors.doc_ids = {"c", "a", "b", "zz"};
    vectors.vectors = Matrix(4, 2);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 2; ++c) vectors.vectors(r, c) = 10.0 * r + c;

    MetricsData metrics;
    metrics.metric_names = {"LOC", "WMC"};
    metrics.records = {{"b", {1, 2}}, {"a", {3, 4}}, {"c", {5, 6}}, {"only", {9, 9}}};

    std::map<std::string, int> labels{{"a", 1}, {"b", 0}, {"c", 1}, {"ghost", 1}};

    JoinReport rep;
    FeatureTable combined = assemble(FeatureMode::kCombined, &vectors, &metrics, labels, &rep);
    CHECK(combined.doc_ids == std::vector<std::string>{"a", "b", "c"});
    CHECK(combined.features.cols == 4);  // 2 embedding + 2 metric columns
    CHECK(combined.feature_names == std::vector<std::string>{"v0", "v1", "LOC", "WMC"});
    CHECK(combined.features(0, 0) == 10.0);  // vectors row for "a"
    CHECK(combined.features(0, 2) == 3.0);   // metrics row for "a"
    CHECK(combined.labels == std::vector<int>{1, 0, 1});
    CHECK(rep.joined == 3);
    CHECK(rep.dropped_vectors == 1);
    CHECK(rep.dropped_metrics == 1);
    CHECK(rep.dropped_labels == 1);

    FeatureTable embedding = assemble(FeatureMode::kEmbedding, &vectors, nullptr, labels);
    CHECK(embedding.features.cols == 2);
    FeatureTable metrics_only = assemble(FeatureMode::kMetrics, nullptr, &metrics, labels);
    CHECK(metrics_only.features.cols == 2);

    // order-insensitivity: shuffling input rows yields the identical table
    VectorData shuffled_vectors;
    shuffled_vectors.doc_ids = {"zz", "b", "c", "a"};
    shuffled_vectors.vectors = Matrix(4, 2);
    auto src_row = [&](const std::string& id) {
        for (std::size_t r = 0; r < vectors.doc_ids.size(); ++r)
            if (vectors.doc_ids[r] == id) return r;
        FAIL("missing id");
        return std::size_t{0};
    };
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 2; ++c)
            shuffled_vectors.vectors(r, c) = vectors.vectors(src_row(shuffled_vectors.doc_ids[r]), c);
    MetricsData shuffled_metrics;
    shuffled_metrics.metric_names = metrics.metric_names;
    shuffled_metrics.records = {metrics.records[3], metrics.records[2], metrics.records[0],
                                metrics.records[1]};
    FeatureTable combined2 =
        assemble(FeatureMode::kCombined, &shuffled_vectors, &shuffled_metrics, labels);
    CHECK(combined2.doc_ids == combined.doc_ids);
    CHECK(combined2.features.data == combined.features.data);
    CHECK(combined2.labels == combined.labels);

    // empty join errors with counts
    std::map<std::string, int> disjoint{{"p", 1}, {"q", 0}};
    CHECK_THROWS_WITH(assemble(FeatureMode::kEmbedding, &vectors, nullptr, disjoint),
                      doctest::Contains("join"));
}

TEST_CASE("the full 60-metric header and a dim-25 embedding combine to 85 features") {
    const std::vector<std::string> abbreviations = {
        "AD",   "CBO",  "CBOI", "CC",    "CCL",   "CCO",   "CD",    "CI",    "CLC",  "CLLC",
        "CLOC", "DIT",  "DLOC", "LCOM5", "LDC",   "LLDC",  "LLOC",  "LOC",   "NA",   "NG",
        "NII",  "NL",   "NLA",  "NLE",   "NLG",   "NLM",   "NLPA",  "NLPM",  "NLS",  "NM",
        "NOA",  "NOC",  "NOD",  "NOI",   "NOP",   "NOS",   "NPA",   "NPM",   "NS",   "PDA",
        "PUA",  "RFC",  "TCD",  "TCLOC", "TLLOC", "TLOC",  "TNA",   "TNG",   "TNLA", "TNLG",
        "TNLM", "TNLPA", "TNLPM", "TNLS", "TNM",  "TNOS",  "TNPA",  "TNPM",  "TNS",  "WMC"};
    REQUIRE(abbreviations.size() == 60);

    std::string csv = "doc_id";
    for (const std::string& a : abbreviations) csv += "," + a;
    csv += "\n";
    for (int r = 0; r < 3; ++r) {
        csv += "class" + std::to_string(r);
        for (std::size_t c = 0; c < abbreviations.size(); ++c)
            csv += "," + std::to_string(r * 100 + static_cast<int>(c));
        csv += "\n";
    }
    auto p = write_temp("bp_metrics_full.csv", csv);
    MetricsData metrics = load_metrics(p.string());
    CHECK(metrics.metric_names.size() == 60);
    CHECK(metrics.records[0].values.size() == 60);
    fs::remove(p);

    VectorData vectors;
    vectors.vectors = Matrix(3, 25);
    std::map<std::string, int> labels;
    for (int r = 0; r < 3; ++r) {
        vectors.doc_ids.push_back("class" + std::to_string(r));
        labels["class" + std::to_string(r)] = r % 2;
    }
    FeatureTable combined = assemble(FeatureMode::kCombined, &vectors, &metrics, labels);
    CHECK(combined.features.cols == 85);
    FeatureTable embedding = assemble(FeatureMode::kEmbedding, &vectors, nullptr, labels);
    CHECK(embedding.features.cols == 25);
}

TEST_CASE("vectors file round trip") {
    auto p = write_temp("bp_vectors.csv",
                        "doc_id,v0,v1\nalpha,0.25,-1.5\nbeta,3.25,0.125\n");
    VectorData v = load_vectors(p.string());
    CHECK(v.doc_ids == std::vector<std::string>{"alpha", "beta"});
    CHECK(v.vectors(1, 0) == 3.25);
    fs::remove(p);
}
