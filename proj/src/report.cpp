#include "bugpred/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace bugpred {

namespace {

using nlohmann::json;

json descriptor_to_json(const ExperimentDescriptor& d) {
    json j;
    j["mode"] = mode_name(d.mode);
    j["classifier"] = d.classifier;
    j["k_folds"] = d.k_folds;
    j["upsample_ratio"] = d.upsample_ratio;
    j["seed"] = d.seed;
    if (d.permutation) j["permutation"] = *d.permutation;
    if (d.embedding) {
        json e;
        e["method"] = method_name(d.embedding->method);
        e["dim"] = d.embedding->dim;
        e["window"] = d.embedding->window;
        e["epochs"] = d.embedding->epochs;
        e["negatives"] = d.embedding->negatives;
        e["alpha_start"] = d.embedding->alpha_start;
        e["alpha_end"] = d.embedding->alpha_end;
        e["seed"] = d.embedding->seed;
        j["embedding"] = e;
    }
    return j;
}

ExperimentDescriptor descriptor_from_json(const json& j) {
    ExperimentDescriptor d;
    auto mode = mode_from_name(j.at("mode").get<std::string>());
    if (!mode) throw std::runtime_error("unknown feature mode in report");
    d.mode = *mode;
    d.classifier = j.at("classifier").get<std::string>();
    d.k_folds = j.at("k_folds").get<int>();
    d.upsample_ratio = j.at("upsample_ratio").get<double>();
    d.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("permutation")) d.permutation = j.at("permutation").get<int>();
    if (j.contains("embedding")) {
        const json& e = j.at("embedding");
        Doc2VecHyper h;
        auto method = method_from_name(e.at("method").get<std::string>());
        if (!method) throw std::runtime_error("unknown embedding method in report");
        h.method = *method;
        h.dim = e.at("dim").get<int>();
        h.window = e.at("window").get<int>();
        h.epochs = e.at("epochs").get<int>();
        h.negatives = e.at("negatives").get<int>();
        h.alpha_start = e.at("alpha_start").get<double>();
        h.alpha_end = e.at("alpha_end").get<double>();
        h.seed = e.at("seed").get<std::uint64_t>();
        d.embedding = h;
    }
    return d;
}

std::string embedding_note(const ExperimentDescriptor& d) {
    if (!d.embedding) return "-";
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%d, %d, %d epochs, %s", d.embedding->dim,
                  d.embedding->window, d.embedding->epochs, method_name(d.embedding->method));
    return buf;
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
    json j;
    j["descriptor"] = descriptor_to_json(report.descriptor);
    j["key"] = report.descriptor.key();
    json folds = json::array();
    for (const FoldMetrics& m : report.folds) {
        json f;
        f["tp"] = m.tp;
        f["fp"] = m.fp;
        f["fn"] = m.fn;
        f["precision"] = m.precision;
        f["recall"] = m.recall;
        f["f_score"] = m.f;
        folds.push_back(f);
    }
    j["folds"] = folds;
    j["aggregate"] = {{"precision", report.mean_precision},
                      {"recall", report.mean_recall},
                      {"f_score", report.mean_f}};
    return j.dump(2) + "\n";
}

EvalReport report_from_json(const std::string& text) {
    json j = json::parse(text);
    EvalReport report;
    report.descriptor = descriptor_from_json(j.at("descriptor"));
    for (const json& f : j.at("folds")) {
        FoldMetrics m;
        m.tp = f.at("tp").get<long>();
        m.fp = f.at("fp").get<long>();
        m.fn = f.at("fn").get<long>();
        m.precision = f.at("precision").get<double>();
        m.recall = f.at("recall").get<double>();
        m.f = f.at("f_score").get<double>();
        report.folds.push_back(m);
    }
    report.mean_precision = j.at("aggregate").at("precision").get<double>();
    report.mean_recall = j.at("aggregate").at("recall").get<double>();
    report.mean_f = j.at("aggregate").at("f_score").get<double>();
    return report;
}

void write_report_file(const EvalReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open report file for writing: " + path);
    out << report_to_json(report);
    if (!out) throw std::runtime_error("write failed: " + path);
}

EvalReport read_report_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open report file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return report_from_json(buf.str());
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

std::string comparison_table(std::span<const EvalReport> reports) {
    // (classifier, mode) -> best report, ties to the smaller key.
    std::map<std::string, std::map<std::string, const EvalReport*>> best;
    std::set<std::string> modes_present;
    for (const EvalReport& r : reports) {
        if (r.descriptor.permutation) continue;  // permutation runs are summarized separately
        const std::string mode = mode_name(r.descriptor.mode);
        modes_present.insert(mode);
        const EvalReport*& slot = best[r.descriptor.classifier][mode];
        if (slot == nullptr || r.mean_f > slot->mean_f ||
            (r.mean_f == slot->mean_f && r.descriptor.key() < slot->descriptor.key()))
            slot = &r;
    }

    std::vector<std::string> modes;
    for (const char* m : {"embedding", "metrics", "combined"})
        if (modes_present.count(m)) modes.push_back(m);

    std::ostringstream os;
    char buf[64];
    os << "classifier";
    for (const std::string& m : modes) os << '\t' << m;
    os << "\tbest_embedding (dim, window, epochs, method)\n";
    for (const auto& [clf, row] : best) {
        os << clf;
        const EvalReport* annotated = nullptr;
        for (const std::string& m : modes) {
            auto it = row.find(m);
            if (it == row.end()) {
                os << "\t-";
            } else {
                std::snprintf(buf, sizeof(buf), "\t%.4f", it->second->mean_f);
                os << buf;
                if (it->second->descriptor.embedding &&
                    (annotated == nullptr || it->second->mean_f > annotated->mean_f))
                    annotated = it->second;
            }
        }
        os << '\t' << (annotated ? embedding_note(annotated->descriptor) : "-") << '\n';
    }
    return os.str();
}

FiveNumber five_number(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("five_number: empty input");
    std::sort(values.begin(), values.end());
    auto quantile = [&](double q) {
        double pos = q * static_cast<double>(values.size() - 1);
        std::size_t lo = static_cast<std::size_t>(pos);
        std::size_t hi = std::min(lo + 1, values.size() - 1);
        double frac = pos - static_cast<double>(lo);
        return values[lo] + (values[hi] - values[lo]) * frac;
    };
    return {values.front(), quantile(0.25), quantile(0.5), quantile(0.75), values.back()};
}

std::string five_number_summary(std::span<const EvalReport> reports) {
    // Real and permuted-label runs are distinct populations; each gets its
    // own block. Within a block, a classifier's row spans all of its
    // experiments (every grid cell and mode).
    std::map<std::string, std::vector<double>> real_runs, permuted_runs;
    for (const EvalReport& r : reports)
        (r.descriptor.permutation ? permuted_runs : real_runs)[r.descriptor.classifier].push_back(
            r.mean_f);

    std::ostringstream os;
    char buf[128];
    auto emit = [&](const char* heading, std::map<std::string, std::vector<double>>& groups) {
        if (groups.empty()) return;
        os << heading << "\tmin\tq1\tmedian\tq3\tmax\truns\n";
        for (auto& [clf, values] : groups) {
            std::size_t n = values.size();
            FiveNumber fn = five_number(std::move(values));
            std::snprintf(buf, sizeof(buf), "%s\t%.5f\t%.5f\t%.5f\t%.5f\t%.5f\t%zu\n",
                          clf.c_str(), fn.min, fn.q1, fn.median, fn.q3, fn.max, n);
            os << buf;
        }
    };
    emit("classifier", real_runs);
    emit("classifier (permuted labels)", permuted_runs);
    return os.str();
}

}  // namespace bugpred
