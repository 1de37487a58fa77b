#include "bugpred/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "bugpred/rng.hpp"

namespace bugpred {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    if (!cells.empty() && !cells.back().empty() && cells.back().back() == '\r')
        cells.back().pop_back();
    return cells;
}

double parse_double_cell(const std::string& cell, std::size_t row, std::size_t col,
                         const std::string& what) {
    // std::from_chars for doubles is incomplete on some toolchains; strtod
    // with a full-consumption check covers the same contract.
    if (cell.empty())
        throw std::runtime_error(what + ": missing value at row " + std::to_string(row) +
                                 ", column " + std::to_string(col));
    const char* begin = cell.c_str();
    char* end = nullptr;
    double value = std::strtod(begin, &end);
    if (end != begin + cell.size() || !std::isfinite(value))
        throw std::runtime_error(what + ": non-numeric cell '" + cell + "' at row " +
                                 std::to_string(row) + ", column " + std::to_string(col));
    return value;
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return in;
}

}  // namespace

std::vector<LabelRecord> load_labels(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty labels file");
    auto header = split_csv_line(line);
    if (header.size() != 2 || header[0] != "doc_id" || header[1] != "bug_count")
        throw std::runtime_error(path + ": expected header doc_id,bug_count");

    std::vector<LabelRecord> records;
    std::unordered_set<std::string> seen;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto cells = split_csv_line(line);
        if (cells.size() != 2)
            throw std::runtime_error(path + ": row " + std::to_string(row) +
                                     " has " + std::to_string(cells.size()) + " cells, expected 2");
        LabelRecord rec;
        rec.doc_id = cells[0];
        long count = 0;
        auto [next, ec] = std::from_chars(cells[1].data(), cells[1].data() + cells[1].size(), count);
        if (ec != std::errc() || next != cells[1].data() + cells[1].size())
            throw std::runtime_error(path + ": row " + std::to_string(row) +
                                     ": malformed bug_count '" + cells[1] + "'");
        if (count < 0)
            throw std::runtime_error(path + ": row " + std::to_string(row) +
                                     ": negative bug_count for " + rec.doc_id);
        if (!seen.insert(rec.doc_id).second)
            throw std::runtime_error(path + ": duplicate doc_id " + rec.doc_id);
        rec.bug_count = count;
        records.push_back(std::move(rec));
    }
    return records;
}

std::map<std::string, int> binarize(std::span<const LabelRecord> records) {
    std::map<std::string, int> out;
    for (const LabelRecord& r : records) out[r.doc_id] = r.bug_count > 0 ? 1 : 0;
    return out;
}

MetricsData load_metrics(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty metrics file");
    auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "doc_id")
        throw std::runtime_error(path + ": expected header doc_id,<metric names...>");

    MetricsData data;
    data.metric_names.assign(header.begin() + 1, header.end());
    std::unordered_set<std::string> seen;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error(path + ": row " + std::to_string(row) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(header.size()));
        MetricsRecord rec;
        rec.doc_id = cells[0];
        if (rec.doc_id.empty())
            throw std::runtime_error(path + ": row " + std::to_string(row) + ": missing doc_id");
        if (!seen.insert(rec.doc_id).second)
            throw std::runtime_error(path + ": duplicate doc_id " + rec.doc_id);
        rec.values.reserve(cells.size() - 1);
        for (std::size_t c = 1; c < cells.size(); ++c)
            rec.values.push_back(parse_double_cell(cells[c], row, c + 1, path));
        data.records.push_back(std::move(rec));
    }
    return data;
}

VectorData load_vectors(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty vectors file");
    auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "doc_id")
        throw std::runtime_error(path + ": expected header doc_id,v0,...");

    const std::size_t dim = header.size() - 1;
    VectorData data;
    std::vector<double> values;
    std::unordered_set<std::string> seen;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error(path + ": row " + std::to_string(row) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(header.size()));
        if (!seen.insert(cells[0]).second)
            throw std::runtime_error(path + ": duplicate doc_id " + cells[0]);
        data.doc_ids.push_back(cells[0]);
        for (std::size_t c = 1; c < cells.size(); ++c)
            values.push_back(parse_double_cell(cells[c], row, c + 1, path));
    }
    data.vectors = Matrix(data.doc_ids.size(), dim);
    data.vectors.data = std::move(values);
    return data;
}

const char* mode_name(FeatureMode m) {
    switch (m) {
        case FeatureMode::kEmbedding: return "embedding";
        case FeatureMode::kMetrics: return "metrics";
        case FeatureMode::kCombined: return "combined";
    }
    return "?";
}

std::optional<FeatureMode> mode_from_name(std::string_view name) {
    if (name == "embedding") return FeatureMode::kEmbedding;
    if (name == "metrics") return FeatureMode::kMetrics;
    if (name == "combined") return FeatureMode::kCombined;
    return std::nullopt;
}

Standardizer fit_standardizer(const Matrix& features) {
    Standardizer s;
    s.mean.assign(features.cols, 0.0);
    s.stddev.assign(features.cols, 0.0);
    s.zero_variance.assign(features.cols, false);
    if (features.rows == 0) return s;

    for (std::size_t r = 0; r < features.rows; ++r)
        for (std::size_t c = 0; c < features.cols; ++c) s.mean[c] += features(r, c);
    for (double& m : s.mean) m /= static_cast<double>(features.rows);

    for (std::size_t r = 0; r < features.rows; ++r)
        for (std::size_t c = 0; c < features.cols; ++c) {
            double d = features(r, c) - s.mean[c];
            s.stddev[c] += d * d;
        }
    for (std::size_t c = 0; c < features.cols; ++c) {
        s.stddev[c] = std::sqrt(s.stddev[c] / static_cast<double>(features.rows));
        s.zero_variance[c] = s.stddev[c] == 0.0;
    }
    return s;
}

Matrix apply_standardizer(const Standardizer& s, const Matrix& features) {
    if (features.cols != s.mean.size())
        throw std::invalid_argument("standardizer width mismatch");
    Matrix out(features.rows, features.cols);
    for (std::size_t r = 0; r < features.rows; ++r)
        for (std::size_t c = 0; c < features.cols; ++c)
            out(r, c) = s.zero_variance[c] ? 0.0 : (features(r, c) - s.mean[c]) / s.stddev[c];
    return out;
}

std::vector<std::size_t> upsample_draws(std::span<const int> labels, double ratio,
                                        std::uint64_t seed) {
    if (!(ratio > 0.0) || ratio > 1.0) throw std::invalid_argument("ratio must be in (0, 1]");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty()) throw std::runtime_error("upsample needs both classes");

    const std::vector<std::size_t>& minority = pos.size() <= neg.size() ? pos : neg;
    const std::vector<std::size_t>& majority = pos.size() <= neg.size() ? neg : pos;
    auto target = static_cast<std::size_t>(
        std::llround(ratio * static_cast<double>(majority.size())));
    if (minority.size() >= target) return {};

    std::vector<std::size_t> draws;
    draws.reserve(target - minority.size());
    Rng rng(seed);
    while (minority.size() + draws.size() < target)
        draws.push_back(minority[rng.next_below(minority.size())]);
    return draws;
}

FeatureTable upsample(const FeatureTable& table, double ratio, std::uint64_t seed) {
    std::vector<std::size_t> draws = upsample_draws(table.labels, ratio, seed);
    if (draws.empty()) return table;

    FeatureTable out = table;
    out.features = Matrix(table.size() + draws.size(), table.features.cols);
    std::copy(table.features.data.begin(), table.features.data.end(), out.features.data.begin());
    for (std::size_t i = 0; i < draws.size(); ++i) {
        std::size_t src = draws[i];
        std::size_t dst = table.size() + i;
        std::copy_n(table.features.row(src).data(), table.features.cols,
                    out.features.row(dst).data());
        out.labels.push_back(table.labels[src]);
        out.doc_ids.push_back(table.doc_ids[src]);
    }
    return out;
}

std::string JoinReport::to_string() const {
    std::ostringstream os;
    os << "join: " << joined << " rows";
    os << " (vectors " << vectors_in << ", dropped " << dropped_vectors;
    os << "; metrics " << metrics_in << ", dropped " << dropped_metrics;
    os << "; labels " << labels_in << ", dropped " << dropped_labels << ")";
    return os.str();
}

FeatureTable assemble(FeatureMode mode, const VectorData* vectors, const MetricsData* metrics,
                      const std::map<std::string, int>& labels, JoinReport* report) {
    const bool need_vectors = mode != FeatureMode::kMetrics;
    const bool need_metrics = mode != FeatureMode::kEmbedding;
    if (need_vectors && (vectors == nullptr || vectors->doc_ids.empty()))
        throw std::runtime_error("mode requires embedding vectors but none were given");
    if (need_metrics && (metrics == nullptr || metrics->records.empty()))
        throw std::runtime_error("mode requires code metrics but none were given");

    std::map<std::string, std::size_t> vec_index;
    if (need_vectors)
        for (std::size_t i = 0; i < vectors->doc_ids.size(); ++i)
            vec_index.emplace(vectors->doc_ids[i], i);
    std::map<std::string, std::size_t> met_index;
    if (need_metrics)
        for (std::size_t i = 0; i < metrics->records.size(); ++i)
            met_index.emplace(metrics->records[i].doc_id, i);

    // Intersect sorted id sets; std::map iteration gives the sorted order.
    std::vector<std::string> ids;
    for (const auto& [id, label] : labels) {
        (void)label;
        if (need_vectors && !vec_index.count(id)) continue;
        if (need_metrics && !met_index.count(id)) continue;
        ids.push_back(id);
    }

    JoinReport rep;
    rep.vectors_in = need_vectors ? vectors->doc_ids.size() : 0;
    rep.metrics_in = need_metrics ? metrics->records.size() : 0;
    rep.labels_in = labels.size();
    rep.joined = ids.size();
    if (need_vectors) rep.dropped_vectors = rep.vectors_in - ids.size();
    if (need_metrics) rep.dropped_metrics = rep.metrics_in - ids.size();
    rep.dropped_labels = rep.labels_in - ids.size();
    if (report) *report = rep;

    if (ids.empty())
        throw std::runtime_error("empty join across inputs (" + rep.to_string() + ")");

    const std::size_t dim = need_vectors ? vectors->vectors.cols : 0;
    const std::size_t metric_count = need_metrics ? metrics->metric_names.size() : 0;

    FeatureTable table;
    table.mode = mode;
    table.doc_ids = ids;
    table.features = Matrix(ids.size(), dim + metric_count);
    table.labels.reserve(ids.size());
    if (need_vectors)
        for (std::size_t i = 0; i < dim; ++i) table.feature_names.push_back("v" + std::to_string(i));
    if (need_metrics)
        for (const std::string& n : metrics->metric_names) table.feature_names.push_back(n);

    for (std::size_t r = 0; r < ids.size(); ++r) {
        const std::string& id = ids[r];
        std::size_t c = 0;
        if (need_vectors) {
            std::span<const double> v = vectors->vectors.row(vec_index.at(id));
            for (double x : v) table.features(r, c++) = x;
        }
        if (need_metrics) {
            const MetricsRecord& m = metrics->records[met_index.at(id)];
            if (m.values.size() != metric_count)
                throw std::runtime_error("metrics width mismatch for " + id);
            for (double x : m.values) table.features(r, c++) = x;
        }
        table.labels.push_back(labels.at(id));
    }
    return table;
}

void write_feature_table(const FeatureTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << "doc_id";
    for (const std::string& n : table.feature_names) out << ',' << n;
    out << ",label\n";
    char buf[40];
    for (std::size_t r = 0; r < table.size(); ++r) {
        out << table.doc_ids[r];
        for (double x : table.features.row(r)) {
            std::snprintf(buf, sizeof(buf), "%.17g", x);
            out << ',' << buf;
        }
        out << ',' << table.labels[r] << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace bugpred
