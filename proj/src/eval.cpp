#include "bugpred/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "bugpred/parallel.hpp"
#include "bugpred/rng.hpp"

namespace bugpred {

Scores f_score(long tp, long fp, long fn) {
    if (tp < 0 || fp < 0 || fn < 0) throw std::invalid_argument("negative confusion count");
    Scores s;
    s.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    s.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    s.f = s.precision + s.recall == 0.0
              ? 0.0
              : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

FoldPlan stratified_folds(std::span<const int> labels, int k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("k must be >= 2");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
    if (pos.size() < static_cast<std::size_t>(k) || neg.size() < static_cast<std::size_t>(k))
        throw std::runtime_error("each class needs at least k members (have " +
                                 std::to_string(pos.size()) + " positive, " +
                                 std::to_string(neg.size()) + " negative, k=" +
                                 std::to_string(k) + ")");

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.fold_of_row.assign(labels.size(), -1);
    Rng pos_rng(derive_seed(seed, 1));
    Rng neg_rng(derive_seed(seed, 2));
    shuffle(pos, pos_rng);
    shuffle(neg, neg_rng);
    for (std::size_t i = 0; i < pos.size(); ++i) plan.fold_of_row[pos[i]] = static_cast<int>(i % k);
    for (std::size_t i = 0; i < neg.size(); ++i) plan.fold_of_row[neg[i]] = static_cast<int>(i % k);
    return plan;
}

std::string ExperimentDescriptor::key() const {
    char buf[256];
    std::string s = "mode=";
    s += mode_name(mode);
    if (embedding) {
        std::snprintf(buf, sizeof(buf), "|method=%s|dim=%03d|window=%02d|epochs=%03d|negatives=%d",
                      method_name(embedding->method), embedding->dim, embedding->window,
                      embedding->epochs, embedding->negatives);
        s += buf;
    }
    std::snprintf(buf, sizeof(buf), "|clf=%s|k=%d|ratio=%g", classifier.c_str(), k_folds,
                  upsample_ratio);
    s += buf;
    if (permutation) {
        std::snprintf(buf, sizeof(buf), "|perm=%03d", *permutation);
        s += buf;
    }
    return s;
}

EvalReport cross_validate(const FeatureTable& table, const ClassifierSpec& spec, int k,
                          std::uint64_t seed, double upsample_ratio,
                          CrossValObserver* observer) {
    FoldPlan plan = stratified_folds(table.labels, k, derive_seed(seed, 0x666f6c64));

    EvalReport report;
    report.descriptor.mode = table.mode;
    report.descriptor.classifier = spec.name();
    report.descriptor.k_folds = k;
    report.descriptor.upsample_ratio = upsample_ratio;
    report.descriptor.seed = seed;

    const std::size_t n = table.size();
    const std::size_t width = table.features.cols;

    for (int fold = 0; fold < k; ++fold) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < n; ++i)
            (plan.fold_of_row[i] == fold ? test_rows : train_rows).push_back(i);

        Matrix train_x(train_rows.size(), width);
        std::vector<int> train_y(train_rows.size());
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
            std::copy_n(table.features.row(train_rows[i]).data(), width, train_x.row(i).data());
            train_y[i] = table.labels[train_rows[i]];
        }
        Matrix test_x(test_rows.size(), width);
        std::vector<int> test_y(test_rows.size());
        for (std::size_t i = 0; i < test_rows.size(); ++i) {
            std::copy_n(table.features.row(test_rows[i]).data(), width, test_x.row(i).data());
            test_y[i] = table.labels[test_rows[i]];
        }

        Standardizer standardizer = fit_standardizer(train_x);
        train_x = apply_standardizer(standardizer, train_x);
        test_x = apply_standardizer(standardizer, test_x);

        std::uint64_t fold_seed = derive_seed(seed, static_cast<std::uint64_t>(fold));
        std::vector<std::size_t> draws =
            upsample_draws(train_y, upsample_ratio, derive_seed(fold_seed, 1));
        if (observer) {
            // Sources as row ids of the original table.
            std::vector<std::size_t> sources;
            sources.reserve(draws.size());
            for (std::size_t d : draws) sources.push_back(train_rows[d]);
            observer->on_fold(fold, train_rows, test_rows, standardizer, sources);
        }
        if (!draws.empty()) {
            Matrix grown(train_x.rows + draws.size(), width);
            std::copy(train_x.data.begin(), train_x.data.end(), grown.data.begin());
            for (std::size_t i = 0; i < draws.size(); ++i) {
                std::copy_n(train_x.row(draws[i]).data(), width,
                            grown.row(train_x.rows + i).data());
                train_y.push_back(train_y[draws[i]]);
            }
            train_x = std::move(grown);
        }

        std::vector<int> pred;
        try {
            TrainedModel model = fit(spec, train_x, train_y, derive_seed(fold_seed, 2));
            pred = model.predict(test_x);
        } catch (const std::exception& e) {
            throw std::runtime_error("fold " + std::to_string(fold) + ": " + e.what());
        }

        FoldMetrics m;
        for (std::size_t i = 0; i < test_rows.size(); ++i) {
            if (pred[i] == 1 && test_y[i] == 1) ++m.tp;
            if (pred[i] == 1 && test_y[i] == 0) ++m.fp;
            if (pred[i] == 0 && test_y[i] == 1) ++m.fn;
        }
        Scores s = f_score(m.tp, m.fp, m.fn);
        m.precision = s.precision;
        m.recall = s.recall;
        m.f = s.f;
        report.folds.push_back(m);
    }

    for (const FoldMetrics& m : report.folds) {
        report.mean_precision += m.precision;
        report.mean_recall += m.recall;
        report.mean_f += m.f;
    }
    report.mean_precision /= static_cast<double>(k);
    report.mean_recall /= static_cast<double>(k);
    report.mean_f /= static_cast<double>(k);
    return report;
}

FeatureTable apply_label_permutation(const FeatureTable& table,
                                     std::span<const std::size_t> perm) {
    if (perm.size() != table.size()) throw std::invalid_argument("permutation size mismatch");
    FeatureTable out = table;
    for (std::size_t i = 0; i < perm.size(); ++i) out.labels[i] = table.labels[perm[i]];
    return out;
}

std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    Rng rng(seed);
    shuffle(perm, rng);
    return perm;
}

std::vector<EvalReport> permutation_test(const FeatureTable& table, const ClassifierSpec& spec,
                                         int n_permutations, std::uint64_t seed, int k,
                                         double upsample_ratio, int workers) {
    if (n_permutations < 1) throw std::invalid_argument("n_permutations must be >= 1");
    std::vector<EvalReport> reports(static_cast<std::size_t>(n_permutations));
    std::vector<std::string> errors(reports.size());
    parallel_tasks(reports.size(), workers, [&](std::size_t i) {
        // Exceptions must not escape the worker loop; the first one is
        // rethrown after the join.
        try {
            std::uint64_t perm_seed = derive_seed(seed, i + 1);
            FeatureTable permuted =
                apply_label_permutation(table, random_permutation(table.size(), perm_seed));
            reports[i] = cross_validate(permuted, spec, k, derive_seed(perm_seed, 0x7065726d),
                                        upsample_ratio);
            reports[i].descriptor.permutation = static_cast<int>(i + 1);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty())
            throw std::runtime_error("permutation " + std::to_string(i + 1) + ": " + errors[i]);
    return reports;
}

GridSpec GridSpec::defaults() {
    GridSpec g;
    g.methods = {Doc2VecMethod::kPvDm, Doc2VecMethod::kPvDbow};
    g.dims = {25, 50, 75, 150};
    g.windows = {4, 8, 12};
    g.epochs = {6, 10, 20, 40, 60, 80, 100};
    g.classifiers = ClassifierSpec::full_roster();
    g.modes = {FeatureMode::kEmbedding};
    return g;
}

namespace {

VectorData vectors_of_model(const Doc2VecModel& model) {
    VectorData v;
    v.doc_ids = model.doc_ids;
    v.vectors = model.doc_vecs;
    return v;
}

}  // namespace

std::vector<GridCellResult> grid_run(std::span<const TokenSequence> corpus, const GridSpec& grid,
                                     const std::map<std::string, int>& labels,
                                     const MetricsData* metrics, std::uint64_t master_seed,
                                     int workers) {
    struct EmbedTask {
        Doc2VecHyper hyper;
    };
    std::vector<EmbedTask> tasks;
    for (Doc2VecMethod method : grid.methods)
        for (int dim : grid.dims)
            for (int window : grid.windows)
                for (int epochs : grid.epochs) {
                    Doc2VecHyper h;
                    h.method = method;
                    h.dim = dim;
                    h.window = window;
                    h.epochs = epochs;
                    h.negatives = grid.negatives;
                    h.alpha_start = grid.alpha_start;
                    h.alpha_end = grid.alpha_end;
                    tasks.push_back({h});
                }

    std::vector<FeatureMode> embed_modes;
    bool metrics_only = false;
    for (FeatureMode m : grid.modes) {
        if (m == FeatureMode::kMetrics)
            metrics_only = true;
        else
            embed_modes.push_back(m);
    }

    auto descriptor_for = [&](const std::optional<Doc2VecHyper>& hyper, FeatureMode mode,
                              const ClassifierSpec& clf) {
        ExperimentDescriptor d;
        d.mode = mode;
        d.embedding = hyper;
        d.classifier = clf.name();
        d.k_folds = grid.k_folds;
        d.upsample_ratio = grid.upsample_ratio;
        d.seed = derive_seed(master_seed, fnv1a(d.key()));
        return d;
    };

    // The embedding seed is part of the descriptor-derived stream too, so a
    // grid subset retrains identical models.
    std::vector<std::vector<GridCellResult>> per_task(tasks.size() + (metrics_only ? 1 : 0));
    parallel_tasks(tasks.size(), workers, [&](std::size_t ti) {
        Doc2VecHyper hyper = tasks[ti].hyper;
        char hbuf[128];
        std::snprintf(hbuf, sizeof(hbuf), "embed|method=%s|dim=%03d|window=%02d|epochs=%03d",
                      method_name(hyper.method), hyper.dim, hyper.window, hyper.epochs);
        hyper.seed = derive_seed(master_seed, fnv1a(hbuf));

        std::vector<GridCellResult>& cells = per_task[ti];
        std::optional<Doc2VecModel> model;
        std::string train_error;
        try {
            model = train(corpus, hyper);
        } catch (const std::exception& e) {
            train_error = e.what();
        }
        for (FeatureMode mode : embed_modes) {
            std::optional<VectorData> vectors;
            std::optional<FeatureTable> table;
            std::string table_error = train_error;
            if (model) {
                try {
                    vectors = vectors_of_model(*model);
                    table = assemble(mode, &*vectors, metrics, labels);
                } catch (const std::exception& e) {
                    table_error = e.what();
                }
            }
            for (const ClassifierSpec& clf : grid.classifiers) {
                GridCellResult cell;
                cell.descriptor = descriptor_for(hyper, mode, clf);
                if (!table) {
                    cell.error = table_error;
                } else {
                    try {
                        cell.report = cross_validate(*table, clf, grid.k_folds,
                                                     cell.descriptor.seed, grid.upsample_ratio);
                        cell.report->descriptor = cell.descriptor;
                    } catch (const std::exception& e) {
                        cell.error = e.what();
                    }
                }
                cells.push_back(std::move(cell));
            }
        }
    });

    if (metrics_only) {
        std::vector<GridCellResult>& cells = per_task.back();
        std::optional<FeatureTable> table;
        std::string table_error;
        try {
            table = assemble(FeatureMode::kMetrics, nullptr, metrics, labels);
        } catch (const std::exception& e) {
            table_error = e.what();
        }
        for (const ClassifierSpec& clf : grid.classifiers) {
            GridCellResult cell;
            cell.descriptor = descriptor_for(std::nullopt, FeatureMode::kMetrics, clf);
            if (!table) {
                cell.error = table_error;
            } else {
                try {
                    cell.report = cross_validate(*table, clf, grid.k_folds, cell.descriptor.seed,
                                                 grid.upsample_ratio);
                    cell.report->descriptor = cell.descriptor;
                } catch (const std::exception& e) {
                    cell.error = e.what();
                }
            }
            cells.push_back(std::move(cell));
        }
    }

    std::vector<GridCellResult> results;
    for (auto& cells : per_task)
        for (auto& cell : cells) results.push_back(std::move(cell));
    std::sort(results.begin(), results.end(), [](const GridCellResult& a, const GridCellResult& b) {
        return a.descriptor.key() < b.descriptor.key();
    });
    return results;
}

SynthCorpus synth_corpus(int n_per_class, int vocab_size, std::span<const int> motif,
                         double p_motif, std::uint64_t seed) {
    if (p_motif < 0.0 || p_motif > 1.0) throw std::invalid_argument("p_motif must be in [0,1]");
    for (int t : motif)
        if (t < 1 || t > vocab_size)
            throw std::invalid_argument("motif token outside vocabulary");

    // Background draws avoid the motif tokens entirely, so label-0
    // documents can never contain the motif even as a scattered subset.
    std::vector<int> background;
    for (int t = 1; t <= vocab_size; ++t)
        if (std::find(motif.begin(), motif.end(), t) == motif.end()) background.push_back(t);
    if (background.empty()) throw std::invalid_argument("vocabulary has no non-motif tokens");

    SynthCorpus out;
    Rng rng(seed);
    char id[32];
    for (int i = 0; i < 2 * n_per_class; ++i) {
        int label = i < n_per_class ? 1 : 0;
        std::snprintf(id, sizeof(id), "doc%05d", i);

        // Root with leaf children; the motif becomes one nested chain so it
        // stays contiguous in the flattened sequence.
        CodeTree root;
        root.code = background[rng.next_below(background.size())];
        std::size_t leaves = 10 + rng.next_below(11);  // 10..20
        for (std::size_t l = 0; l < leaves; ++l)
            root.children.push_back(CodeTree{
                background[rng.next_below(background.size())], {}});
        bool with_motif = label == 1 && rng.next_double() < p_motif;
        if (with_motif && !motif.empty()) {
            CodeTree chain{motif.back(), {}};
            for (std::size_t m = motif.size() - 1; m-- > 0;)
                chain = CodeTree{motif[m], {std::move(chain)}};
            std::size_t at = rng.next_below(root.children.size() + 1);
            root.children.insert(root.children.begin() + static_cast<long>(at),
                                 std::move(chain));
        }

        TokenSequence seq;
        seq.doc_id = id;
        seq.tokens = flatten_codes(root);
        out.labels[seq.doc_id] = label;
        out.docs.push_back(std::move(seq));
    }
    return out;
}

}  // namespace bugpred
