// bugpred: flatten source trees, train paragraph-vector embeddings, and run
// the bug-prediction experiment pipeline from the command line.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bugpred/corpus_io.hpp"
#include "bugpred/dataset.hpp"
#include "bugpred/doc2vec.hpp"
#include "bugpred/eval.hpp"
#include "bugpred/java_parser.hpp"
#include "bugpred/parallel.hpp"
#include "bugpred/report.hpp"
#include "bugpred/rng.hpp"
#include "bugpred/tree_json.hpp"

namespace fs = std::filesystem;
using namespace bugpred;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDataError = 2;
constexpr int kExitPartial = 3;

std::uint64_t env_seed_default() {
    if (const char* s = std::getenv("BUGPRED_SEED")) return std::strtoull(s, nullptr, 10);
    return 1;
}

int env_workers_default() {
    if (const char* s = std::getenv("BUGPRED_WORKERS")) return std::max(1, std::atoi(s));
    return default_workers();
}

std::string sanitize_key(const std::string& key) {
    std::string out;
    for (char c : key)
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-'
                          ? c
                          : '_');
    return out;
}

std::string doc_id_for_path(const fs::path& path) {
    std::string stem = path.string();
    if (stem.rfind("./", 0) == 0) stem = stem.substr(2);
    std::size_t dot = stem.find_last_of('.');
    if (dot != std::string::npos && dot > stem.find_last_of('/')) stem = stem.substr(0, dot);
    std::replace(stem.begin(), stem.end(), '/', '.');
    return stem;
}

// ---------------------------------------------------------------------------
// flatten
// ---------------------------------------------------------------------------

struct FlattenOptions {
    std::vector<std::string> inputs;
    std::string out;
    std::string format = "auto";  // auto | java | tree
};

int cmd_flatten(const FlattenOptions& opt) {
    std::vector<fs::path> files;
    for (const std::string& input : opt.inputs) {
        fs::path p(input);
        if (fs::is_directory(p)) {
            for (const auto& entry : fs::recursive_directory_iterator(p))
                if (entry.is_regular_file()) files.push_back(entry.path());
        } else if (fs::is_regular_file(p)) {
            files.push_back(p);
        } else {
            std::cerr << "error: no such input: " << input << "\n";
            return kExitDataError;
        }
    }
    std::sort(files.begin(), files.end());

    std::vector<TokenSequence> corpus;
    std::size_t skipped = 0;
    const KindTable& table = KindTable::builtin();
    for (const fs::path& file : files) {
        std::string ext = file.extension().string();
        bool java = opt.format == "java" || (opt.format == "auto" && ext == ".java");
        bool tree = opt.format == "tree" ||
                    (opt.format == "auto" && (ext == ".tree" || ext == ".json"));
        if (!java && !tree) continue;
        try {
            if (java) {
                std::ifstream in(file, std::ios::binary);
                std::string source((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
                auto trees = parse_java_subset(source);
                if (trees.empty()) throw std::runtime_error("no type declarations");
                for (const SyntaxTree& t : trees)
                    corpus.push_back(
                        flatten(t, table, doc_id_for_path(file) + "#" + t.root.label));
            } else {
                SyntaxTree t = parse_tree_file(file.string());
                corpus.push_back(flatten(t, table, doc_id_for_path(file)));
            }
        } catch (const std::exception& e) {
            std::cerr << "skipped " << file.string() << ": " << e.what() << "\n";
            ++skipped;
        }
    }

    if (corpus.empty()) {
        std::cerr << "error: no documents\n";
        return kExitDataError;
    }
    for (const TokenSequence& seq : corpus) {
        if (!validate_sequence(seq)) {
            std::cerr << "error: invalid sequence for " << seq.doc_id << "\n";
            return kExitDataError;
        }
    }
    write_corpus_file(corpus, opt.out);
    std::cout << "documents: " << corpus.size() << "\nvalidation: ok\n";
    if (skipped) {
        std::cout << "skipped: " << skipped << "\n";
        return kExitPartial;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// embed
// ---------------------------------------------------------------------------

struct EmbedOptions {
    std::string corpus;
    std::string model_out;
    std::string vectors_out;
    std::string method = "pvdm";
    Doc2VecHyper hyper;
};

int cmd_embed(EmbedOptions& opt) {
    auto method = method_from_name(opt.method);
    if (!method) {
        std::cerr << "error: unknown method '" << opt.method << "' (pvdm or pvdbow)\n";
        return kExitUsage;
    }
    opt.hyper.method = *method;
    try {
        opt.hyper.validate();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    auto corpus = read_corpus_file(opt.corpus);
    std::cout << "corpus: " << corpus.size() << " documents\n";
    std::cout << "hyperparameters: method=" << method_name(opt.hyper.method)
              << " dim=" << opt.hyper.dim << " window=" << opt.hyper.window
              << " epochs=" << opt.hyper.epochs << " negatives=" << opt.hyper.negatives
              << " alpha_start=" << opt.hyper.alpha_start << " alpha_end=" << opt.hyper.alpha_end
              << " seed=" << opt.hyper.seed << "\n";

    Doc2VecModel model = train(corpus, opt.hyper);
    if (!opt.model_out.empty()) save_model(model, opt.model_out);
    if (!opt.vectors_out.empty()) export_vectors(model, opt.vectors_out);
    std::cout << "trained " << model.doc_ids.size() << " document vectors (dim "
              << opt.hyper.dim << ")\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// featurize / eval / permute share input loading
// ---------------------------------------------------------------------------

struct DataOptions {
    std::string vectors;
    std::string metrics;
    std::string labels;
    std::string mode = "embedding";
};

FeatureTable load_table(const DataOptions& opt, JoinReport* report) {
    auto mode = mode_from_name(opt.mode);
    if (!mode) throw std::runtime_error("unknown mode '" + opt.mode + "'");
    std::optional<VectorData> vectors;
    std::optional<MetricsData> metrics;
    if (!opt.vectors.empty()) vectors = load_vectors(opt.vectors);
    if (!opt.metrics.empty()) metrics = load_metrics(opt.metrics);
    auto labels = binarize(load_labels(opt.labels));
    return assemble(*mode, vectors ? &*vectors : nullptr, metrics ? &*metrics : nullptr, labels,
                    report);
}

struct FeaturizeOptions {
    DataOptions data;
    std::string out;
};

int cmd_featurize(const FeaturizeOptions& opt) {
    JoinReport report;
    FeatureTable table = load_table(opt.data, &report);
    write_feature_table(table, opt.out);
    std::cout << report.to_string() << "\n";
    std::cout << "rows: " << table.size() << ", features: " << table.features.cols << "\n";
    return kExitOk;
}

struct EvalOptions {
    DataOptions data;
    std::vector<std::string> classifiers;
    int k = 10;
    double ratio = 0.5;
    std::uint64_t seed = 1;
    std::string out_dir;
};

int cmd_eval(const EvalOptions& opt) {
    JoinReport join;
    FeatureTable table = load_table(opt.data, &join);
    std::cout << join.to_string() << "\n";
    std::cout << "rows: " << table.size() << ", features: " << table.features.cols << "\n";

    fs::create_directories(opt.out_dir);
    std::vector<EvalReport> reports;
    int failures = 0;
    for (const std::string& name : opt.classifiers) {
        auto spec = ClassifierSpec::from_name(name);
        if (!spec) {
            std::cerr << "error: unknown classifier '" << name << "'\n";
            return kExitUsage;
        }
        ExperimentDescriptor d;
        d.mode = table.mode;
        d.classifier = spec->name();
        d.k_folds = opt.k;
        d.upsample_ratio = opt.ratio;
        std::uint64_t seed = derive_seed(opt.seed, fnv1a(d.key()));
        try {
            EvalReport r = cross_validate(table, *spec, opt.k, seed, opt.ratio);
            r.descriptor.mode = table.mode;
            std::printf("%-12s precision %.4f recall %.4f f %.4f\n", spec->name().c_str(),
                        r.mean_precision, r.mean_recall, r.mean_f);
            write_report_file(r, opt.out_dir + "/" + sanitize_key(r.descriptor.key()) + ".json");
            reports.push_back(std::move(r));
        } catch (const std::exception& e) {
            std::cerr << spec->name() << " failed: " << e.what() << "\n";
            ++failures;
        }
    }
    if (!reports.empty()) {
        std::ofstream summary(opt.out_dir + "/summary.txt");
        summary << comparison_table(reports) << "\n" << five_number_summary(reports);
    }
    if (failures) return kExitPartial;
    return kExitOk;
}

struct PermuteOptions {
    DataOptions data;
    std::string classifier = "logistic";
    int n = 20;
    int k = 10;
    double ratio = 0.5;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out_dir;
};

int cmd_permute(const PermuteOptions& opt) {
    JoinReport join;
    FeatureTable table = load_table(opt.data, &join);
    std::cout << join.to_string() << "\n";
    auto spec = ClassifierSpec::from_name(opt.classifier);
    if (!spec) {
        std::cerr << "error: unknown classifier '" << opt.classifier << "'\n";
        return kExitUsage;
    }

    auto reports = permutation_test(table, *spec, opt.n, opt.seed, opt.k, opt.ratio, opt.workers);
    fs::create_directories(opt.out_dir);
    std::vector<double> fs_values;
    for (const EvalReport& r : reports) {
        write_report_file(r, opt.out_dir + "/" + sanitize_key(r.descriptor.key()) + ".json");
        fs_values.push_back(r.mean_f);
    }
    FiveNumber fn = five_number(fs_values);
    std::printf("permutations: %d\nf-score min %.5f q1 %.5f median %.5f q3 %.5f max %.5f\n",
                opt.n, fn.min, fn.q1, fn.median, fn.q3, fn.max);
    std::ofstream summary(opt.out_dir + "/summary.txt");
    summary << five_number_summary(reports);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// grid
// ---------------------------------------------------------------------------

struct GridOptions {
    std::string corpus;
    std::string labels;
    std::string metrics;
    std::vector<std::string> methods = {"pvdm", "pvdbow"};
    std::vector<int> dims = {25, 50, 75, 150};
    std::vector<int> windows = {4, 8, 12};
    std::vector<int> epochs = {6, 10, 20, 40, 60, 80, 100};
    std::vector<std::string> classifiers;
    std::vector<std::string> modes = {"embedding"};
    int negatives = 5;
    double alpha_start = 0.025;
    double alpha_end = 0.0001;
    int k = 10;
    double ratio = 0.5;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out_dir;
};

int cmd_grid(const GridOptions& opt) {
    GridSpec grid;
    grid.negatives = opt.negatives;
    grid.alpha_start = opt.alpha_start;
    grid.alpha_end = opt.alpha_end;
    for (const std::string& m : opt.methods) {
        auto method = method_from_name(m);
        if (!method) {
            std::cerr << "error: unknown method '" << m << "'\n";
            return kExitUsage;
        }
        grid.methods.push_back(*method);
    }
    grid.dims = opt.dims;
    grid.windows = opt.windows;
    grid.epochs = opt.epochs;
    grid.k_folds = opt.k;
    grid.upsample_ratio = opt.ratio;
    if (opt.classifiers.empty()) {
        grid.classifiers = ClassifierSpec::full_roster();
    } else {
        for (const std::string& name : opt.classifiers) {
            auto spec = ClassifierSpec::from_name(name);
            if (!spec) {
                std::cerr << "error: unknown classifier '" << name << "'\n";
                return kExitUsage;
            }
            grid.classifiers.push_back(*spec);
        }
    }
    for (const std::string& m : opt.modes) {
        auto mode = mode_from_name(m);
        if (!mode) {
            std::cerr << "error: unknown mode '" << m << "'\n";
            return kExitUsage;
        }
        grid.modes.push_back(*mode);
    }

    auto corpus = read_corpus_file(opt.corpus);
    auto labels = binarize(load_labels(opt.labels));
    std::optional<MetricsData> metrics;
    if (!opt.metrics.empty()) metrics = load_metrics(opt.metrics);

    std::size_t cells =
        grid.embedding_config_count() *
        (grid.modes.size() - (std::count(grid.modes.begin(), grid.modes.end(),
                                         FeatureMode::kMetrics)
                                  ? 1
                                  : 0)) *
        grid.classifiers.size();
    std::cout << "grid: " << grid.embedding_config_count() << " embedding configurations, "
              << grid.classifiers.size() << " classifiers, about " << cells
              << " cells, workers " << opt.workers << "\n";

    auto results =
        grid_run(corpus, grid, labels, metrics ? &*metrics : nullptr, opt.seed, opt.workers);

    fs::create_directories(opt.out_dir);
    std::vector<EvalReport> reports;
    int failures = 0;
    for (const GridCellResult& cell : results) {
        if (cell.report) {
            write_report_file(*cell.report,
                              opt.out_dir + "/" + sanitize_key(cell.descriptor.key()) + ".json");
            reports.push_back(*cell.report);
        } else {
            std::cerr << "failed " << cell.descriptor.key() << ": " << cell.error << "\n";
            ++failures;
        }
    }
    std::string table = comparison_table(reports);
    std::string summary = five_number_summary(reports);
    std::ofstream out(opt.out_dir + "/summary.txt");
    out << table << "\n" << summary;
    std::cout << table << "\n" << summary;
    std::cout << "cells: " << results.size() << ", failed: " << failures << "\n";
    return failures ? kExitPartial : kExitOk;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

struct ReportOptions {
    std::vector<std::string> inputs;
    std::string out;
};

int cmd_report(const ReportOptions& opt) {
    std::vector<fs::path> files;
    for (const std::string& input : opt.inputs) {
        fs::path p(input);
        if (fs::is_directory(p)) {
            for (const auto& entry : fs::directory_iterator(p))
                if (entry.path().extension() == ".json") files.push_back(entry.path());
        } else {
            files.push_back(p);
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<EvalReport> reports;
    for (const fs::path& f : files) reports.push_back(read_report_file(f.string()));
    if (reports.empty()) {
        std::cerr << "error: no reports\n";
        return kExitDataError;
    }
    std::string text = comparison_table(reports) + "\n" + five_number_summary(reports);
    if (opt.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(opt.out);
        out << text;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AST flattening, paragraph-vector embeddings, and bug-prediction experiments"};
    app.require_subcommand(1);

    std::uint64_t default_seed = env_seed_default();
    int default_workers = env_workers_default();

    FlattenOptions flatten_opt;
    auto* flatten_cmd =
        app.add_subcommand("flatten", "Flatten Java sources or serialized trees to a corpus file");
    flatten_cmd->add_option("inputs", flatten_opt.inputs, "Input files or directories")
        ->required();
    flatten_cmd->add_option("-o,--out", flatten_opt.out, "Corpus output file")->required();
    flatten_cmd->add_option("--format", flatten_opt.format, "auto, java, or tree")
        ->capture_default_str();

    EmbedOptions embed_opt;
    embed_opt.hyper.seed = default_seed;
    auto* embed_cmd = app.add_subcommand("embed", "Train a paragraph-vector model over a corpus");
    embed_cmd->add_option("--corpus", embed_opt.corpus, "Corpus file from flatten")->required();
    embed_cmd->add_option("--method", embed_opt.method, "pvdm or pvdbow")->capture_default_str();
    embed_cmd->add_option("--dim", embed_opt.hyper.dim, "Vector size (grid default 25/50/75/150)")
        ->capture_default_str();
    embed_cmd->add_option("--window", embed_opt.hyper.window, "Context window (4/8/12)")
        ->capture_default_str();
    embed_cmd->add_option("--epochs", embed_opt.hyper.epochs, "Epochs (6..100)")
        ->capture_default_str();
    embed_cmd->add_option("--negatives", embed_opt.hyper.negatives, "Noise samples per position")
        ->capture_default_str();
    embed_cmd->add_option("--alpha-start", embed_opt.hyper.alpha_start, "Initial learning rate")
        ->capture_default_str();
    embed_cmd->add_option("--alpha-end", embed_opt.hyper.alpha_end, "Final learning rate")
        ->capture_default_str();
    embed_cmd->add_option("--seed", embed_opt.hyper.seed, "RNG seed (env BUGPRED_SEED)")
        ->capture_default_str();
    embed_cmd->add_option("--model", embed_opt.model_out, "Model output file");
    embed_cmd->add_option("--vectors", embed_opt.vectors_out, "Vector export output file");

    FeaturizeOptions feat_opt;
    auto* feat_cmd =
        app.add_subcommand("featurize", "Join vectors, metrics, and labels into a feature table");
    feat_cmd->add_option("--vectors", feat_opt.data.vectors, "Vectors file from embed");
    feat_cmd->add_option("--metrics", feat_opt.data.metrics, "Code metrics file");
    feat_cmd->add_option("--labels", feat_opt.data.labels, "Labels file")->required();
    feat_cmd->add_option("--mode", feat_opt.data.mode, "embedding, metrics, or combined")
        ->capture_default_str();
    feat_cmd->add_option("-o,--out", feat_opt.out, "Feature table output file")->required();

    EvalOptions eval_opt;
    eval_opt.seed = default_seed;
    auto* eval_cmd = app.add_subcommand("eval", "Cross-validate classifiers on a feature table");
    eval_cmd->add_option("--vectors", eval_opt.data.vectors, "Vectors file from embed");
    eval_cmd->add_option("--metrics", eval_opt.data.metrics, "Code metrics file");
    eval_cmd->add_option("--labels", eval_opt.data.labels, "Labels file")->required();
    eval_cmd->add_option("--mode", eval_opt.data.mode, "embedding, metrics, or combined")
        ->capture_default_str();
    eval_cmd
        ->add_option("--classifier", eval_opt.classifiers,
                     "naive_bayes, linear, logistic, tree, forest, knn, sdnnc, cdnnc")
        ->required()
        ->delimiter(',');
    eval_cmd->add_option("-k,--folds", eval_opt.k, "Cross-validation folds")
        ->capture_default_str();
    eval_cmd->add_option("--ratio", eval_opt.ratio, "Upsample ratio: minority to ratio*majority")
        ->capture_default_str();
    eval_cmd->add_option("--seed", eval_opt.seed, "Master seed (env BUGPRED_SEED)")
        ->capture_default_str();
    eval_cmd->add_option("--out-dir", eval_opt.out_dir, "Report output directory")->required();

    PermuteOptions perm_opt;
    perm_opt.seed = default_seed;
    perm_opt.workers = default_workers;
    auto* perm_cmd =
        app.add_subcommand("permute", "Label-permutation validity test (near-chance F expected)");
    perm_cmd->add_option("--vectors", perm_opt.data.vectors, "Vectors file from embed");
    perm_cmd->add_option("--metrics", perm_opt.data.metrics, "Code metrics file");
    perm_cmd->add_option("--labels", perm_opt.data.labels, "Labels file")->required();
    perm_cmd->add_option("--mode", perm_opt.data.mode, "embedding, metrics, or combined")
        ->capture_default_str();
    perm_cmd->add_option("--classifier", perm_opt.classifier, "Classifier name")
        ->capture_default_str();
    perm_cmd->add_option("-n,--permutations", perm_opt.n, "Number of label permutations")
        ->capture_default_str();
    perm_cmd->add_option("-k,--folds", perm_opt.k, "Cross-validation folds")
        ->capture_default_str();
    perm_cmd->add_option("--ratio", perm_opt.ratio, "Upsample ratio")->capture_default_str();
    perm_cmd->add_option("--seed", perm_opt.seed, "Master seed (env BUGPRED_SEED)")
        ->capture_default_str();
    perm_cmd->add_option("--workers", perm_opt.workers, "Parallel workers (env BUGPRED_WORKERS)")
        ->capture_default_str();
    perm_cmd->add_option("--out-dir", perm_opt.out_dir, "Report output directory")->required();

    GridOptions grid_opt;
    grid_opt.seed = default_seed;
    grid_opt.workers = default_workers;
    auto* grid_cmd = app.add_subcommand(
        "grid", "Train the embedding grid and evaluate every classifier on each cell");
    grid_cmd->add_option("--corpus", grid_opt.corpus, "Corpus file from flatten")->required();
    grid_cmd->add_option("--labels", grid_opt.labels, "Labels file")->required();
    grid_cmd->add_option("--metrics", grid_opt.metrics, "Code metrics file (for combined mode)");
    grid_cmd->add_option("--methods", grid_opt.methods, "pvdm,pvdbow")
        ->delimiter(',')
        ->capture_default_str();
    grid_cmd->add_option("--dims", grid_opt.dims, "Vector sizes")
        ->delimiter(',')
        ->capture_default_str();
    grid_cmd->add_option("--windows", grid_opt.windows, "Window sizes")
        ->delimiter(',')
        ->capture_default_str();
    grid_cmd->add_option("--epochs", grid_opt.epochs, "Epoch counts")
        ->delimiter(',')
        ->capture_default_str();
    grid_cmd->add_option("--classifiers", grid_opt.classifiers,
                         "Classifier names (default: the full roster)")
        ->delimiter(',');
    grid_cmd->add_option("--modes", grid_opt.modes, "embedding,metrics,combined")
        ->delimiter(',')
        ->capture_default_str();
    grid_cmd->add_option("--negatives", grid_opt.negatives, "Noise samples per position")
        ->capture_default_str();
    grid_cmd->add_option("--alpha-start", grid_opt.alpha_start, "Initial learning rate")
        ->capture_default_str();
    grid_cmd->add_option("--alpha-end", grid_opt.alpha_end, "Final learning rate")
        ->capture_default_str();
    grid_cmd->add_option("-k,--folds", grid_opt.k, "Cross-validation folds")
        ->capture_default_str();
    grid_cmd->add_option("--ratio", grid_opt.ratio, "Upsample ratio")->capture_default_str();
    grid_cmd->add_option("--seed", grid_opt.seed, "Master seed (env BUGPRED_SEED)")
        ->capture_default_str();
    grid_cmd->add_option("--workers", grid_opt.workers, "Parallel workers (env BUGPRED_WORKERS)")
        ->capture_default_str();
    grid_cmd->add_option("--out-dir", grid_opt.out_dir, "Report output directory")->required();

    ReportOptions report_opt;
    auto* report_cmd =
        app.add_subcommand("report", "Summarize report files into comparison tables");
    report_cmd->add_option("inputs", report_opt.inputs, "Report files or directories")
        ->required();
    report_cmd->add_option("-o,--out", report_opt.out, "Write the summary here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (flatten_cmd->parsed()) return cmd_flatten(flatten_opt);
        if (embed_cmd->parsed()) return cmd_embed(embed_opt);
        if (feat_cmd->parsed()) return cmd_featurize(feat_opt);
        if (eval_cmd->parsed()) return cmd_eval(eval_opt);
        if (perm_cmd->parsed()) return cmd_permute(perm_opt);
        if (grid_cmd->parsed()) return cmd_grid(grid_opt);
        if (report_cmd->parsed()) return cmd_report(report_opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataError;
    }
    return kExitUsage;
}
