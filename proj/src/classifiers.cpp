#include "bugpred/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bugpred/mlp.hpp"
#include "bugpred/parallel.hpp"
#include "bugpred/rng.hpp"

namespace bugpred {

const char* family_name(ClassifierFamily f) {
    switch (f) {
        case ClassifierFamily::kNaiveBayes: return "naive_bayes";
        case ClassifierFamily::kLinear: return "linear";
        case ClassifierFamily::kLogistic: return "logistic";
        case ClassifierFamily::kTree: return "tree";
        case ClassifierFamily::kForest: return "forest";
        case ClassifierFamily::kKnn: return "knn";
        case ClassifierFamily::kMlp: return "mlp";
    }
    return "?";
}

std::string ClassifierSpec::name() const {
    return preset.empty() ? family_name(family) : preset;
}

ClassifierSpec ClassifierSpec::defaults(ClassifierFamily f) {
    ClassifierSpec s;
    s.family = f;
    switch (f) {
        case ClassifierFamily::kNaiveBayes: s.params = NaiveBayesParams{}; break;
        case ClassifierFamily::kLinear: s.params = LinearParams{}; break;
        case ClassifierFamily::kLogistic: s.params = LogisticParams{}; break;
        case ClassifierFamily::kTree: s.params = TreeParams{}; break;
        case ClassifierFamily::kForest: s.params = ForestParams{}; break;
        case ClassifierFamily::kKnn: s.params = KnnParams{}; break;
        case ClassifierFamily::kMlp: return sdnnc();
    }
    return s;
}

ClassifierSpec ClassifierSpec::sdnnc() {
    ClassifierSpec s;
    s.family = ClassifierFamily::kMlp;
    s.preset = "sdnnc";
    s.params = MlpParams{};  // 5 x 200, lr 0.05, 10 epochs, batch 100
    return s;
}

ClassifierSpec ClassifierSpec::cdnnc() {
    ClassifierSpec s;
    s.family = ClassifierFamily::kMlp;
    s.preset = "cdnnc";
    MlpParams p;
    p.hidden_units = 250;
    p.l2_beta = 0.0005;
    p.early_stopping = true;
    s.params = p;
    return s;
}

std::optional<ClassifierSpec> ClassifierSpec::from_name(std::string_view name) {
    if (name == "sdnnc") return sdnnc();
    if (name == "cdnnc") return cdnnc();
    for (ClassifierFamily f :
         {ClassifierFamily::kNaiveBayes, ClassifierFamily::kLinear, ClassifierFamily::kLogistic,
          ClassifierFamily::kTree, ClassifierFamily::kForest, ClassifierFamily::kKnn}) {
        if (name == family_name(f)) return defaults(f);
    }
    if (name == "bayes") return defaults(ClassifierFamily::kNaiveBayes);
    return std::nullopt;
}

std::vector<ClassifierSpec> ClassifierSpec::full_roster() {
    return {defaults(ClassifierFamily::kNaiveBayes),
            defaults(ClassifierFamily::kLinear),
            defaults(ClassifierFamily::kLogistic),
            defaults(ClassifierFamily::kTree),
            defaults(ClassifierFamily::kForest),
            defaults(ClassifierFamily::kKnn),
            sdnnc(),
            cdnnc()};
}

// ---------------------------------------------------------------------------
// Trained model internals
// ---------------------------------------------------------------------------

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct GaussianNb {
    double log_prior[2] = {0.0, 0.0};
    std::vector<double> mean[2];
    std::vector<double> var[2];
};

struct LinearModel {
    std::vector<double> weights;  // F
    double intercept = 0.0;
    double threshold = 0.5;  // linear family only; logistic thresholds at 0.5
};

struct KnnModel {
    Matrix train_x;
    std::vector<int> train_y;
    int k = 18;
};

struct ForestModel {
    std::vector<detail::DecisionTree> trees;
};

}  // namespace

struct TrainedModel::Impl {
    ClassifierFamily family;
    std::size_t feature_count = 0;
    std::variant<GaussianNb, LinearModel, detail::DecisionTree, ForestModel, KnnModel, MlpNet>
        model;
    bool logistic = false;  // LinearModel doubles for logistic; scores go through sigmoid
};

TrainedModel::TrainedModel(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)), family_(impl_->family), feature_count_(impl_->feature_count) {}

// ---------------------------------------------------------------------------
// Family fitters
// ---------------------------------------------------------------------------

namespace {

void check_inputs(const Matrix& x, const std::vector<int>& y, bool allow_single_class) {
    if (x.rows != y.size()) throw std::invalid_argument("fit: row/label count mismatch");
    if (x.rows < 2) throw std::invalid_argument("fit: need at least 2 rows");
    for (double v : x.data)
        if (!std::isfinite(v)) throw std::invalid_argument("fit: non-finite feature value");
    bool has[2] = {false, false};
    for (int label : y) {
        if (label != 0 && label != 1) throw std::invalid_argument("fit: labels must be 0/1");
        has[label] = true;
    }
    if (!allow_single_class && (!has[0] || !has[1]))
        throw std::invalid_argument("fit: training data has a single class");
}

GaussianNb fit_naive_bayes(const Matrix& x, const std::vector<int>& y) {
    GaussianNb nb;
    std::size_t n[2] = {0, 0};
    for (int c : {0, 1}) {
        nb.mean[c].assign(x.cols, 0.0);
        nb.var[c].assign(x.cols, 0.0);
    }
    for (std::size_t r = 0; r < x.rows; ++r) {
        ++n[y[r]];
        for (std::size_t c = 0; c < x.cols; ++c) nb.mean[y[r]][c] += x(r, c);
    }
    for (int c : {0, 1})
        for (double& m : nb.mean[c]) m /= static_cast<double>(n[c]);
    for (std::size_t r = 0; r < x.rows; ++r)
        for (std::size_t c = 0; c < x.cols; ++c) {
            double d = x(r, c) - nb.mean[y[r]][c];
            nb.var[y[r]][c] += d * d;
        }
    // Variance floor proportional to the largest feature variance, so
    // constant-per-class columns cannot produce infinite densities.
    double max_var = 0.0;
    for (int c : {0, 1})
        for (std::size_t j = 0; j < x.cols; ++j) {
            nb.var[c][j] /= static_cast<double>(n[c]);
            max_var = std::max(max_var, nb.var[c][j]);
        }
    double floor = std::max(1e-9 * max_var, 1e-12);
    for (int c : {0, 1})
        for (double& v : nb.var[c]) v = std::max(v, floor);
    for (int c : {0, 1})
        nb.log_prior[c] = std::log(static_cast<double>(n[c]) / static_cast<double>(x.rows));
    return nb;
}

double nb_log_likelihood(const GaussianNb& nb, int c, std::span<const double> row) {
    double ll = nb.log_prior[c];
    for (std::size_t j = 0; j < row.size(); ++j) {
        double d = row[j] - nb.mean[c][j];
        ll += -0.5 * std::log(2.0 * M_PI * nb.var[c][j]) - d * d / (2.0 * nb.var[c][j]);
    }
    return ll;
}

// Solves (A + jitter*I) w = b in place via Cholesky; A must be symmetric
// positive semidefinite. Escalates jitter until the factorization succeeds.
std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b, std::size_t n) {
    double jitter = 0.0;
    for (int attempt = 0; attempt < 12; ++attempt) {
        std::vector<double> l = a;
        if (jitter > 0.0)
            for (std::size_t i = 0; i < n; ++i) l[i * n + i] += jitter;
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double sum = l[i * n + j];
                for (std::size_t k = 0; k < j; ++k) sum -= l[i * n + k] * l[j * n + k];
                if (i == j) {
                    if (sum <= 0.0) {
                        ok = false;
                        break;
                    }
                    l[i * n + i] = std::sqrt(sum);
                } else {
                    l[i * n + j] = sum / l[j * n + j];
                }
            }
        }
        if (!ok) {
            jitter = jitter == 0.0 ? 1e-10 : jitter * 10.0;
            continue;
        }
        std::vector<double> z(n);
        for (std::size_t i = 0; i < n; ++i) {
            double sum = b[i];
            for (std::size_t k = 0; k < i; ++k) sum -= l[i * n + k] * z[k];
            z[i] = sum / l[i * n + i];
        }
        std::vector<double> w(n);
        for (std::size_t ii = n; ii > 0; --ii) {
            std::size_t i = ii - 1;
            double sum = z[i];
            for (std::size_t k = i + 1; k < n; ++k) sum -= l[k * n + i] * w[k];
            w[i] = sum / l[i * n + i];
        }
        return w;
    }
    throw std::runtime_error("linear solve failed");
}

LinearModel fit_linear(const Matrix& x, const std::vector<int>& y) {
    // Least squares on [X 1] via normal equations.
    const std::size_t f = x.cols;
    const std::size_t n = f + 1;
    std::vector<double> a(n * n, 0.0), b(n, 0.0);
    for (std::size_t r = 0; r < x.rows; ++r) {
        for (std::size_t i = 0; i < f; ++i) {
            for (std::size_t j = 0; j <= i; ++j) a[i * n + j] += x(r, i) * x(r, j);
            a[f * n + i] += x(r, i);
            b[i] += x(r, i) * y[r];
        }
        a[f * n + f] += 1.0;
        b[f] += y[r];
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) a[i * n + j] = a[j * n + i];

    std::vector<double> w = solve_spd(std::move(a), std::move(b), n);
    LinearModel m;
    m.weights.assign(w.begin(), w.begin() + static_cast<long>(f));
    m.intercept = w[f];
    return m;
}

// L2-regularized logistic regression by damped Newton (IRLS). Minimizes
//   mean_i log(1 + exp(-(2 y_i - 1) z_i)) + lambda/2 * |w|^2,
// lambda = 1 / (c * N); the intercept is not penalized. Stops when the
// gradient inf-norm falls below tol.
LinearModel fit_logistic(const Matrix& x, const std::vector<int>& y, const LogisticParams& p) {
    const std::size_t f = x.cols;
    const std::size_t n = f + 1;
    const std::size_t rows = x.rows;
    const double lambda = 1.0 / (p.c * static_cast<double>(rows));

    std::vector<double> w(n, 0.0);  // weights then intercept
    std::vector<double> scores(rows), probs(rows);

    auto eval_scores = [&](const std::vector<double>& wv) {
        for (std::size_t r = 0; r < rows; ++r) {
            double z = wv[f];
            std::span<const double> row = x.row(r);
            for (std::size_t j = 0; j < f; ++j) z += wv[j] * row[j];
            scores[r] = z;
        }
    };
    auto loss_of = [&](const std::vector<double>& wv) {
        eval_scores(wv);
        double loss = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
            double z = scores[r];
            loss += std::max(z, 0.0) - y[r] * z + std::log1p(std::exp(-std::abs(z)));
        }
        loss /= static_cast<double>(rows);
        double reg = 0.0;
        for (std::size_t j = 0; j < f; ++j) reg += wv[j] * wv[j];
        return loss + 0.5 * lambda * reg;
    };

    double current_loss = loss_of(w);
    for (int iter = 0; iter < 100; ++iter) {
        eval_scores(w);
        for (std::size_t r = 0; r < rows; ++r) probs[r] = sigmoid(scores[r]);

        std::vector<double> grad(n, 0.0);
        for (std::size_t r = 0; r < rows; ++r) {
            double d = probs[r] - y[r];
            std::span<const double> row = x.row(r);
            for (std::size_t j = 0; j < f; ++j) grad[j] += d * row[j];
            grad[f] += d;
        }
        for (double& g : grad) g /= static_cast<double>(rows);
        for (std::size_t j = 0; j < f; ++j) grad[j] += lambda * w[j];

        double gmax = 0.0;
        for (double g : grad) gmax = std::max(gmax, std::abs(g));
        if (gmax < p.tol) break;

        std::vector<double> h(n * n, 0.0);
        for (std::size_t r = 0; r < rows; ++r) {
            double wt = std::max(probs[r] * (1.0 - probs[r]), 1e-12);
            std::span<const double> row = x.row(r);
            for (std::size_t i = 0; i < f; ++i) {
                for (std::size_t j = 0; j <= i; ++j) h[i * n + j] += wt * row[i] * row[j];
                h[f * n + i] += wt * row[i];
            }
            h[f * n + f] += wt;
        }
        for (double& v : h) v /= static_cast<double>(rows);
        for (std::size_t j = 0; j < f; ++j) h[j * n + j] += lambda;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) h[i * n + j] = h[j * n + i];

        std::vector<double> step = solve_spd(std::move(h), grad, n);

        // Backtracking keeps Newton honest when the quadratic model is poor.
        double scale = 1.0;
        std::vector<double> trial(n);
        for (int half = 0; half < 30; ++half) {
            for (std::size_t j = 0; j < n; ++j) trial[j] = w[j] - scale * step[j];
            double trial_loss = loss_of(trial);
            if (trial_loss <= current_loss + 1e-15) {
                w = trial;
                current_loss = trial_loss;
                break;
            }
            scale *= 0.5;
        }
    }

    LinearModel m;
    m.weights.assign(w.begin(), w.begin() + static_cast<long>(f));
    m.intercept = w[f];
    return m;
}

KnnModel fit_knn(const Matrix& x, const std::vector<int>& y, const KnnParams& p) {
    return KnnModel{x, y, p.k};
}

int knn_votes(const KnnModel& m, std::span<const double> row) {
    const std::size_t n = m.train_x.rows;
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(m.k), n);
    // (distance^2, row index); index breaks exact distance ties.
    std::vector<std::pair<double, std::size_t>> d(n);
    for (std::size_t r = 0; r < n; ++r) {
        double s = 0.0;
        std::span<const double> t = m.train_x.row(r);
        for (std::size_t j = 0; j < row.size(); ++j) {
            double diff = row[j] - t[j];
            s += diff * diff;
        }
        d[r] = {s, r};
    }
    std::partial_sort(d.begin(), d.begin() + static_cast<long>(k), d.end());
    int votes = 0;
    for (std::size_t i = 0; i < k; ++i) votes += m.train_y[d[i].second];
    return votes;
}

}  // namespace

// ---------------------------------------------------------------------------
// CART trees and the forest
// ---------------------------------------------------------------------------

namespace detail {

namespace {

double impurity(SplitCriterion criterion, double pos, double total) {
    if (total == 0.0) return 0.0;
    double p = pos / total;
    if (criterion == SplitCriterion::kGini) return 2.0 * p * (1.0 - p);
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

struct GrowContext {
    const Matrix& x;
    const std::vector<int>& y;
    TreeGrowConfig config;
    Rng rng;
    std::vector<detail::TreeNodeSplit>* nodes;
    std::vector<int> feature_pool;
};

int grow_recursive(GrowContext& ctx, std::vector<std::size_t>& rows, int depth) {
    std::size_t pos = 0;
    for (std::size_t r : rows) pos += static_cast<std::size_t>(ctx.y[r]);
    const std::size_t total = rows.size();

    auto make_leaf = [&]() {
        detail::TreeNodeSplit leaf;
        leaf.leaf_label = pos * 2 > total ? 1 : 0;  // exact tie -> 0
        leaf.leaf_score = static_cast<double>(pos) / static_cast<double>(total);
        ctx.nodes->push_back(leaf);
        return static_cast<int>(ctx.nodes->size() - 1);
    };

    if (depth >= ctx.config.max_depth || pos == 0 || pos == total || total < 2)
        return make_leaf();

    // Candidate features: all, or a fresh random subset per split.
    std::span<const int> features;
    if (ctx.config.features_per_split > 0 &&
        ctx.config.features_per_split < static_cast<int>(ctx.x.cols)) {
        for (std::size_t i = 0; i < ctx.feature_pool.size(); ++i)
            ctx.feature_pool[i] = static_cast<int>(i);
        // Partial Fisher-Yates: the first features_per_split entries.
        for (int i = 0; i < ctx.config.features_per_split; ++i) {
            std::size_t j = i + ctx.rng.next_below(ctx.feature_pool.size() - i);
            std::swap(ctx.feature_pool[i], ctx.feature_pool[j]);
        }
        features = std::span<const int>(ctx.feature_pool.data(),
                                        static_cast<std::size_t>(ctx.config.features_per_split));
    } else {
        for (std::size_t i = 0; i < ctx.feature_pool.size(); ++i)
            ctx.feature_pool[i] = static_cast<int>(i);
        features = ctx.feature_pool;
    }

    const double parent_impurity = impurity(ctx.config.criterion, static_cast<double>(pos),
                                            static_cast<double>(total));
    int best_feature = -1;
    double best_threshold = 0.0;
    double best_score = std::numeric_limits<double>::infinity();

    std::vector<std::pair<double, int>> column(total);  // (value, label)
    for (int feature : features) {
        for (std::size_t i = 0; i < total; ++i)
            column[i] = {ctx.x(rows[i], static_cast<std::size_t>(feature)), ctx.y[rows[i]]};
        std::sort(column.begin(), column.end());
        double left_pos = 0.0;
        for (std::size_t i = 0; i + 1 < total; ++i) {
            left_pos += column[i].second;
            if (column[i].first == column[i + 1].first) continue;
            double left_n = static_cast<double>(i + 1);
            double right_n = static_cast<double>(total - i - 1);
            double right_pos = static_cast<double>(pos) - left_pos;
            double score = (left_n * impurity(ctx.config.criterion, left_pos, left_n) +
                            right_n * impurity(ctx.config.criterion, right_pos, right_n)) /
                           static_cast<double>(total);
            if (score < best_score) {
                best_score = score;
                best_feature = feature;
                best_threshold = column[i].first + 0.5 * (column[i + 1].first - column[i].first);
            }
        }
    }

    // Zero-gain splits are still taken while any valid threshold exists;
    // patterns like XOR need them to reach a pure depth below.
    if (best_feature < 0 || best_score > parent_impurity + 1e-12) return make_leaf();

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) {
        if (ctx.x(r, static_cast<std::size_t>(best_feature)) <= best_threshold)
            left.push_back(r);
        else
            right.push_back(r);
    }
    if (left.empty() || right.empty()) return make_leaf();
    rows.clear();
    rows.shrink_to_fit();

    detail::TreeNodeSplit split;
    split.feature = best_feature;
    split.threshold = best_threshold;
    split.leaf_score = static_cast<double>(pos) / static_cast<double>(total);
    ctx.nodes->push_back(split);
    int self = static_cast<int>(ctx.nodes->size() - 1);
    int left_id = grow_recursive(ctx, left, depth + 1);
    int right_id = grow_recursive(ctx, right, depth + 1);
    (*ctx.nodes)[self].left = left_id;
    (*ctx.nodes)[self].right = right_id;
    return self;
}

}  // namespace

int DecisionTree::predict_row(std::span<const double> row) const {
    int i = 0;
    while (nodes[i].feature >= 0)
        i = row[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold ? nodes[i].left
                                                                                  : nodes[i].right;
    return nodes[i].leaf_label;
}

double DecisionTree::score_row(std::span<const double> row) const {
    int i = 0;
    while (nodes[i].feature >= 0)
        i = row[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold ? nodes[i].left
                                                                                  : nodes[i].right;
    return nodes[i].leaf_score;
}

DecisionTree grow_tree(const Matrix& x, const std::vector<int>& y,
                       const std::vector<std::size_t>& rows, const TreeGrowConfig& config,
                       std::uint64_t feature_rng_seed) {
    DecisionTree tree;
    GrowContext ctx{x, y, config, Rng(feature_rng_seed), &tree.nodes,
                    std::vector<int>(x.cols)};
    std::vector<std::size_t> root_rows = rows;
    grow_recursive(ctx, root_rows, 0);
    return tree;
}

std::vector<std::size_t> bootstrap_rows(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = rng.next_below(n);
    return rows;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// fit / predict
// ---------------------------------------------------------------------------

TrainedModel fit(const ClassifierSpec& spec, const Matrix& x, const std::vector<int>& y,
                 std::uint64_t seed, int workers) {
    check_inputs(x, y, spec.family == ClassifierFamily::kKnn);

    auto impl = std::make_shared<TrainedModel::Impl>();
    impl->family = spec.family;
    impl->feature_count = x.cols;

    switch (spec.family) {
        case ClassifierFamily::kNaiveBayes:
            impl->model = fit_naive_bayes(x, y);
            break;
        case ClassifierFamily::kLinear: {
            LinearModel lin = fit_linear(x, y);
            lin.threshold = spec.as<LinearParams>().threshold;
            impl->model = std::move(lin);
            break;
        }
        case ClassifierFamily::kLogistic:
            impl->model = fit_logistic(x, y, spec.as<LogisticParams>());
            impl->logistic = true;
            break;
        case ClassifierFamily::kTree: {
            const TreeParams& p = spec.as<TreeParams>();
            std::vector<std::size_t> rows(x.rows);
            for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
            impl->model = detail::grow_tree(
                x, y, rows, {p.max_depth, p.criterion, 0}, derive_seed(seed, 0));
            break;
        }
        case ClassifierFamily::kForest: {
            const ForestParams& p = spec.as<ForestParams>();
            ForestModel forest;
            forest.trees.resize(static_cast<std::size_t>(p.n_trees));
            int per_split =
                std::max(1, static_cast<int>(std::sqrt(static_cast<double>(x.cols))));
            // Tree i depends only on (seed, i), so any worker count gives
            // the same forest.
            parallel_tasks(forest.trees.size(), workers, [&](std::size_t i) {
                std::uint64_t tree_seed = derive_seed(seed, i);
                std::vector<std::size_t> rows =
                    detail::bootstrap_rows(x.rows, derive_seed(tree_seed, 1));
                forest.trees[i] =
                    detail::grow_tree(x, y, rows, {p.max_depth, p.criterion, per_split},
                                      derive_seed(tree_seed, 2));
            });
            impl->model = std::move(forest);
            break;
        }
        case ClassifierFamily::kKnn:
            impl->model = fit_knn(x, y, spec.as<KnnParams>());
            break;
        case ClassifierFamily::kMlp:
            impl->model = fit_mlp(x, y, spec.as<MlpParams>(), seed);
            break;
    }
    return TrainedModel(std::move(impl));
}

std::vector<double> TrainedModel::predict_score(const Matrix& x) const {
    if (x.cols != feature_count_)
        throw std::invalid_argument("predict: expected " + std::to_string(feature_count_) +
                                    " features, got " + std::to_string(x.cols));
    std::vector<double> scores(x.rows);
    const Impl& impl = *impl_;

    if (const auto* nb = std::get_if<GaussianNb>(&impl.model)) {
        for (std::size_t r = 0; r < x.rows; ++r) {
            double l0 = nb_log_likelihood(*nb, 0, x.row(r));
            double l1 = nb_log_likelihood(*nb, 1, x.row(r));
            double m = std::max(l0, l1);
            scores[r] = std::exp(l1 - m) / (std::exp(l0 - m) + std::exp(l1 - m));
        }
    } else if (const auto* lin = std::get_if<LinearModel>(&impl.model)) {
        for (std::size_t r = 0; r < x.rows; ++r) {
            double z = lin->intercept;
            std::span<const double> row = x.row(r);
            for (std::size_t j = 0; j < row.size(); ++j) z += lin->weights[j] * row[j];
            scores[r] = impl.logistic ? sigmoid(z) : std::clamp(z, 0.0, 1.0);
        }
    } else if (const auto* tree = std::get_if<detail::DecisionTree>(&impl.model)) {
        for (std::size_t r = 0; r < x.rows; ++r) scores[r] = tree->score_row(x.row(r));
    } else if (const auto* forest = std::get_if<ForestModel>(&impl.model)) {
        for (std::size_t r = 0; r < x.rows; ++r) {
            int votes = 0;
            for (const auto& t : forest->trees) votes += t.predict_row(x.row(r));
            scores[r] = static_cast<double>(votes) / static_cast<double>(forest->trees.size());
        }
    } else if (const auto* knn = std::get_if<KnnModel>(&impl.model)) {
        for (std::size_t r = 0; r < x.rows; ++r) {
            int votes = knn_votes(*knn, x.row(r));
            std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(knn->k),
                                                  knn->train_x.rows);
            scores[r] = static_cast<double>(votes) / static_cast<double>(k);
        }
    } else if (const auto* mlp = std::get_if<MlpNet>(&impl.model)) {
        scores = mlp_scores(*mlp, x);
    }
    return scores;
}

std::vector<int> TrainedModel::predict(const Matrix& x) const {
    const Impl& impl = *impl_;

    // Count-vote families keep their documented tie rules instead of the
    // generic score >= 0.5 threshold.
    if (const auto* nb = std::get_if<GaussianNb>(&impl.model)) {
        if (x.cols != feature_count_)
            throw std::invalid_argument("predict: feature width mismatch");
        std::vector<int> out(x.rows);
        for (std::size_t r = 0; r < x.rows; ++r)
            out[r] = nb_log_likelihood(*nb, 1, x.row(r)) > nb_log_likelihood(*nb, 0, x.row(r));
        return out;
    }
    if (const auto* knn = std::get_if<KnnModel>(&impl.model)) {
        if (x.cols != feature_count_)
            throw std::invalid_argument("predict: feature width mismatch");
        std::vector<int> out(x.rows);
        std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(knn->k),
                                              knn->train_x.rows);
        for (std::size_t r = 0; r < x.rows; ++r)
            out[r] = knn_votes(*knn, x.row(r)) * 2 > static_cast<int>(k) ? 1 : 0;
        return out;
    }
    if (const auto* forest = std::get_if<ForestModel>(&impl.model)) {
        if (x.cols != feature_count_)
            throw std::invalid_argument("predict: feature width mismatch");
        std::vector<int> out(x.rows);
        for (std::size_t r = 0; r < x.rows; ++r) {
            int votes = 0;
            for (const auto& t : forest->trees) votes += t.predict_row(x.row(r));
            out[r] = votes * 2 > static_cast<int>(forest->trees.size()) ? 1 : 0;
        }
        return out;
    }
    if (const auto* tree = std::get_if<detail::DecisionTree>(&impl.model)) {
        if (x.cols != feature_count_)
            throw std::invalid_argument("predict: feature width mismatch");
        std::vector<int> out(x.rows);
        for (std::size_t r = 0; r < x.rows; ++r) out[r] = tree->predict_row(x.row(r));
        return out;
    }

    double threshold = 0.5;
    if (const auto* lin = std::get_if<LinearModel>(&impl.model); lin && !impl.logistic)
        threshold = lin->threshold;
    std::vector<double> scores = predict_score(x);
    std::vector<int> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= threshold ? 1 : 0;
    return out;
}

}  // namespace bugpred
