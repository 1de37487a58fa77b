#include "bugpred/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bugpred/rng.hpp"

namespace bugpred {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct LayerView {
    const double* w;  // in x out, row-major
    const double* b;  // out
    int in, out;
};

std::vector<LayerView> layer_views(const MlpNet& net) {
    std::vector<LayerView> views;
    const double* p = net.params.data();
    for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
        LayerView v;
        v.in = net.layer_sizes[l];
        v.out = net.layer_sizes[l + 1];
        v.w = p;
        p += static_cast<std::size_t>(v.in) * v.out;
        v.b = p;
        p += v.out;
        views.push_back(v);
    }
    return views;
}

// Forward pass for one row; activations[l] holds layer l's output.
double forward_row(const std::vector<LayerView>& layers, std::span<const double> row,
                   std::vector<std::vector<double>>* activations) {
    std::vector<double> current(row.begin(), row.end());
    if (activations) (*activations)[0] = current;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const LayerView& lv = layers[l];
        std::vector<double> next(static_cast<std::size_t>(lv.out));
        for (int o = 0; o < lv.out; ++o) {
            double z = lv.b[o];
            for (int i = 0; i < lv.in; ++i) z += lv.w[i * lv.out + o] * current[i];
            next[o] = l + 1 == layers.size() ? z : std::max(z, 0.0);  // linear output, ReLU hidden
        }
        current = std::move(next);
        if (activations) (*activations)[l + 1] = current;
    }
    return current[0];  // pre-sigmoid logit
}

}  // namespace

std::size_t MlpNet::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l)
        n += static_cast<std::size_t>(layer_sizes[l]) * layer_sizes[l + 1] + layer_sizes[l + 1];
    return n;
}

MlpNet MlpNet::init(int inputs, int hidden_layers, int hidden_units, std::uint64_t seed) {
    MlpNet net;
    net.layer_sizes.push_back(inputs);
    for (int l = 0; l < hidden_layers; ++l) net.layer_sizes.push_back(hidden_units);
    net.layer_sizes.push_back(1);
    net.params.assign(net.param_count(), 0.0);

    // Glorot-uniform weights, zero biases.
    Rng rng(seed);
    double* p = net.params.data();
    for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
        int in = net.layer_sizes[l];
        int out = net.layer_sizes[l + 1];
        double bound = std::sqrt(6.0 / (in + out));
        for (int i = 0; i < in * out; ++i) *p++ = rng.next_in(-bound, bound);
        p += out;  // biases stay zero
    }
    return net;
}

double mlp_loss_and_gradient(const MlpNet& net, const Matrix& x, const std::vector<int>& y,
                             std::span<const std::size_t> rows, double l2_beta,
                             std::vector<double>* grad) {
    const std::vector<LayerView> layers = layer_views(net);
    const std::size_t n = rows.size();
    if (grad) grad->assign(net.params.size(), 0.0);

    double loss = 0.0;
    std::vector<std::vector<double>> activations(net.layer_sizes.size());
    std::vector<double> delta, prev_delta;

    for (std::size_t ri = 0; ri < n; ++ri) {
        std::size_t r = rows[ri];
        double z = forward_row(layers, x.row(r), grad ? &activations : nullptr);
        double label = static_cast<double>(y[r]);
        loss += std::max(z, 0.0) - label * z + std::log1p(std::exp(-std::abs(z)));
        if (!grad) continue;

        // Backprop; dL/dz at the sigmoid output is (s - y) / n.
        delta.assign(1, (sigmoid(z) - label) / static_cast<double>(n));
        double* gp = grad->data() + net.params.size();
        for (std::size_t l = layers.size(); l > 0; --l) {
            const LayerView& lv = layers[l - 1];
            gp -= lv.out;  // bias block
            double* gb = gp;
            gp -= static_cast<std::size_t>(lv.in) * lv.out;  // weight block
            double* gw = gp;
            const std::vector<double>& input = activations[l - 1];

            for (int o = 0; o < lv.out; ++o) gb[o] += delta[o];
            for (int i = 0; i < lv.in; ++i) {
                double a = input[i];
                if (a != 0.0)
                    for (int o = 0; o < lv.out; ++o) gw[i * lv.out + o] += a * delta[o];
            }
            if (l == 1) break;
            prev_delta.assign(static_cast<std::size_t>(lv.in), 0.0);
            for (int i = 0; i < lv.in; ++i) {
                if (input[i] <= 0.0) continue;  // ReLU gate
                double s = 0.0;
                for (int o = 0; o < lv.out; ++o) s += lv.w[i * lv.out + o] * delta[o];
                prev_delta[i] = s;
            }
            delta = prev_delta;
        }
    }
    loss /= static_cast<double>(n);

    if (l2_beta > 0.0) {
        const double* p = net.params.data();
        double* gp = grad ? grad->data() : nullptr;
        for (const LayerView& lv : layers) {
            std::size_t w_count = static_cast<std::size_t>(lv.in) * lv.out;
            std::size_t offset = static_cast<std::size_t>(lv.w - net.params.data());
            for (std::size_t i = 0; i < w_count; ++i) {
                loss += l2_beta * p[offset + i] * p[offset + i];
                if (gp) gp[offset + i] += 2.0 * l2_beta * p[offset + i];
            }
        }
    }
    return loss;
}

std::vector<double> mlp_scores(const MlpNet& net, const Matrix& x) {
    const std::vector<LayerView> layers = layer_views(net);
    std::vector<double> out(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r)
        out[r] = sigmoid(forward_row(layers, x.row(r), nullptr));
    return out;
}

namespace {

double f_score_binary(const std::vector<int>& truth, const std::vector<int>& pred) {
    long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (pred[i] == 1 && truth[i] == 1) ++tp;
        if (pred[i] == 1 && truth[i] == 0) ++fp;
        if (pred[i] == 0 && truth[i] == 1) ++fn;
    }
    double p = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
    double r = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

}  // namespace

MlpNet fit_mlp(const Matrix& x, const std::vector<int>& y, const MlpParams& params,
               std::uint64_t seed) {
    MlpNet net = MlpNet::init(static_cast<int>(x.cols), params.hidden_layers,
                              params.hidden_units, derive_seed(seed, 0x6d6c70));

    // Early stopping holds out a stratified, seeded slice of the training
    // rows and tracks its F-score.
    std::vector<std::size_t> train_rows, val_rows;
    if (params.early_stopping) {
        std::vector<std::size_t> pos, neg;
        for (std::size_t i = 0; i < y.size(); ++i) (y[i] ? pos : neg).push_back(i);
        Rng rng(derive_seed(seed, 0x76616c));
        shuffle(pos, rng);
        shuffle(neg, rng);
        auto take = [&](std::vector<std::size_t>& from) {
            std::size_t n_val = static_cast<std::size_t>(
                std::max(1.0, std::floor(params.validation_fraction *
                                         static_cast<double>(from.size()))));
            n_val = std::min(n_val, from.size() > 1 ? from.size() - 1 : std::size_t{0});
            for (std::size_t i = 0; i < from.size(); ++i)
                (i < n_val ? val_rows : train_rows).push_back(from[i]);
        };
        take(pos);
        take(neg);
        std::sort(train_rows.begin(), train_rows.end());
        std::sort(val_rows.begin(), val_rows.end());
    } else {
        train_rows.resize(x.rows);
        for (std::size_t i = 0; i < x.rows; ++i) train_rows[i] = i;
    }

    std::vector<double> accum(net.params.size(), 0.0);  // AdaGrad accumulators
    std::vector<double> grad;
    Rng shuffle_rng(derive_seed(seed, 0x626174));
    const double eps = 1e-8;
    const int epoch_cap = params.early_stopping ? params.max_epochs : params.epochs;

    std::vector<double> best_params = net.params;
    double best_f = -1.0;
    int since_best = 0;

    std::vector<std::size_t> order = train_rows;
    std::vector<std::size_t> batch;
    std::vector<int> val_truth;
    Matrix val_x;
    if (params.early_stopping) {
        val_x = Matrix(val_rows.size(), x.cols);
        for (std::size_t i = 0; i < val_rows.size(); ++i) {
            std::copy_n(x.row(val_rows[i]).data(), x.cols, val_x.row(i).data());
            val_truth.push_back(y[val_rows[i]]);
        }
    }

    for (int epoch = 0; epoch < epoch_cap; ++epoch) {
        shuffle(order, shuffle_rng);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(params.batch_size)) {
            std::size_t end = std::min(order.size(),
                                       start + static_cast<std::size_t>(params.batch_size));
            batch.assign(order.begin() + static_cast<long>(start),
                         order.begin() + static_cast<long>(end));
            mlp_loss_and_gradient(net, x, y, batch, params.l2_beta, &grad);
            for (std::size_t i = 0; i < net.params.size(); ++i) {
                accum[i] += grad[i] * grad[i];
                net.params[i] -= params.learning_rate * grad[i] / (std::sqrt(accum[i]) + eps);
            }
        }
        if (params.early_stopping) {
            std::vector<double> scores = mlp_scores(net, val_x);
            std::vector<int> pred(scores.size());
            for (std::size_t i = 0; i < scores.size(); ++i) pred[i] = scores[i] >= 0.5 ? 1 : 0;
            double f = f_score_binary(val_truth, pred);
            if (f > best_f) {
                best_f = f;
                best_params = net.params;
                since_best = 0;
            } else if (++since_best >= params.patience) {
                break;
            }
        }
    }
    if (params.early_stopping) net.params = std::move(best_params);
    return net;
}

}  // namespace bugpred
