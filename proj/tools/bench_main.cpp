// Compares the serial reference path (workers=1) against the OpenMP path on
// the two task-parallel workloads: forest training and the embedding grid.
// Outputs must match exactly; only wall time may differ.

#include <chrono>
#include <cstdio>
#include <vector>

#include "bugpred/classifiers.hpp"
#include "bugpred/eval.hpp"
#include "bugpred/parallel.hpp"
#include "bugpred/rng.hpp"

using namespace bugpred;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void bench_forest(int workers) {
    Rng rng(2024);
    const std::size_t n = 6000, f = 24;
    Matrix x(n, f);
    std::vector<int> y(n);
    for (std::size_t r = 0; r < n; ++r) {
        y[r] = static_cast<int>(r % 2);
        double mu = y[r] ? 0.8 : -0.8;
        for (std::size_t c = 0; c < f; ++c) x(r, c) = mu + rng.next_in(-2.0, 2.0);
    }
    ClassifierSpec spec = ClassifierSpec::defaults(ClassifierFamily::kForest);

    auto t0 = std::chrono::steady_clock::now();
    TrainedModel serial = fit(spec, x, y, 99, 1);
    double serial_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    TrainedModel parallel = fit(spec, x, y, 99, workers);
    double parallel_s = seconds_since(t0);

    bool same = serial.predict_score(x) == parallel.predict_score(x);
    std::printf("forest (100 trees, n=%zu, f=%zu)\n", n, f);
    std::printf("  serial    %7.3f s\n", serial_s);
    std::printf("  %2d workers %6.3f s   speedup %.2fx   identical: %s\n", workers, parallel_s,
                serial_s / parallel_s, same ? "yes" : "NO");
}

void bench_grid(int workers) {
    SynthCorpus s = synth_corpus(40, 30, std::vector<int>{26, 27, 28}, 1.0, 11);
    GridSpec grid;
    grid.methods = {Doc2VecMethod::kPvDm, Doc2VecMethod::kPvDbow};
    grid.dims = {16};
    grid.windows = {4};
    grid.epochs = {10, 20, 30};
    grid.classifiers = {ClassifierSpec::defaults(ClassifierFamily::kLogistic),
                        ClassifierSpec::defaults(ClassifierFamily::kTree)};
    grid.modes = {FeatureMode::kEmbedding};
    grid.k_folds = 5;

    auto t0 = std::chrono::steady_clock::now();
    auto serial = grid_run(s.docs, grid, s.labels, nullptr, 7, 1);
    double serial_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    auto parallel = grid_run(s.docs, grid, s.labels, nullptr, 7, workers);
    double parallel_s = seconds_since(t0);

    bool same = serial.size() == parallel.size();
    for (std::size_t i = 0; same && i < serial.size(); ++i)
        same = serial[i].descriptor.key() == parallel[i].descriptor.key() &&
               serial[i].report->mean_f == parallel[i].report->mean_f;
    std::printf("grid (%zu embedding configs x %zu classifiers)\n",
                grid.embedding_config_count(), grid.classifiers.size());
    std::printf("  serial    %7.3f s\n", serial_s);
    std::printf("  %2d workers %6.3f s   speedup %.2fx   identical: %s\n", workers, parallel_s,
                serial_s / parallel_s, same ? "yes" : "NO");
}

}  // namespace

int main() {
    int workers = default_workers();
    std::printf("available workers: %d\n\n", workers);
    bench_forest(workers);
    std::printf("\n");
    bench_grid(workers);
    return 0;
}
