#include <benchmark/benchmark.h>

#include "segbias/baseline.hpp"
#include "segbias/ingest.hpp"
#include "segbias/manipulate.hpp"
#include "segbias/metrics.hpp"
#include "segbias/rng.hpp"
#include "segbias/stats.hpp"

using namespace segbias;

namespace {

std::vector<LabelId> random_labels(std::uint64_t seed, int k, std::int64_t frames) {
    Rng rng(seed);
    std::vector<LabelId> labels(frames);
    LabelId current = 0;
    std::int64_t remaining = 0;
    for (auto& label : labels) {
        if (remaining == 0) {
            current = static_cast<LabelId>(rng.index(k));
            remaining = 1 + static_cast<std::int64_t>(rng.index(40));
        }
        label = current;
        --remaining;
    }
    return labels;
}

Dataset bench_dataset(int videos, std::int64_t frames, bool features) {
    baseline::SynthConfig config;
    config.num_labels = 12;
    config.videos = videos;
    config.segments_min = 15;
    config.segments_max = 25;
    config.duration_mean = static_cast<double>(frames) / 20.0;
    config.duration_sigma = 2.0;
    config.feature_dim = features ? 64 : 2;
    config.class_separation = 4.0;
    config.noise_sigma = 0.5;
    config.seed = 1234;
    config.folds = 0;
    return baseline::gen_synthetic(config).dataset;
}

void SegmentsOf(benchmark::State& state) {
    auto labels = random_labels(1, 12, state.range(0));
    for (auto _ : state) {
        auto segments = segments_of(labels);
        benchmark::DoNotOptimize(segments);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(SegmentsOf)->Range(1 << 10, 1 << 18);

void EditScore(benchmark::State& state) {
    auto gt = random_labels(2, 12, state.range(0));
    auto pred = random_labels(3, 12, state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(metrics::edit_score(pred, gt));
}
BENCHMARK(EditScore)->Range(1 << 10, 1 << 16);

void F1AtK(benchmark::State& state) {
    auto gt = random_labels(4, 12, state.range(0));
    auto pred = random_labels(5, 12, state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(metrics::f1_at_k(pred, gt, 25));
}
BENCHMARK(F1AtK)->Range(1 << 10, 1 << 16);

void BigramCounts(benchmark::State& state) {
    auto dataset = bench_dataset(static_cast<int>(state.range(0)), 400, false);
    for (auto _ : state) {
        auto hist = stats::bigram_counts(dataset);
        benchmark::DoNotOptimize(hist);
    }
}
BENCHMARK(BigramCounts)->Range(8, 256);

void ShuffleSequences(benchmark::State& state) {
    auto dataset = bench_dataset(static_cast<int>(state.range(0)), 400, true);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto result = manipulate::shuffle_sequences(dataset, SeedSpec{seed++});
        benchmark::DoNotOptimize(result);
    }
}
BENCHMARK(ShuffleSequences)->Range(8, 64);

void NpyRoundTrip(benchmark::State& state) {
    Rng rng(6);
    std::int64_t rows = state.range(0);
    std::vector<double> values(rows * 64);
    for (auto& v : values) v = static_cast<double>(static_cast<float>(rng.normal(0, 1)));
    auto matrix = FeatureMatrix::make(rows, 64, std::move(values));
    for (auto _ : state) {
        auto bytes = ingest::write_feature_file(matrix, ingest::FeatureOrientation::dims_by_frames);
        auto back = ingest::parse_feature_file(bytes, ingest::FeatureOrientation::dims_by_frames);
        benchmark::DoNotOptimize(back);
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(rows) * 64 * 4);
}
BENCHMARK(NpyRoundTrip)->Range(1 << 8, 1 << 13);

void HybridPredict(benchmark::State& state) {
    auto dataset = bench_dataset(32, 400, true);
    auto markov = baseline::fit_markov(dataset);
    auto centroid = baseline::fit_centroid(dataset);
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& video = dataset.videos()[i++ % dataset.videos().size()];
        auto pred = baseline::predict_hybrid(markov, centroid, 0.7, video.features(),
                                             video.segments());
        benchmark::DoNotOptimize(pred);
    }
}
BENCHMARK(HybridPredict);

}  // namespace

BENCHMARK_MAIN();
