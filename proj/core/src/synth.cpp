#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "segbias/baseline.hpp"
#include "segbias/rng.hpp"

namespace segbias::baseline {
namespace {

void validate(const SynthConfig& config) {
    if (config.num_labels < 3) throw Error::input("synth: need at least 3 labels");
    if (config.feature_dim < 2) throw Error::input("synth: need at least 2 feature dimensions");
    if (config.videos < 1) throw Error::input("synth: need at least one video");
    if (config.segments_min < 1 || config.segments_max < config.segments_min)
        throw Error::input("synth: invalid segments-per-video range");
    if (config.duration_mean < 1.0 || config.duration_sigma < 0.0)
        throw Error::input("synth: invalid duration parameters");
    if (config.noise_sigma < 0.0 || config.class_separation <= 0.0)
        throw Error::input("synth: noise and separation must be non-negative");
    if (config.folds < 0 || config.folds > config.videos)
        throw Error::input("synth: fold count outside 0..videos");
    std::vector<bool> has_rule(config.num_labels, false);
    for (const auto& pair : config.dominant_pairs) {
        if (pair.prev < 1 || pair.prev >= config.num_labels || pair.next < 1 ||
            pair.next >= config.num_labels)
            throw Error::input("synth: dominant pair references labels outside 1..K-1");
        if (pair.prev == pair.next)
            throw Error::input("synth: dominant pair must use two distinct labels");
        if (pair.follow_prob < 0.0 || pair.follow_prob > 1.0)
            throw Error::input("synth: follow probability must be in [0, 1]");
        if (has_rule[pair.prev])
            throw Error::input("synth: multiple dominant pairs share the same initial action");
        has_rule[pair.prev] = true;
    }
}

/// K centroids from a seeded Gaussian cloud, rescaled so the minimum
/// pairwise distance equals class_separation. noise_sigma = 0 then makes
/// every frame exactly nearest its own class centroid.
std::vector<double> make_centroids(int K, int D, double separation, Rng& rng) {
    std::vector<double> centroids(static_cast<std::size_t>(K) * D);
    for (;;) {
        for (auto& v : centroids) v = rng.normal(0.0, 1.0);
        double min_dist = std::numeric_limits<double>::infinity();
        for (int a = 0; a < K; ++a) {
            for (int b = a + 1; b < K; ++b) {
                double sum = 0.0;
                for (int d = 0; d < D; ++d) {
                    double diff = centroids[a * D + d] - centroids[b * D + d];
                    sum += diff * diff;
                }
                min_dist = std::min(min_dist, std::sqrt(sum));
            }
        }
        if (min_dist > 1e-6) {
            double scale = separation / min_dist;
            for (auto& v : centroids) v *= scale;
            return centroids;
        }
        // Degenerate draw; try again.
    }
}

}  // namespace

SynthResult gen_synthetic(const SynthConfig& config) {
    validate(config);
    int K = config.num_labels;

    std::vector<LabelEntry> entries;
    entries.push_back({0, "background"});
    for (int i = 1; i < K; ++i) {
        char name[16];
        std::snprintf(name, sizeof(name), "act%02d", i);
        entries.push_back({static_cast<LabelId>(i), name});
    }
    LabelVocab vocab = LabelVocab::make(std::move(entries), 0);

    Rng master_rng(splitmix64(config.seed));
    std::vector<double> centroids =
        make_centroids(K, config.feature_dim, config.class_separation, master_rng);

    std::vector<int> rule_next(K, -1);
    std::vector<double> rule_prob(K, 0.0);
    for (const auto& pair : config.dominant_pairs) {
        rule_next[pair.prev] = pair.next;
        rule_prob[pair.prev] = pair.follow_prob;
    }

    SeedSpec seeds{config.seed};
    stats::PairHistogram planted;
    std::vector<VideoAnnotation> videos;
    videos.reserve(config.videos);
    int digits = config.videos > 9999 ? 6 : 4;

    for (int v = 0; v < config.videos; ++v) {
        char id[24];
        std::snprintf(id, sizeof(id), "synth%0*d", digits, v);
        Rng rng(seeds.sub_seed(id));

        auto segment_count = static_cast<int>(
            config.segments_min +
            rng.index(static_cast<std::uint64_t>(config.segments_max - config.segments_min + 1)));

        std::vector<LabelId> sequence;
        sequence.reserve(segment_count);
        LabelId current = static_cast<LabelId>(rng.index(K));
        sequence.push_back(current);
        for (int s = 1; s < segment_count; ++s) {
            LabelId next;
            if (rule_next[current] >= 0 && rng.unit() < rule_prob[current]) {
                next = static_cast<LabelId>(rule_next[current]);
            } else {
                // Uniform over the other labels, also skipping the dominant
                // follower when a rule applies so its share stays exact.
                std::vector<LabelId> pool;
                pool.reserve(K);
                for (LabelId l = 0; l < K; ++l) {
                    if (l == current) continue;
                    if (rule_next[current] >= 0 && l == rule_next[current]) continue;
                    pool.push_back(l);
                }
                next = pool[rng.index(pool.size())];
            }
            planted.add(current, next);
            sequence.push_back(next);
            current = next;
        }

        std::vector<LabelId> frame_labels;
        for (LabelId label : sequence) {
            double drawn = rng.normal(config.duration_mean, config.duration_sigma);
            auto duration = static_cast<std::int64_t>(std::llround(drawn));
            duration = std::max<std::int64_t>(1, duration);
            frame_labels.insert(frame_labels.end(), duration, label);
        }

        std::vector<double> values;
        values.reserve(frame_labels.size() * config.feature_dim);
        for (LabelId label : frame_labels) {
            for (int d = 0; d < config.feature_dim; ++d) {
                double value = centroids[label * config.feature_dim + d];
                if (config.noise_sigma > 0.0) value += rng.normal(0.0, config.noise_sigma);
                values.push_back(static_cast<double>(static_cast<float>(value)));
            }
        }
        auto features = std::make_shared<FeatureMatrix>(
            FeatureMatrix::make(static_cast<std::int64_t>(frame_labels.size()), config.feature_dim,
                                std::move(values), FeatureDType::f32));

        videos.push_back(
            VideoAnnotation::from_labels(id, std::move(frame_labels)).with_features(features));
    }

    std::vector<Split> splits;
    if (config.folds > 0) {
        splits.resize(config.folds);
        for (int f = 0; f < config.folds; ++f) splits[f].name = "split" + std::to_string(f + 1);
        for (int v = 0; v < config.videos; ++v) {
            int fold = v % config.folds;
            for (int f = 0; f < config.folds; ++f) {
                if (f == fold)
                    splits[f].test_ids.push_back(videos[v].video_id());
                else
                    splits[f].train_ids.push_back(videos[v].video_id());
            }
        }
    }

    SynthResult result{Dataset::make("synth", std::move(vocab), std::move(videos), std::move(splits)),
                       std::move(planted)};
    return result;
}

}  // namespace segbias::baseline
