#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "segbias/stats.hpp"
#include "segbias/types.hpp"

namespace segbias::baseline {

/// Segment-level label chain with add-one smoothing: an explicit model of
/// the ordinal-only shortcut (predict the usual follower, ignore the video).
struct MarkovModel {
    int num_labels = 0;
    std::vector<double> transition;     // K*K row-major, rows sum to 1
    std::vector<double> initial;        // first-segment label distribution
    std::vector<double> mean_duration;  // per-label mean segment length, frames
    std::uint64_t vocab_hash = 0;

    double prob(LabelId from, LabelId to) const { return transition[from * num_labels + to]; }
};

/// Per-label mean feature vector: the visual-only contrast model.
struct CentroidModel {
    int num_labels = 0;
    int dims = 0;
    std::vector<double> centroids;  // K*D row-major
    std::vector<bool> present;      // labels with zero training frames are absent
    std::uint64_t vocab_hash = 0;

    std::span<const double> centroid(LabelId label) const {
        return {centroids.data() + static_cast<std::size_t>(label) * dims,
                static_cast<std::size_t>(dims)};
    }
};

/// (count + 1) / (total + len) over one count row.
std::vector<double> add_one_smooth(std::span<const std::int64_t> counts);

MarkovModel fit_markov(const Dataset& train);
CentroidModel fit_centroid(const Dataset& train);

enum class FirstLabelMode { from_initial, ground_truth };

/// Labels each ground-truth segment by argmax transition from the previous
/// *predicted* label (teacher-forced positions, free-running labels). Ties
/// break toward the lowest label id.
std::vector<LabelId> predict_ordinal(const MarkovModel& model,
                                     std::span<const Segment> gt_segments,
                                     FirstLabelMode first = FirstLabelMode::from_initial);

/// Per-frame nearest centroid.
std::vector<LabelId> predict_visual(const CentroidModel& model, const FeatureMatrix& features);

/// Per-segment argmax of the mean negative distance to each centroid.
std::vector<LabelId> predict_visual_segment_voted(const CentroidModel& model,
                                                  const FeatureMatrix& features,
                                                  std::span<const Segment> boundaries);

/// Per-segment argmax of alpha * log P(label | prev) + (1 - alpha) * visual
/// score. alpha = 1 reduces to predict_ordinal, alpha = 0 to the
/// segment-voted visual predictor, bitwise.
std::vector<LabelId> predict_hybrid(const MarkovModel& markov, const CentroidModel& centroid,
                                    double alpha, const FeatureMatrix& features,
                                    std::span<const Segment> boundaries,
                                    FirstLabelMode first = FirstLabelMode::from_initial);

std::string models_to_json(const MarkovModel* markov, const CentroidModel* centroid,
                           const LabelVocab& vocab, std::uint64_t master_seed,
                           std::uint64_t input_hash);

struct LoadedModels {
    bool has_markov = false;
    bool has_centroid = false;
    MarkovModel markov;
    CentroidModel centroid;
};

LoadedModels models_from_json(const std::string& text, const LabelVocab& vocab);

/// Controlled-bias synthetic data: a Markov walk over labels where each
/// dominant pair (a, b, p) forces b after a with probability p, durations
/// from a truncated normal, and features at a per-label centroid plus noise.
struct DominantPairSpec {
    LabelId prev = 0;
    LabelId next = 0;
    double follow_prob = 0.0;
};

struct SynthConfig {
    int num_labels = 8;  // label 0 is the background / "no action" class
    int videos = 100;
    int segments_min = 8;
    int segments_max = 16;
    double duration_mean = 20.0;
    double duration_sigma = 4.0;
    std::vector<DominantPairSpec> dominant_pairs;
    int feature_dim = 8;
    double class_separation = 4.0;  // min pairwise centroid distance
    double noise_sigma = 0.5;
    std::uint64_t seed = 1;
    int folds = 4;  // round-robin test folds; 0 disables splits
};

struct SynthResult {
    Dataset dataset;
    stats::PairHistogram planted;  // generator bookkeeping: true pair counts
};

SynthResult gen_synthetic(const SynthConfig& config);

}  // namespace segbias::baseline
