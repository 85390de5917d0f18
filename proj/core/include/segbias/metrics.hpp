#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segbias/ingest.hpp"
#include "segbias/manipulate.hpp"
#include "segbias/types.hpp"

namespace segbias::metrics {

/// Whether background segments/frames participate in scoring. Conventions
/// differ across datasets, so this is a flag rather than a rule.
struct EvalOptions {
    bool include_background = true;
    std::optional<LabelId> background_id;  // required only when excluding
    std::vector<int> f1_thresholds = {10, 25, 50};
};

double frame_accuracy(std::span<const LabelId> pred, std::span<const LabelId> gt,
                      const EvalOptions& options = {});

/// 100 * (1 - Levenshtein(pred segment labels, gt segment labels) / max len).
double edit_score(std::span<const LabelId> pred, std::span<const LabelId> gt,
                  const EvalOptions& options = {});

/// Segmental F1: a predicted segment is a true positive when its best-IoU
/// same-label ground-truth segment reaches IoU >= k/100 and is not already
/// matched; unmatched ground-truth segments are false negatives.
double f1_at_k(std::span<const LabelId> pred, std::span<const LabelId> gt, int k,
               const EvalOptions& options = {});

struct VideoMetrics {
    double accuracy = 0.0;
    double edit = 0.0;
    std::map<int, double> f1;  // threshold -> score
    std::int64_t frames = 0;
};

struct EvalReport {
    std::map<std::string, VideoMetrics> per_video;
    VideoMetrics aggregate;  // unweighted mean over evaluated videos
    std::optional<std::string> fold;
};

/// Scores every predicted video against its ground truth. Videos without a
/// prediction are skipped (they stay listed in the PredictionSet).
EvalReport evaluate(const Dataset& gt, const ingest::PredictionSet& predictions,
                    const EvalOptions& options = {},
                    std::optional<std::string> fold = std::nullopt, int threads = 1);

/// Unweighted mean of each metric across folds.
EvalReport cv_aggregate(std::span<const EvalReport> folds);

/// Partition of masked-interval frames by what the model predicted there.
/// predicted_original_label is the ordinal-bias signature: the pre-mask
/// label resurfacing without visual support.
struct MaskedBucket {
    std::int64_t frames_total = 0;
    std::int64_t predicted_no_action = 0;
    std::int64_t predicted_original_label = 0;
    std::int64_t predicted_other = 0;
};

struct MaskedRegionReport {
    std::vector<std::pair<Segment, MaskedBucket>> per_interval;  // Segment = original
    MaskedBucket aggregate;
};

MaskedRegionReport masked_region_report(std::span<const LabelId> pred,
                                        std::span<const LabelId> original_gt,
                                        std::span<const LabelId> masked_gt,
                                        const manipulate::ManipulationRecord& record,
                                        LabelId background);

/// Per-label frame counts over the vocabulary.
std::vector<std::int64_t> label_distribution(std::span<const LabelId> labels, int num_labels);
std::vector<std::int64_t> label_distribution(const Dataset& dataset);

/// Total-variation distance between two normalized histograms, in [0, 1].
double distribution_distance(std::span<const std::int64_t> h1, std::span<const std::int64_t> h2);

}  // namespace segbias::metrics
