#include "segbias/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "segbias/parallel.hpp"

namespace segbias::metrics {
namespace {

std::vector<Segment> scored_segments(std::span<const LabelId> labels, const EvalOptions& options) {
    auto segments = segments_of(labels);
    if (options.include_background) return segments;
    if (!options.background_id)
        throw Error::input("excluding background requires a background label");
    std::erase_if(segments, [&](const Segment& s) { return s.label == *options.background_id; });
    return segments;
}

std::size_t levenshtein(std::span<const Segment> a, std::span<const Segment> b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diagonal = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t saved = row[j];
            if (a[i - 1].label == b[j - 1].label)
                row[j] = diagonal;
            else
                row[j] = 1 + std::min({row[j], row[j - 1], diagonal});
            diagonal = saved;
        }
    }
    return row[b.size()];
}

double interval_iou(const Segment& a, const Segment& b) {
    std::int64_t intersection =
        std::max<std::int64_t>(0, std::min(a.end, b.end) - std::max(a.start, b.start));
    std::int64_t union_len = std::max(a.end, b.end) - std::min(a.start, b.start);
    return union_len > 0 ? static_cast<double>(intersection) / static_cast<double>(union_len) : 0.0;
}

void check_lengths(std::span<const LabelId> pred, std::span<const LabelId> gt) {
    if (pred.size() != gt.size())
        throw Error::input("length mismatch: prediction has " + std::to_string(pred.size()) +
                           " frames, ground truth " + std::to_string(gt.size()));
    if (pred.empty()) throw Error::input("empty label sequence");
}

}  // namespace

double frame_accuracy(std::span<const LabelId> pred, std::span<const LabelId> gt,
                      const EvalOptions& options) {
    check_lengths(pred, gt);
    std::int64_t correct = 0, scored = 0;
    for (std::size_t t = 0; t < gt.size(); ++t) {
        if (!options.include_background) {
            if (!options.background_id)
                throw Error::input("excluding background requires a background label");
            if (gt[t] == *options.background_id) continue;
        }
        ++scored;
        if (pred[t] == gt[t]) ++correct;
    }
    if (scored == 0) throw Error::input("no frames left to score after excluding background");
    return 100.0 * static_cast<double>(correct) / static_cast<double>(scored);
}

double edit_score(std::span<const LabelId> pred, std::span<const LabelId> gt,
                  const EvalOptions& options) {
    check_lengths(pred, gt);
    auto pred_segments = scored_segments(pred, options);
    auto gt_segments = scored_segments(gt, options);
    if (pred_segments.empty() && gt_segments.empty()) return 100.0;
    std::size_t longest = std::max(pred_segments.size(), gt_segments.size());
    double score = 100.0 * (1.0 - static_cast<double>(levenshtein(pred_segments, gt_segments)) /
                                      static_cast<double>(longest));
    return std::clamp(score, 0.0, 100.0);
}

double f1_at_k(std::span<const LabelId> pred, std::span<const LabelId> gt, int k,
               const EvalOptions& options) {
    if (k < 1 || k > 100) throw Error::input("F1 threshold must be in 1..100");
    check_lengths(pred, gt);
    auto pred_segments = scored_segments(pred, options);
    auto gt_segments = scored_segments(gt, options);
    if (pred_segments.empty() && gt_segments.empty()) return 100.0;

    double threshold = static_cast<double>(k) / 100.0;
    std::vector<bool> matched(gt_segments.size(), false);
    std::int64_t tp = 0, fp = 0;
    for (const Segment& p : pred_segments) {
        double best_iou = -1.0;
        std::size_t best = gt_segments.size();
        for (std::size_t j = 0; j < gt_segments.size(); ++j) {
            if (gt_segments[j].label != p.label) continue;
            double iou = interval_iou(p, gt_segments[j]);
            if (iou > best_iou) {
                best_iou = iou;
                best = j;
            }
        }
        if (best != gt_segments.size() && best_iou >= threshold && !matched[best]) {
            matched[best] = true;
            ++tp;
        } else {
            ++fp;
        }
    }
    std::int64_t fn = static_cast<std::int64_t>(gt_segments.size()) - tp;
    if (2 * tp + fp + fn == 0) return 100.0;
    return 100.0 * 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

EvalReport evaluate(const Dataset& gt, const ingest::PredictionSet& predictions,
                    const EvalOptions& options, std::optional<std::string> fold, int threads) {
    std::vector<std::pair<std::string, std::span<const LabelId>>> entries;
    for (const auto& [video_id, labels] : predictions.labels)
        entries.emplace_back(video_id, std::span<const LabelId>(labels));

    std::vector<std::pair<std::string, VideoMetrics>> scored(entries.size());
    parallel_for(entries.size(), threads, [&](std::size_t i) {
        const auto& [video_id, pred] = entries[i];
        const VideoAnnotation* video = gt.find(video_id);
        if (!video) throw Error::input("prediction for unknown video '" + video_id + "'");
        VideoMetrics m;
        m.accuracy = frame_accuracy(pred, video->frame_labels(), options);
        m.edit = edit_score(pred, video->frame_labels(), options);
        for (int k : options.f1_thresholds) m.f1[k] = f1_at_k(pred, video->frame_labels(), k, options);
        m.frames = video->frames();
        scored[i] = {video_id, std::move(m)};
    });

    EvalReport report;
    report.fold = std::move(fold);
    for (auto& [video_id, m] : scored) report.per_video.emplace(std::move(video_id), std::move(m));
    if (!report.per_video.empty()) {
        VideoMetrics& agg = report.aggregate;
        for (int k : options.f1_thresholds) agg.f1[k] = 0.0;
        for (const auto& [id, m] : report.per_video) {
            agg.accuracy += m.accuracy;
            agg.edit += m.edit;
            for (const auto& [k, v] : m.f1) agg.f1[k] += v;
            agg.frames += m.frames;
        }
        auto n = static_cast<double>(report.per_video.size());
        agg.accuracy /= n;
        agg.edit /= n;
        for (auto& [k, v] : agg.f1) v /= n;
    }
    return report;
}

EvalReport cv_aggregate(std::span<const EvalReport> folds) {
    if (folds.empty()) throw Error::input("cv_aggregate needs at least one fold report");
    EvalReport out;
    out.fold = "cv-mean";
    VideoMetrics& agg = out.aggregate;
    for (const auto& fold : folds) {
        agg.accuracy += fold.aggregate.accuracy;
        agg.edit += fold.aggregate.edit;
        for (const auto& [k, v] : fold.aggregate.f1) agg.f1[k] += v;
        agg.frames += fold.aggregate.frames;
    }
    auto n = static_cast<double>(folds.size());
    agg.accuracy /= n;
    agg.edit /= n;
    for (auto& [k, v] : agg.f1) v /= n;
    return out;
}

MaskedRegionReport masked_region_report(std::span<const LabelId> pred,
                                        std::span<const LabelId> original_gt,
                                        std::span<const LabelId> masked_gt,
                                        const manipulate::ManipulationRecord& record,
                                        LabelId background) {
    if (pred.size() != original_gt.size() || pred.size() != masked_gt.size())
        throw Error::input("masked-region report: sequences for '" + record.video_id +
                           "' have different lengths");
    MaskedRegionReport report;
    for (const auto& affected : record.affected) {
        const Segment& seg = affected.original;
        if (seg.start < 0 || seg.end > static_cast<std::int64_t>(pred.size()))
            throw Error::input("record interval outside video '" + record.video_id + "'");
        MaskedBucket bucket;
        for (std::int64_t t = seg.start; t < seg.end; ++t) {
            bucket.frames_total += 1;
            if (pred[t] == background)
                bucket.predicted_no_action += 1;
            else if (pred[t] == original_gt[t])
                bucket.predicted_original_label += 1;
            else
                bucket.predicted_other += 1;
        }
        report.aggregate.frames_total += bucket.frames_total;
        report.aggregate.predicted_no_action += bucket.predicted_no_action;
        report.aggregate.predicted_original_label += bucket.predicted_original_label;
        report.aggregate.predicted_other += bucket.predicted_other;
        report.per_interval.emplace_back(seg, bucket);
    }
    return report;
}

std::vector<std::int64_t> label_distribution(std::span<const LabelId> labels, int num_labels) {
    std::vector<std::int64_t> hist(num_labels, 0);
    for (LabelId label : labels) {
        if (label < 0 || label >= num_labels)
            throw Error::input("label id " + std::to_string(label) + " outside histogram range");
        hist[label] += 1;
    }
    return hist;
}

std::vector<std::int64_t> label_distribution(const Dataset& dataset) {
    std::vector<std::int64_t> hist(dataset.vocab().size(), 0);
    for (const auto& video : dataset.videos())
        for (LabelId label : video.frame_labels()) hist[label] += 1;
    return hist;
}

double distribution_distance(std::span<const std::int64_t> h1, std::span<const std::int64_t> h2) {
    if (h1.size() != h2.size())
        throw Error::input("distribution distance over different vocabularies");
    std::int64_t t1 = 0, t2 = 0;
    for (auto v : h1) t1 += v;
    for (auto v : h2) t2 += v;
    if (t1 == 0 || t2 == 0) throw Error::input("distribution distance of an empty histogram");
    double distance = 0.0;
    for (std::size_t i = 0; i < h1.size(); ++i)
        distance += std::abs(static_cast<double>(h1[i]) / t1 - static_cast<double>(h2[i]) / t2);
    return distance / 2.0;
}

}  // namespace segbias::metrics
