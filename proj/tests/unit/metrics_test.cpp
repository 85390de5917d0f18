#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "segbias/metrics.hpp"
#include "test_util.hpp"

using namespace segbias;
using namespace segbias::metrics;

namespace {

/// Textbook recursive Levenshtein with memoization over the full (i, j)
/// table. Independent of the rolling-row implementation under test.
std::size_t lev_oracle(const std::vector<LabelId>& a, const std::vector<LabelId>& b) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
    std::function<std::size_t(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t j) {
        if (i == 0) return j;
        if (j == 0) return i;
        auto key = std::make_pair(i, j);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        std::size_t result;
        if (a[i - 1] == b[j - 1]) {
            result = rec(i - 1, j - 1);
        } else {
            result = 1 + std::min({rec(i - 1, j), rec(i, j - 1), rec(i - 1, j - 1)});
        }
        memo[key] = result;
        return result;
    };
    return rec(a.size(), b.size());
}

std::vector<LabelId> segment_labels(std::span<const LabelId> frames) {
    std::vector<LabelId> labels;
    for (const auto& seg : segments_of(frames)) labels.push_back(seg.label);
    return labels;
}

/// Brute-force F1 oracle: IoU by per-frame set counting, greedy matching
/// applied straight from the definition.
double f1_oracle(std::span<const LabelId> pred, std::span<const LabelId> gt, int k) {
    auto pred_segments = segments_of(pred);
    auto gt_segments = segments_of(gt);
    auto frames_of = [](const Segment& s) {
        std::set<std::int64_t> frames;
        for (std::int64_t t = s.start; t < s.end; ++t) frames.insert(t);
        return frames;
    };
    std::vector<bool> used(gt_segments.size(), false);
    long tp = 0, fp = 0;
    for (const auto& p : pred_segments) {
        auto pf = frames_of(p);
        double best_iou = -1.0;
        std::size_t best = gt_segments.size();
        for (std::size_t j = 0; j < gt_segments.size(); ++j) {
            if (gt_segments[j].label != p.label) continue;
            auto gf = frames_of(gt_segments[j]);
            std::size_t inter = 0;
            for (auto t : pf) inter += gf.count(t);
            std::size_t uni = pf.size() + gf.size() - inter;
            double iou = static_cast<double>(inter) / static_cast<double>(uni);
            if (iou > best_iou) {
                best_iou = iou;
                best = j;
            }
        }
        if (best < gt_segments.size() && best_iou >= k / 100.0 && !used[best]) {
            used[best] = true;
            ++tp;
        } else {
            ++fp;
        }
    }
    long fn = static_cast<long>(gt_segments.size()) - tp;
    if (2 * tp + fp + fn == 0) return 100.0;
    return 100.0 * 2.0 * tp / static_cast<double>(2 * tp + fp + fn);
}

/// Random frame sequence with at most max_segments runs.
std::vector<LabelId> random_segmented(Rng& rng, int k, int max_segments, int max_run) {
    int segments = 1 + static_cast<int>(rng.index(max_segments));
    std::vector<LabelId> frames;
    LabelId prev = -1;
    for (int s = 0; s < segments; ++s) {
        LabelId label;
        do {
            label = static_cast<LabelId>(rng.index(k));
        } while (label == prev);
        prev = label;
        auto run = 1 + rng.index(max_run);
        frames.insert(frames.end(), run, label);
    }
    return frames;
}

}  // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("frame_accuracy") {
    std::vector<LabelId> gt{0, 0, 1, 1};
    CHECK(frame_accuracy(gt, gt) == 100.0);
    std::vector<LabelId> wrong{1, 1, 0, 0};
    CHECK(frame_accuracy(wrong, gt) == 0.0);
    std::vector<LabelId> pred{0, 1, 1, 1};
    CHECK(frame_accuracy(pred, gt) == 75.0);

    std::vector<LabelId> shorter{0, 1};
    CHECK_THROWS_AS(frame_accuracy(shorter, gt), Error);
}

TEST_CASE("frame_accuracy background exclusion") {
    std::vector<LabelId> gt{0, 0, 1, 2};
    std::vector<LabelId> pred{1, 2, 1, 1};
    EvalOptions options;
    options.include_background = false;
    options.background_id = 0;
    CHECK(frame_accuracy(pred, gt, options) == 50.0);  // scored frames: gt 1,2

    options.background_id = std::nullopt;
    CHECK_THROWS_AS(frame_accuracy(pred, gt, options), Error);
}

TEST_CASE("edit_score examples") {
    std::vector<LabelId> gt{0, 0, 2, 2};           // segments A,C
    std::vector<LabelId> pred{0, 1, 1, 2};         // segments A,B,C
    CHECK(edit_score(gt, gt) == 100.0);
    CHECK(edit_score(pred, gt) == doctest::Approx(100.0 * (1.0 - 1.0 / 3.0)));

    std::vector<LabelId> a{0};
    std::vector<LabelId> b{1};
    CHECK(edit_score(b, a) == 0.0);
}

TEST_CASE("f1_at_k examples") {
    std::vector<LabelId> gt{0, 0, 1, 1};
    CHECK(f1_at_k(gt, gt, 10) == 100.0);
    CHECK(f1_at_k(gt, gt, 50) == 100.0);

    // pred [(A,0,10)] vs gt [(B,0,5),(A,5,10)]: IoU(A) = 0.5.
    std::vector<LabelId> gt2;
    gt2.insert(gt2.end(), 5, 1);
    gt2.insert(gt2.end(), 5, 0);
    std::vector<LabelId> pred2(10, 0);
    for (int k : {10, 25, 50}) {
        // one TP (the A segment), one FN (the B segment)
        CHECK(f1_at_k(pred2, gt2, k) == doctest::Approx(100.0 * 2.0 / 3.0));
    }

    // Label mismatch everywhere -> 0.
    std::vector<LabelId> gt3(10, 1);
    std::vector<LabelId> pred3(10, 0);
    CHECK(f1_at_k(pred3, gt3, 10) == 0.0);

    CHECK_THROWS_AS(f1_at_k(gt, gt, 0), Error);
    CHECK_THROWS_AS(f1_at_k(gt, gt, 101), Error);
}

TEST_CASE("metrics match brute-force oracles on random instances") {
    Rng rng(99);
    for (int iter = 0; iter < 400; ++iter) {
        auto gt = random_segmented(rng, 4, 8, 6);
        auto pred = random_segmented(rng, 4, 8, 6);
        pred.resize(gt.size(), pred.back());

        auto pred_labels = segment_labels(pred);
        auto gt_labels = segment_labels(gt);
        double expected_edit =
            100.0 * (1.0 - static_cast<double>(lev_oracle(pred_labels, gt_labels)) /
                               std::max(pred_labels.size(), gt_labels.size()));
        CHECK(edit_score(pred, gt) == doctest::Approx(expected_edit).epsilon(1e-12));

        for (int k : {10, 25, 50})
            CHECK(f1_at_k(pred, gt, k) == doctest::Approx(f1_oracle(pred, gt, k)).epsilon(1e-12));

        std::int64_t matching = 0;
        for (std::size_t t = 0; t < gt.size(); ++t) matching += pred[t] == gt[t];
        CHECK(frame_accuracy(pred, gt) ==
              doctest::Approx(100.0 * matching / gt.size()).epsilon(1e-12));
    }
}

TEST_CASE("edit and f1 invariant under consistent relabeling") {
    Rng rng(123);
    for (int iter = 0; iter < 100; ++iter) {
        auto gt = random_segmented(rng, 4, 6, 5);
        auto pred = random_segmented(rng, 4, 6, 5);
        pred.resize(gt.size(), pred.back());
        std::vector<LabelId> perm{2, 3, 0, 1};
        auto apply = [&](std::vector<LabelId> v) {
            for (auto& x : v) x = perm[x];
            return v;
        };
        CHECK(edit_score(pred, gt) == edit_score(apply(pred), apply(gt)));
        for (int k : {10, 25, 50})
            CHECK(f1_at_k(pred, gt, k) == f1_at_k(apply(pred), apply(gt), k));
    }
}

TEST_CASE("f1 monotone non-increasing in k") {
    Rng rng(321);
    for (int iter = 0; iter < 100; ++iter) {
        auto gt = random_segmented(rng, 3, 8, 5);
        auto pred = random_segmented(rng, 3, 8, 5);
        pred.resize(gt.size(), pred.back());
        double prev = 101.0;
        for (int k = 10; k <= 100; k += 10) {
            double f1 = f1_at_k(pred, gt, k);
            CHECK(f1 <= prev + 1e-12);
            prev = f1;
        }
    }
}

TEST_CASE("masked_region_report partitions frames") {
    // original: A A B B ; masked: A A bg bg (pair (A,B) masked); bg id = 2
    std::vector<LabelId> original{0, 0, 1, 1};
    std::vector<LabelId> masked{0, 0, 2, 2};
    manipulate::ManipulationRecord record;
    record.video_id = "v";
    record.method = manipulate::Method::mask_pair;
    record.affected.push_back({Segment{1, 2, 4}, Segment{2, 2, 4}});

    // Echoing the original ground truth: maximal bias.
    auto report = masked_region_report(original, original, masked, record, 2);
    CHECK(report.aggregate.frames_total == 2);
    CHECK(report.aggregate.predicted_original_label == 2);
    CHECK(report.aggregate.predicted_no_action == 0);

    // Predicting background everywhere: fully "correct" in masked regions.
    std::vector<LabelId> all_bg{2, 2, 2, 2};
    report = masked_region_report(all_bg, original, masked, record, 2);
    CHECK(report.aggregate.predicted_no_action == 2);
    CHECK(report.aggregate.predicted_original_label == 0);

    std::vector<LabelId> other{0, 0, 0, 0};
    report = masked_region_report(other, original, masked, record, 2);
    CHECK(report.aggregate.predicted_other == 2);
    CHECK(report.aggregate.predicted_no_action + report.aggregate.predicted_original_label +
              report.aggregate.predicted_other ==
          report.aggregate.frames_total);

    std::vector<LabelId> wrong_len{0, 0};
    CHECK_THROWS_AS(masked_region_report(wrong_len, original, masked, record, 2), Error);
}

TEST_CASE("label_distribution and TV distance") {
    std::vector<LabelId> labels{0, 0, 1, 2};
    auto h = label_distribution(labels, 3);
    CHECK(h == std::vector<std::int64_t>{2, 1, 1});

    CHECK(distribution_distance(h, h) == 0.0);
    std::vector<std::int64_t> p{1, 1, 0};
    std::vector<std::int64_t> q{2, 0, 0};
    CHECK(distribution_distance(p, q) == doctest::Approx(0.5));
    std::vector<std::int64_t> disjoint{0, 0, 5};
    CHECK(distribution_distance(p, disjoint) == doctest::Approx(1.0));

    std::vector<std::int64_t> empty{0, 0, 0};
    CHECK_THROWS_AS(distribution_distance(empty, empty), Error);
    std::vector<std::int64_t> shorter{1};
    CHECK_THROWS_AS(distribution_distance(p, shorter), Error);
}

TEST_CASE("TV distance is a metric on random triples") {
    Rng rng(55);
    for (int iter = 0; iter < 200; ++iter) {
        auto draw = [&] {
            std::vector<std::int64_t> h(5);
            for (auto& v : h) v = static_cast<std::int64_t>(rng.index(10));
            if (std::all_of(h.begin(), h.end(), [](auto v) { return v == 0; })) h[0] = 1;
            return h;
        };
        auto a = draw(), b = draw(), c = draw();
        double ab = distribution_distance(a, b);
        double ba = distribution_distance(b, a);
        double ac = distribution_distance(a, c);
        double cb = distribution_distance(c, b);
        CHECK(ab == ba);
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        CHECK(ab <= ac + cb + 1e-12);
        CHECK(distribution_distance(a, a) == 0.0);
    }
}

TEST_CASE("evaluate and cv_aggregate") {
    auto vocab = testutil::simple_vocab(2);
    std::vector<VideoAnnotation> videos;
    videos.push_back(VideoAnnotation::from_labels("v1", {0, 0, 1, 1}));
    videos.push_back(VideoAnnotation::from_labels("v2", {1, 1}));
    auto ds = Dataset::make("d", vocab, videos);

    ingest::PredictionSet predictions;
    predictions.labels["v1"] = {0, 0, 1, 1};  // perfect
    predictions.labels["v2"] = {1, 0};        // half right

    auto report = evaluate(ds, predictions);
    CHECK(report.per_video.at("v1").accuracy == 100.0);
    CHECK(report.per_video.at("v2").accuracy == 50.0);
    CHECK(report.aggregate.accuracy == 75.0);

    EvalReport fold_a, fold_b;
    fold_a.aggregate.accuracy = 80.0;
    fold_a.aggregate.edit = 60.0;
    fold_a.aggregate.f1[10] = 40.0;
    fold_b.aggregate.accuracy = 60.0;
    fold_b.aggregate.edit = 40.0;
    fold_b.aggregate.f1[10] = 20.0;
    std::vector<EvalReport> folds{fold_a, fold_b};
    auto cv = cv_aggregate(folds);
    CHECK(cv.aggregate.accuracy == 70.0);
    CHECK(cv.aggregate.edit == 50.0);
    CHECK(cv.aggregate.f1.at(10) == 30.0);

    std::vector<EvalReport> one{fold_a};
    CHECK(cv_aggregate(one).aggregate.accuracy == 80.0);
    // Fold order cannot matter.
    std::vector<EvalReport> swapped{fold_b, fold_a};
    CHECK(cv_aggregate(swapped).aggregate.accuracy == cv.aggregate.accuracy);

    CHECK_THROWS_AS(cv_aggregate(std::vector<EvalReport>{}), Error);
}

TEST_SUITE_END();
