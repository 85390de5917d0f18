#include "segbias/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <nlohmann/json.hpp>

#include "segbias/rng.hpp"

namespace segbias::baseline {
namespace {

using nlohmann::json;

LabelId argmax_lowest_id(std::span<const double> scores) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best]) best = i;
    return static_cast<LabelId>(best);
}

double euclidean(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

/// Mean negative distance from the segment's frames to each centroid.
/// Absent centroids score -inf so they are never selected.
std::vector<double> segment_visual_scores(const CentroidModel& model, const FeatureMatrix& features,
                                          const Segment& segment) {
    std::vector<double> scores(model.num_labels, 0.0);
    for (LabelId label = 0; label < model.num_labels; ++label) {
        if (!model.present[label]) {
            scores[label] = -std::numeric_limits<double>::infinity();
            continue;
        }
        double total = 0.0;
        for (std::int64_t t = segment.start; t < segment.end; ++t)
            total += euclidean(features.row(t), model.centroid(label));
        scores[label] = -total / static_cast<double>(segment.length());
    }
    return scores;
}

void check_dims(const CentroidModel& model, const FeatureMatrix& features) {
    if (model.dims != features.cols())
        throw Error::input("feature dimension mismatch: model has " + std::to_string(model.dims) +
                           ", features have " + std::to_string(features.cols()));
}

}  // namespace

std::vector<double> add_one_smooth(std::span<const std::int64_t> counts) {
    std::int64_t total = 0;
    for (auto c : counts) total += c;
    std::vector<double> probs(counts.size());
    double denom = static_cast<double>(total) + static_cast<double>(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        probs[i] = (static_cast<double>(counts[i]) + 1.0) / denom;
    return probs;
}

MarkovModel fit_markov(const Dataset& train) {
    if (train.videos().empty()) throw Error::input("cannot fit on an empty train split");
    int K = train.vocab().size();
    std::vector<std::int64_t> transition_counts(static_cast<std::size_t>(K) * K, 0);
    std::vector<std::int64_t> initial_counts(K, 0);
    std::vector<std::int64_t> duration_sum(K, 0), duration_n(K, 0);
    for (const auto& video : train.videos()) {
        auto segments = video.segments();
        initial_counts[segments.front().label] += 1;
        for (std::size_t i = 0; i < segments.size(); ++i) {
            duration_sum[segments[i].label] += segments[i].length();
            duration_n[segments[i].label] += 1;
            if (i + 1 < segments.size())
                transition_counts[segments[i].label * K + segments[i + 1].label] += 1;
        }
    }
    MarkovModel model;
    model.num_labels = K;
    model.vocab_hash = train.vocab().hash();
    model.transition.resize(static_cast<std::size_t>(K) * K);
    for (int a = 0; a < K; ++a) {
        auto row = add_one_smooth(
            std::span<const std::int64_t>(transition_counts.data() + a * K, K));
        std::copy(row.begin(), row.end(), model.transition.begin() + a * K);
    }
    model.initial = add_one_smooth(initial_counts);
    model.mean_duration.resize(K, 0.0);
    for (int a = 0; a < K; ++a)
        if (duration_n[a] > 0)
            model.mean_duration[a] =
                static_cast<double>(duration_sum[a]) / static_cast<double>(duration_n[a]);
    return model;
}

CentroidModel fit_centroid(const Dataset& train) {
    if (train.videos().empty()) throw Error::input("cannot fit on an empty train split");
    int K = train.vocab().size();
    int D = -1;
    for (const auto& video : train.videos()) {
        if (!video.has_features())
            throw Error::input("centroid fit requires features, video '" + video.video_id() +
                               "' has none");
        if (D < 0) D = static_cast<int>(video.features().cols());
        if (video.features().cols() != D)
            throw Error::input("inconsistent feature dimensions across train videos");
    }
    CentroidModel model;
    model.num_labels = K;
    model.dims = D;
    model.vocab_hash = train.vocab().hash();
    model.centroids.assign(static_cast<std::size_t>(K) * D, 0.0);
    model.present.assign(K, false);
    std::vector<std::int64_t> frames(K, 0);
    for (const auto& video : train.videos()) {
        auto labels = video.frame_labels();
        const auto& m = video.features();
        for (std::int64_t t = 0; t < m.rows(); ++t) {
            LabelId label = labels[t];
            frames[label] += 1;
            auto row = m.row(t);
            for (int d = 0; d < D; ++d) model.centroids[label * D + d] += row[d];
        }
    }
    for (int label = 0; label < K; ++label) {
        if (frames[label] == 0) continue;
        model.present[label] = true;
        for (int d = 0; d < D; ++d)
            model.centroids[label * D + d] /= static_cast<double>(frames[label]);
    }
    return model;
}

std::vector<LabelId> predict_ordinal(const MarkovModel& model, std::span<const Segment> gt_segments,
                                     FirstLabelMode first) {
    if (gt_segments.empty()) throw Error::input("no segments to predict");
    std::vector<LabelId> frame_labels(gt_segments.back().end);
    LabelId prev = -1;
    for (std::size_t i = 0; i < gt_segments.size(); ++i) {
        LabelId label;
        if (i == 0) {
            label = first == FirstLabelMode::ground_truth
                        ? gt_segments[0].label
                        : argmax_lowest_id(model.initial);
        } else {
            label = argmax_lowest_id(
                std::span<const double>(model.transition.data() + prev * model.num_labels,
                                        model.num_labels));
        }
        std::fill(frame_labels.begin() + gt_segments[i].start,
                  frame_labels.begin() + gt_segments[i].end, label);
        prev = label;
    }
    return frame_labels;
}

std::vector<LabelId> predict_visual(const CentroidModel& model, const FeatureMatrix& features) {
    check_dims(model, features);
    std::vector<LabelId> labels(features.rows());
    for (std::int64_t t = 0; t < features.rows(); ++t) {
        double best = std::numeric_limits<double>::infinity();
        LabelId best_label = 0;
        for (LabelId label = 0; label < model.num_labels; ++label) {
            if (!model.present[label]) continue;
            double d = euclidean(features.row(t), model.centroid(label));
            if (d < best) {
                best = d;
                best_label = label;
            }
        }
        labels[t] = best_label;
    }
    return labels;
}

std::vector<LabelId> predict_visual_segment_voted(const CentroidModel& model,
                                                  const FeatureMatrix& features,
                                                  std::span<const Segment> boundaries) {
    check_dims(model, features);
    if (boundaries.empty()) throw Error::input("no segments to predict");
    std::vector<LabelId> labels(boundaries.back().end);
    for (const Segment& segment : boundaries) {
        auto scores = segment_visual_scores(model, features, segment);
        LabelId label = argmax_lowest_id(scores);
        std::fill(labels.begin() + segment.start, labels.begin() + segment.end, label);
    }
    return labels;
}

std::vector<LabelId> predict_hybrid(const MarkovModel& markov, const CentroidModel& centroid,
                                    double alpha, const FeatureMatrix& features,
                                    std::span<const Segment> boundaries, FirstLabelMode first) {
    if (alpha < 0.0 || alpha > 1.0) throw Error::input("alpha must be in [0, 1]");
    if (boundaries.empty()) throw Error::input("no segments to predict");
    if (alpha < 1.0) check_dims(centroid, features);
    if (markov.num_labels != centroid.num_labels)
        throw Error::input("markov and centroid models disagree on the vocabulary size");

    int K = markov.num_labels;
    std::vector<LabelId> frame_labels(boundaries.back().end);
    LabelId prev = -1;
    for (std::size_t i = 0; i < boundaries.size(); ++i) {
        std::vector<double> scores(K, 0.0);
        if (alpha > 0.0) {
            if (i == 0 && first == FirstLabelMode::ground_truth) {
                // Teacher-forced first label: bypass scoring entirely at alpha=1,
                // otherwise pin the prior term to the ground-truth label.
                for (int l = 0; l < K; ++l)
                    scores[l] = alpha * (l == boundaries[0].label
                                             ? 0.0
                                             : -std::numeric_limits<double>::infinity());
            } else {
                const double* prior =
                    i == 0 ? markov.initial.data() : markov.transition.data() + prev * K;
                for (int l = 0; l < K; ++l) scores[l] += alpha * std::log(prior[l]);
            }
        }
        if (alpha < 1.0) {
            auto visual = segment_visual_scores(centroid, features, boundaries[i]);
            for (int l = 0; l < K; ++l) scores[l] += (1.0 - alpha) * visual[l];
        }
        LabelId label = argmax_lowest_id(scores);
        std::fill(frame_labels.begin() + boundaries[i].start,
                  frame_labels.begin() + boundaries[i].end, label);
        prev = label;
    }
    return frame_labels;
}

std::string models_to_json(const MarkovModel* markov, const CentroidModel* centroid,
                           const LabelVocab& vocab, std::uint64_t master_seed,
                           std::uint64_t input_hash) {
    json doc;
    doc["tool"] = "segbias";
    doc["version"] = kVersion;
    doc["format"] = 1;
    doc["master_seed"] = master_seed;
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(input_hash));
    doc["input_hash"] = hex;
    char vhex[17];
    std::snprintf(vhex, sizeof(vhex), "%016llx", static_cast<unsigned long long>(vocab.hash()));
    doc["vocab_hash"] = vhex;
    json labels = json::array();
    for (const auto& entry : vocab.entries()) labels.push_back(entry.name);
    doc["labels"] = std::move(labels);
    if (markov) {
        json m;
        m["transition"] = markov->transition;
        m["initial"] = markov->initial;
        m["mean_duration"] = markov->mean_duration;
        doc["markov"] = std::move(m);
    }
    if (centroid) {
        json c;
        c["dims"] = centroid->dims;
        c["centroids"] = centroid->centroids;
        json present = json::array();
        for (bool p : centroid->present) present.push_back(p);
        c["present"] = std::move(present);
        doc["centroid"] = std::move(c);
    }
    return doc.dump(2) + "\n";
}

LoadedModels models_from_json(const std::string& text, const LabelVocab& vocab) {
    json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) throw Error::input("model file is not valid JSON");
    LoadedModels out;
    try {
        if (doc.value("format", 0) != 1) throw Error::input("unsupported model format version");
        char vhex[17];
        std::snprintf(vhex, sizeof(vhex), "%016llx", static_cast<unsigned long long>(vocab.hash()));
        if (doc.at("vocab_hash").get<std::string>() != vhex)
            throw Error::input("model was fitted on a different vocabulary");
        int K = vocab.size();
        if (doc.contains("markov")) {
            const auto& m = doc.at("markov");
            out.markov.num_labels = K;
            out.markov.vocab_hash = vocab.hash();
            out.markov.transition = m.at("transition").get<std::vector<double>>();
            out.markov.initial = m.at("initial").get<std::vector<double>>();
            out.markov.mean_duration = m.at("mean_duration").get<std::vector<double>>();
            if (out.markov.transition.size() != static_cast<std::size_t>(K) * K ||
                out.markov.initial.size() != static_cast<std::size_t>(K))
                throw Error::input("model matrix dimensions do not match the vocabulary");
            out.has_markov = true;
        }
        if (doc.contains("centroid")) {
            const auto& c = doc.at("centroid");
            out.centroid.num_labels = K;
            out.centroid.vocab_hash = vocab.hash();
            out.centroid.dims = c.at("dims").get<int>();
            out.centroid.centroids = c.at("centroids").get<std::vector<double>>();
            auto present = c.at("present").get<std::vector<bool>>();
            out.centroid.present.assign(present.begin(), present.end());
            if (out.centroid.centroids.size() !=
                    static_cast<std::size_t>(K) * out.centroid.dims ||
                out.centroid.present.size() != static_cast<std::size_t>(K))
                throw Error::input("centroid dimensions do not match the vocabulary");
            out.has_centroid = true;
        }
    } catch (const json::exception& e) {
        throw Error::input(std::string("malformed model file: ") + e.what());
    }
    return out;
}

}  // namespace segbias::baseline
