#include "segbias/manipulate.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "segbias/parallel.hpp"

namespace segbias::manipulate {
namespace {

using nlohmann::json;

struct VideoOutcome {
    VideoAnnotation video;
    ManipulationRecord record;  // empty affected => video unchanged
};

/// Applies a per-video transform across the dataset, preserving splits.
ManipResult apply_per_video(const Dataset& dataset, int threads,
                            const std::function<VideoOutcome(const VideoAnnotation&)>& fn) {
    const auto& videos = dataset.videos();
    std::vector<VideoOutcome> outcomes(videos.size());
    parallel_for(videos.size(), threads, [&](std::size_t i) { outcomes[i] = fn(videos[i]); });

    std::vector<VideoAnnotation> out_videos;
    std::vector<ManipulationRecord> records;
    out_videos.reserve(videos.size());
    for (auto& outcome : outcomes) {
        out_videos.push_back(std::move(outcome.video));
        if (!outcome.record.affected.empty()) records.push_back(std::move(outcome.record));
    }
    ManipResult result{Dataset::make(dataset.name(), dataset.vocab(), std::move(out_videos),
                                     dataset.splits()),
                       std::move(records)};
    return result;
}

/// Relabels the given segments to background and zeroes their feature rows.
VideoAnnotation mask_segments(const VideoAnnotation& video, std::span<const std::size_t> indices,
                              LabelId background) {
    auto span = video.frame_labels();
    std::vector<LabelId> labels(span.begin(), span.end());
    std::shared_ptr<const FeatureMatrix> features;
    std::vector<double> values;
    if (video.has_features()) {
        auto v = video.features().values();
        values.assign(v.begin(), v.end());
    }
    auto segments = video.segments();
    for (std::size_t idx : indices) {
        const Segment& seg = segments[idx];
        std::fill(labels.begin() + seg.start, labels.begin() + seg.end, background);
        if (video.has_features()) {
            std::int64_t cols = video.features().cols();
            std::fill(values.begin() + seg.start * cols, values.begin() + seg.end * cols, 0.0);
        }
    }
    VideoAnnotation out = VideoAnnotation::from_labels(video.video_id(), std::move(labels));
    if (video.has_features()) {
        features = std::make_shared<FeatureMatrix>(FeatureMatrix::make(
            video.features().rows(), video.features().cols(), std::move(values),
            video.features().dtype()));
        out = out.with_features(std::move(features));
    }
    return out;
}

/// Rebuilds a video with segments concatenated in `order` (indices into the
/// original segment list). Each segment keeps its internal frame order.
VideoAnnotation reorder_segments(const VideoAnnotation& video, std::span<const std::size_t> order,
                                 std::vector<AffectedSegment>* moved) {
    auto segments = video.segments();
    auto src_labels = video.frame_labels();
    std::vector<LabelId> labels;
    labels.reserve(src_labels.size());
    std::vector<double> values;
    std::int64_t cols = 0;
    if (video.has_features()) {
        cols = video.features().cols();
        values.reserve(video.features().values().size());
    }
    std::int64_t cursor = 0;
    for (std::size_t idx : order) {
        const Segment& seg = segments[idx];
        for (std::int64_t t = seg.start; t < seg.end; ++t) labels.push_back(src_labels[t]);
        if (video.has_features()) {
            auto v = video.features().values();
            values.insert(values.end(), v.begin() + seg.start * cols, v.begin() + seg.end * cols);
        }
        if (moved && cursor != seg.start)
            moved->push_back({seg, Segment{seg.label, cursor, cursor + seg.length()}});
        cursor += seg.length();
    }
    VideoAnnotation out = VideoAnnotation::from_labels(video.video_id(), std::move(labels));
    if (video.has_features())
        out = out.with_features(std::make_shared<FeatureMatrix>(FeatureMatrix::make(
            video.features().rows(), cols, std::move(values), video.features().dtype())));
    return out;
}

LabelId require_background(const Dataset& dataset, const char* op) {
    auto bg = dataset.vocab().background_id();
    if (!bg)
        throw Error::input(std::string(op) +
                           " requires a 'no action' label, but the vocabulary has none "
                           "(configure one via the background name)");
    return *bg;
}

void require_maskable_pair(const Dataset& dataset, LabelId a, LabelId b, LabelId background) {
    const auto& vocab = dataset.vocab();
    if (!vocab.valid(a) || !vocab.valid(b))
        throw Error::input("pair labels outside the vocabulary");
    if (a == background || b == background)
        throw Error::input("pair labels must not be the background label");
}

}  // namespace

std::string method_name(Method method) {
    switch (method) {
        case Method::mask_pair: return "mask_pair";
        case Method::mask_random: return "mask_random";
        case Method::shuffle: return "shuffle";
        case Method::limited_shuffle: return "limited_shuffle";
    }
    return "unknown";
}

ManipResult mask_pair(const Dataset& dataset, LabelId a, LabelId b, int threads) {
    LabelId background = require_background(dataset, "mask_pair");
    require_maskable_pair(dataset, a, b, background);
    return apply_per_video(dataset, threads, [&](const VideoAnnotation& video) {
        auto segments = video.segments();
        std::vector<std::size_t> targets;
        for (std::size_t i = 1; i < segments.size(); ++i)
            if (segments[i].label == b && segments[i - 1].label == a) targets.push_back(i);
        VideoOutcome outcome;
        outcome.record.video_id = video.video_id();
        outcome.record.method = Method::mask_pair;
        if (targets.empty()) {
            outcome.video = video;
            return outcome;
        }
        for (std::size_t idx : targets) {
            const Segment& seg = segments[idx];
            outcome.record.affected.push_back({seg, Segment{background, seg.start, seg.end}});
        }
        outcome.video = mask_segments(video, targets, background);
        return outcome;
    });
}

ManipResult mask_random(const Dataset& dataset, double p, SeedSpec seed, int threads) {
    if (p < 0.0 || p > 1.0) throw Error::input("mask probability must be in [0, 1]");
    LabelId background = require_background(dataset, "mask_random");
    return apply_per_video(dataset, threads, [&](const VideoAnnotation& video) {
        Rng rng(seed.sub_seed(video.video_id()));
        auto segments = video.segments();
        std::vector<std::size_t> targets;
        for (std::size_t i = 0; i < segments.size(); ++i) {
            if (segments[i].label == background) continue;
            if (rng.unit() < p) targets.push_back(i);
        }
        VideoOutcome outcome;
        outcome.record.video_id = video.video_id();
        outcome.record.method = Method::mask_random;
        outcome.record.sub_seed = seed.sub_seed(video.video_id());
        if (targets.empty()) {
            outcome.video = video;
            return outcome;
        }
        for (std::size_t idx : targets) {
            const Segment& seg = segments[idx];
            outcome.record.affected.push_back({seg, Segment{background, seg.start, seg.end}});
        }
        outcome.video = mask_segments(video, targets, background);
        return outcome;
    });
}

ManipResult shuffle_sequences(const Dataset& dataset, SeedSpec seed, int threads) {
    return apply_per_video(dataset, threads, [&](const VideoAnnotation& video) {
        VideoOutcome outcome;
        outcome.record.video_id = video.video_id();
        outcome.record.method = Method::shuffle;
        outcome.record.sub_seed = seed.sub_seed(video.video_id());
        std::size_t n = video.segments().size();
        if (n < 2) {
            outcome.video = video;
            return outcome;
        }
        Rng rng(outcome.record.sub_seed);
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(std::span<std::size_t>(order));
        outcome.video = reorder_segments(video, order, &outcome.record.affected);
        return outcome;
    });
}

ManipResult limited_shuffle(const Dataset& dataset, LabelId a, LabelId b, SeedSpec seed,
                            int threads) {
    if (!dataset.vocab().valid(a) || !dataset.vocab().valid(b))
        throw Error::input("pair labels outside the vocabulary");
    return apply_per_video(dataset, threads, [&](const VideoAnnotation& video) {
        VideoOutcome outcome;
        outcome.record.video_id = video.video_id();
        outcome.record.method = Method::limited_shuffle;
        outcome.record.sub_seed = seed.sub_seed(video.video_id());
        auto segments = video.segments();
        std::size_t n = segments.size();
        std::vector<std::size_t> occurrences;
        for (std::size_t i = 1; i < n; ++i)
            if (segments[i].label == b && segments[i - 1].label == a) occurrences.push_back(i);
        if (occurrences.empty()) {
            outcome.video = video;
            return outcome;
        }
        Rng rng(outcome.record.sub_seed);
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        // Transpose each occurrence's b segment with a uniformly chosen other
        // segment, tracking where segments currently sit.
        for (std::size_t target : occurrences) {
            std::size_t pos = std::find(order.begin(), order.end(), target) - order.begin();
            std::size_t r = rng.index(n - 1);
            std::size_t partner = r >= pos ? r + 1 : r;
            std::swap(order[pos], order[partner]);
        }
        outcome.video = reorder_segments(video, order, &outcome.record.affected);
        return outcome;
    });
}

Dataset combine(std::span<const Dataset> datasets, std::span<const std::string> suffixes) {
    if (datasets.empty()) throw Error::input("combine needs at least one dataset");
    if (datasets.size() != suffixes.size())
        throw Error::input("combine: " + std::to_string(datasets.size()) + " datasets but " +
                           std::to_string(suffixes.size()) + " suffixes");
    {
        std::set<std::string> unique(suffixes.begin(), suffixes.end());
        if (unique.size() != suffixes.size()) throw Error::input("combine: duplicate suffixes");
        for (const auto& s : suffixes)
            if (s.empty()) throw Error::input("combine: empty suffix");
    }
    const LabelVocab& vocab = datasets[0].vocab();
    for (std::size_t i = 1; i < datasets.size(); ++i) {
        if (datasets[i].vocab() == vocab) continue;
        std::string diff;
        const auto lhs = vocab.entries();
        const auto rhs = datasets[i].vocab().entries();
        for (std::size_t k = 0; k < std::max(lhs.size(), rhs.size()); ++k) {
            std::string l = k < lhs.size() ? lhs[k].name : "<missing>";
            std::string r = k < rhs.size() ? rhs[k].name : "<missing>";
            if (l != r) diff += "\n  id " + std::to_string(k) + ": '" + l + "' vs '" + r + "'";
        }
        if (diff.empty()) diff = "\n  background label differs";
        throw Error::input("combine: vocabulary mismatch with dataset '" + datasets[i].name() +
                           "':" + diff);
    }

    std::vector<VideoAnnotation> videos;
    std::map<std::string, Split> folds;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        auto rename = [&](const std::string& id) { return id + "#" + suffixes[d]; };
        for (const auto& video : datasets[d].videos()) {
            auto span = video.frame_labels();
            VideoAnnotation renamed = VideoAnnotation::from_labels(
                rename(video.video_id()), std::vector<LabelId>(span.begin(), span.end()));
            if (video.has_features()) renamed = renamed.with_features(video.features_ptr());
            videos.push_back(std::move(renamed));
        }
        for (const auto& split : datasets[d].splits()) {
            Split& fold = folds[split.name];
            fold.name = split.name;
            for (const auto& id : split.train_ids) fold.train_ids.push_back(rename(id));
            for (const auto& id : split.test_ids) fold.test_ids.push_back(rename(id));
        }
    }
    std::vector<Split> splits;
    for (auto& [name, split] : folds) splits.push_back(std::move(split));
    return Dataset::make("combined", vocab, std::move(videos), std::move(splits));
}

std::vector<LabelId> unmask_labels(std::span<const LabelId> masked_labels,
                                   const ManipulationRecord& record) {
    if (record.method != Method::mask_pair && record.method != Method::mask_random)
        throw Error::input("unmask_labels only applies to mask records");
    std::vector<LabelId> labels(masked_labels.begin(), masked_labels.end());
    for (const auto& affected : record.affected) {
        const Segment& seg = affected.original;
        if (seg.start < 0 || seg.end > static_cast<std::int64_t>(labels.size()))
            throw Error::input("record interval outside video '" + record.video_id + "'");
        std::fill(labels.begin() + seg.start, labels.begin() + seg.end, seg.label);
    }
    return labels;
}

std::string records_json(std::span<const ManipulationRecord> records, const LabelVocab& vocab,
                         std::uint64_t master_seed, const std::string& method,
                         std::uint64_t input_hash) {
    json doc;
    doc["tool"] = "segbias";
    doc["version"] = kVersion;
    doc["master_seed"] = master_seed;
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(input_hash));
    doc["input_hash"] = hex;
    doc["method"] = method;
    json list = json::array();
    for (const auto& record : records) {
        json entry;
        entry["video_id"] = record.video_id;
        entry["method"] = method_name(record.method);
        entry["sub_seed"] = record.sub_seed;
        json affected = json::array();
        for (const auto& seg : record.affected) {
            affected.push_back({{"original",
                                 {{"label", vocab.name(seg.original.label)},
                                  {"start", seg.original.start},
                                  {"end", seg.original.end}}},
                                {"replacement",
                                 {{"label", vocab.name(seg.replacement.label)},
                                  {"start", seg.replacement.start},
                                  {"end", seg.replacement.end}}}});
        }
        entry["affected"] = std::move(affected);
        list.push_back(std::move(entry));
    }
    doc["records"] = std::move(list);
    return doc.dump(2) + "\n";
}

ParsedRecords parse_records_json(const std::string& text, const LabelVocab& vocab) {
    json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) throw Error::input("records file is not valid JSON");
    ParsedRecords out;
    try {
        out.master_seed = doc.value("master_seed", 0ull);
        out.method = doc.value("method", "");
        auto label_of = [&](const json& j) {
            std::string name = j.get<std::string>();
            auto id = vocab.id_of(name);
            if (!id) throw Error::input("records reference unknown label '" + name + "'");
            return *id;
        };
        for (const auto& entry : doc.at("records")) {
            ManipulationRecord record;
            record.video_id = entry.at("video_id").get<std::string>();
            std::string m = entry.at("method").get<std::string>();
            if (m == "mask_pair") record.method = Method::mask_pair;
            else if (m == "mask_random") record.method = Method::mask_random;
            else if (m == "shuffle") record.method = Method::shuffle;
            else if (m == "limited_shuffle") record.method = Method::limited_shuffle;
            else throw Error::input("records contain unknown method '" + m + "'");
            record.sub_seed = entry.value("sub_seed", 0ull);
            for (const auto& seg : entry.at("affected")) {
                AffectedSegment affected;
                affected.original = {label_of(seg.at("original").at("label")),
                                     seg.at("original").at("start").get<std::int64_t>(),
                                     seg.at("original").at("end").get<std::int64_t>()};
                affected.replacement = {label_of(seg.at("replacement").at("label")),
                                        seg.at("replacement").at("start").get<std::int64_t>(),
                                        seg.at("replacement").at("end").get<std::int64_t>()};
                record.affected.push_back(affected);
            }
            out.records.push_back(std::move(record));
        }
    } catch (const json::exception& e) {
        throw Error::input(std::string("malformed records file: ") + e.what());
    }
    return out;
}

}  // namespace segbias::manipulate
