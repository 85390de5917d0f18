#include "segbias/types.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "segbias/rng.hpp"

namespace segbias {

LabelVocab LabelVocab::make(std::vector<LabelEntry> entries, std::optional<LabelId> background_id) {
    if (entries.empty()) throw Error::input("vocabulary must have at least one label");
    LabelVocab vocab;
    vocab.names_.resize(entries.size());
    std::vector<bool> seen(entries.size(), false);
    std::unordered_set<std::string> names;
    for (const auto& entry : entries) {
        if (entry.id < 0 || entry.id >= static_cast<LabelId>(entries.size()))
            throw Error::input("non-dense ids: id " + std::to_string(entry.id) +
                               " outside 0.." + std::to_string(entries.size() - 1));
        if (seen[entry.id])
            throw Error::input("duplicate label id " + std::to_string(entry.id));
        if (entry.name.empty()) throw Error::input("empty label name for id " + std::to_string(entry.id));
        if (!names.insert(entry.name).second)
            throw Error::input("duplicate label name '" + entry.name + "'");
        seen[entry.id] = true;
        vocab.names_[entry.id] = entry.name;
    }
    if (background_id) {
        if (*background_id < 0 || *background_id >= static_cast<LabelId>(entries.size()))
            throw Error::input("background id " + std::to_string(*background_id) + " not in vocabulary");
        vocab.background_id_ = background_id;
    }
    return vocab;
}

const std::string& LabelVocab::name(LabelId id) const {
    if (!valid(id)) throw Error::internal("label id " + std::to_string(id) + " out of range");
    return names_[id];
}

std::optional<LabelId> LabelVocab::id_of(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<LabelId>(i);
    return std::nullopt;
}

std::vector<LabelEntry> LabelVocab::entries() const {
    std::vector<LabelEntry> out;
    out.reserve(names_.size());
    for (std::size_t i = 0; i < names_.size(); ++i)
        out.push_back({static_cast<LabelId>(i), names_[i]});
    return out;
}

std::uint64_t LabelVocab::hash() const {
    std::uint64_t h = fnv1a64("vocab");
    for (std::size_t i = 0; i < names_.size(); ++i) {
        h = fnv1a64(names_[i], h);
        h = splitmix64(h ^ i);
    }
    return splitmix64(h ^ (background_id_ ? static_cast<std::uint64_t>(*background_id_) + 1 : 0));
}

std::vector<Segment> segments_of(std::span<const LabelId> frame_labels) {
    if (frame_labels.empty()) throw Error::input("empty label sequence");
    std::vector<Segment> segments;
    std::int64_t start = 0;
    for (std::int64_t t = 1; t <= static_cast<std::int64_t>(frame_labels.size()); ++t) {
        if (t == static_cast<std::int64_t>(frame_labels.size()) || frame_labels[t] != frame_labels[start]) {
            segments.push_back({frame_labels[start], start, t});
            start = t;
        }
    }
    return segments;
}

std::vector<LabelId> flatten(std::span<const Segment> segments, std::int64_t total_frames) {
    if (total_frames < 1) throw Error::input("empty video forbidden");
    std::vector<LabelId> labels(total_frames, -1);
    std::int64_t covered = 0;
    for (const auto& seg : segments) {
        if (seg.start < 0 || seg.end > total_frames || seg.start >= seg.end)
            throw Error::input("non-tiling segments: invalid interval [" + std::to_string(seg.start) +
                               ", " + std::to_string(seg.end) + ")");
        for (std::int64_t t = seg.start; t < seg.end; ++t) {
            if (labels[t] != -1) throw Error::input("non-tiling segments: overlap at frame " + std::to_string(t));
            labels[t] = seg.label;
        }
        covered += seg.length();
    }
    if (covered != total_frames) throw Error::input("non-tiling segments: gap detected");
    return labels;
}

FeatureMatrix FeatureMatrix::make(std::int64_t rows, std::int64_t cols,
                                  std::vector<double> values, FeatureDType dtype) {
    if (rows < 1 || cols < 1)
        throw Error::input("feature matrix must have at least one row and column");
    if (static_cast<std::int64_t>(values.size()) != rows * cols)
        throw Error::input("feature matrix size mismatch: " + std::to_string(values.size()) +
                           " values for " + std::to_string(rows) + "x" + std::to_string(cols));
    for (double v : values)
        if (!std::isfinite(v)) throw Error::input("feature matrix contains non-finite value");
    FeatureMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.dtype_ = dtype;
    m.values_ = std::move(values);
    return m;
}

VideoAnnotation VideoAnnotation::from_labels(std::string video_id, std::vector<LabelId> frame_labels) {
    if (video_id.empty()) throw Error::input("empty video id");
    VideoAnnotation a;
    a.segments_ = segments_of(frame_labels);  // rejects empty sequences
    a.video_id_ = std::move(video_id);
    a.frame_labels_ = std::move(frame_labels);
    return a;
}

const FeatureMatrix& VideoAnnotation::features() const {
    if (!features_) throw Error::input("video '" + video_id_ + "' has no features bound");
    return *features_;
}

VideoAnnotation VideoAnnotation::with_features(std::shared_ptr<const FeatureMatrix> features) const {
    if (features && features->rows() != frames())
        throw Error::input("video '" + video_id_ + "': feature matrix has " +
                           std::to_string(features->rows()) + " rows for " +
                           std::to_string(frames()) + " frames");
    VideoAnnotation copy = *this;
    copy.features_ = std::move(features);
    return copy;
}

Dataset Dataset::make(std::string name, LabelVocab vocab, std::vector<VideoAnnotation> videos,
                      std::vector<Split> splits) {
    Dataset ds;
    std::sort(videos.begin(), videos.end(),
              [](const VideoAnnotation& a, const VideoAnnotation& b) { return a.video_id() < b.video_id(); });
    std::unordered_set<std::string> ids;
    for (const auto& video : videos) {
        if (!ids.insert(video.video_id()).second)
            throw Error::input("duplicate video id '" + video.video_id() + "'");
        for (LabelId label : video.frame_labels())
            if (!vocab.valid(label))
                throw Error::input("video '" + video.video_id() + "' uses label id " +
                                   std::to_string(label) + " outside the vocabulary");
    }
    for (const auto& split : splits) {
        std::set<std::string> train(split.train_ids.begin(), split.train_ids.end());
        for (const auto& id : split.train_ids)
            if (!ids.count(id))
                throw Error::input("split '" + split.name + "' references missing video '" + id + "'");
        for (const auto& id : split.test_ids) {
            if (!ids.count(id))
                throw Error::input("split '" + split.name + "' references missing video '" + id + "'");
            if (train.count(id))
                throw Error::input("split '" + split.name + "': video '" + id +
                                   "' appears in both train and test");
        }
    }
    ds.name_ = std::move(name);
    ds.vocab_ = std::move(vocab);
    ds.videos_ = std::move(videos);
    ds.splits_ = std::move(splits);
    return ds;
}

const VideoAnnotation* Dataset::find(const std::string& video_id) const {
    auto it = std::lower_bound(videos_.begin(), videos_.end(), video_id,
                               [](const VideoAnnotation& a, const std::string& id) { return a.video_id() < id; });
    if (it == videos_.end() || it->video_id() != video_id) return nullptr;
    return &*it;
}

const Split& Dataset::split(const std::string& name) const {
    for (const auto& s : splits_)
        if (s.name == name) return s;
    throw Error::input("fold '" + name + "' not found in dataset '" + name_ + "'");
}

std::int64_t Dataset::total_frames() const {
    std::int64_t total = 0;
    for (const auto& v : videos_) total += v.frames();
    return total;
}

std::int64_t Dataset::total_segments() const {
    std::int64_t total = 0;
    for (const auto& v : videos_) total += static_cast<std::int64_t>(v.segments().size());
    return total;
}

std::uint64_t Dataset::content_hash() const {
    std::uint64_t h = vocab_.hash();
    for (const auto& video : videos_) {
        h = fnv1a64(video.video_id(), h);
        for (LabelId label : video.frame_labels()) h = splitmix64(h ^ static_cast<std::uint64_t>(label));
        if (video.has_features()) {
            const auto& m = video.features();
            h = splitmix64(h ^ static_cast<std::uint64_t>(m.cols()));
            h = splitmix64(h ^ (m.dtype() == FeatureDType::f32 ? 4u : 8u));
            for (double v : m.values()) h = splitmix64(h ^ std::bit_cast<std::uint64_t>(v));
        }
    }
    for (const auto& split : splits_) {
        h = fnv1a64(split.name, h);
        for (const auto& id : split.train_ids) h = fnv1a64(id, splitmix64(h ^ 1));
        for (const auto& id : split.test_ids) h = fnv1a64(id, splitmix64(h ^ 2));
    }
    return h;
}

Dataset dataset_subset(const Dataset& dataset, std::span<const std::string> video_ids,
                       const std::string& name) {
    std::vector<VideoAnnotation> videos;
    videos.reserve(video_ids.size());
    for (const auto& id : video_ids) {
        const VideoAnnotation* video = dataset.find(id);
        if (!video) throw Error::input("video '" + id + "' not found in dataset '" + dataset.name() + "'");
        videos.push_back(*video);
    }
    return Dataset::make(name, dataset.vocab(), std::move(videos));
}

}  // namespace segbias
