#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segbias/error.hpp"

namespace segbias {

inline constexpr const char* kVersion = "0.1.0";

using LabelId = std::int32_t;

struct LabelEntry {
    LabelId id;
    std::string name;
};

/// Dense label vocabulary: ids 0..K-1, unique non-empty names, optional
/// background ("no action") id. Which label counts as background is
/// configuration, not convention -- datasets disagree on the name and some
/// have none at all.
class LabelVocab {
public:
    LabelVocab() = default;

    static LabelVocab make(std::vector<LabelEntry> entries,
                           std::optional<LabelId> background_id = std::nullopt);

    int size() const { return static_cast<int>(names_.size()); }
    const std::string& name(LabelId id) const;
    std::optional<LabelId> id_of(const std::string& name) const;
    bool valid(LabelId id) const { return id >= 0 && id < size(); }

    bool has_background() const { return background_id_.has_value(); }
    std::optional<LabelId> background_id() const { return background_id_; }
    bool is_background(LabelId id) const {
        return background_id_ && *background_id_ == id;
    }

    std::vector<LabelEntry> entries() const;

    /// Stable content hash over (id, name) pairs and the background id.
    std::uint64_t hash() const;

    bool operator==(const LabelVocab& other) const {
        return names_ == other.names_ && background_id_ == other.background_id_;
    }

private:
    std::vector<std::string> names_;  // index = id
    std::optional<LabelId> background_id_;
};

/// One action unit: a maximal run of frames sharing a label.
/// Intervals are 0-based, end-exclusive.
struct Segment {
    LabelId label = 0;
    std::int64_t start = 0;
    std::int64_t end = 0;

    std::int64_t length() const { return end - start; }
    bool operator==(const Segment&) const = default;
};

/// Run-length decomposition into maximal same-label runs.
std::vector<Segment> segments_of(std::span<const LabelId> frame_labels);

/// Inverse of segments_of. Accepts mergeable runs (adjacent equal labels);
/// rejects gaps, overlaps, and T = 0.
std::vector<LabelId> flatten(std::span<const Segment> segments, std::int64_t total_frames);

enum class FeatureDType { f32, f64 };

/// Per-frame feature vectors, row-major, frame t -> row t. Values are held
/// as doubles; dtype records the on-disk width (float32 payloads stay exact
/// through the double representation).
class FeatureMatrix {
public:
    FeatureMatrix() = default;

    static FeatureMatrix make(std::int64_t rows, std::int64_t cols,
                              std::vector<double> values,
                              FeatureDType dtype = FeatureDType::f32);

    std::int64_t rows() const { return rows_; }
    std::int64_t cols() const { return cols_; }
    FeatureDType dtype() const { return dtype_; }

    double at(std::int64_t r, std::int64_t c) const { return values_[r * cols_ + c]; }
    std::span<const double> row(std::int64_t r) const {
        return {values_.data() + r * cols_, static_cast<std::size_t>(cols_)};
    }
    std::span<const double> values() const { return values_; }

    bool operator==(const FeatureMatrix&) const = default;

private:
    std::int64_t rows_ = 0;
    std::int64_t cols_ = 0;
    FeatureDType dtype_ = FeatureDType::f32;
    std::vector<double> values_;
};

/// A video's per-frame label sequence with the derived segment view and an
/// optional feature binding. Immutable after construction.
class VideoAnnotation {
public:
    VideoAnnotation() = default;

    static VideoAnnotation from_labels(std::string video_id, std::vector<LabelId> frame_labels);

    const std::string& video_id() const { return video_id_; }
    std::int64_t frames() const { return static_cast<std::int64_t>(frame_labels_.size()); }
    std::span<const LabelId> frame_labels() const { return frame_labels_; }
    std::span<const Segment> segments() const { return segments_; }

    bool has_features() const { return features_ != nullptr; }
    const FeatureMatrix& features() const;
    std::shared_ptr<const FeatureMatrix> features_ptr() const { return features_; }

    /// Returns a copy with the matrix bound; row count must equal frames().
    VideoAnnotation with_features(std::shared_ptr<const FeatureMatrix> features) const;

private:
    std::string video_id_;
    std::vector<LabelId> frame_labels_;
    std::vector<Segment> segments_;
    std::shared_ptr<const FeatureMatrix> features_;
};

struct Split {
    std::string name;
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
};

/// Named collection of annotated videos plus vocabulary and optional folds.
/// Videos are kept sorted by id so every downstream pass is order-stable.
class Dataset {
public:
    Dataset() = default;

    static Dataset make(std::string name, LabelVocab vocab,
                        std::vector<VideoAnnotation> videos,
                        std::vector<Split> splits = {});

    const std::string& name() const { return name_; }
    const LabelVocab& vocab() const { return vocab_; }
    const std::vector<VideoAnnotation>& videos() const { return videos_; }
    const std::vector<Split>& splits() const { return splits_; }

    const VideoAnnotation* find(const std::string& video_id) const;
    const Split& split(const std::string& name) const;

    std::int64_t total_frames() const;
    std::int64_t total_segments() const;

    /// Stable content hash over vocab, labels, features and splits.
    std::uint64_t content_hash() const;

private:
    std::string name_;
    LabelVocab vocab_;
    std::vector<VideoAnnotation> videos_;
    std::vector<Split> splits_;
};

/// New dataset holding only the named videos (splits dropped).
Dataset dataset_subset(const Dataset& dataset, std::span<const std::string> video_ids,
                       const std::string& name);

}  // namespace segbias
