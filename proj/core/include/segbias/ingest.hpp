#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segbias/types.hpp"

namespace segbias::ingest {

/// Feature files on disk are 2-D arrays in one of two orientations. The
/// common I3D release layout is dims-by-frames (D x T), which is why that
/// is the default: silent transposition is the classic ingestion bug.
enum class FeatureOrientation { frames_by_dims, dims_by_frames };

struct DatasetLayout {
    std::filesystem::path root;
    std::filesystem::path groundtruth_dir;
    std::filesystem::path mapping_file;
    std::filesystem::path splits_dir;
    std::optional<std::filesystem::path> features_dir;
    FeatureOrientation feature_orientation = FeatureOrientation::dims_by_frames;
    std::optional<std::string> background_name;

    /// Conventional layout under a root: groundTruth/, mapping.txt, splits/,
    /// features/ (bound only when the directory exists).
    static DatasetLayout at(const std::filesystem::path& root);
};

/// Mapping file: one "<id> <name>" per line. Ids must be dense 0..K-1.
/// The background id is resolved from background_name when given.
LabelVocab parse_mapping(std::string_view text,
                         std::optional<std::string> background_name = std::nullopt);
std::string write_mapping(const LabelVocab& vocab);

/// Frame-label file: one label name per line, one line per frame.
/// Lines are whitespace-trimmed; blank interior lines are corrupt data.
VideoAnnotation parse_frame_labels(std::string_view text, const LabelVocab& vocab,
                                   std::string video_id);
std::string write_frame_labels(const VideoAnnotation& annotation, const LabelVocab& vocab);

/// NPY v1.0 only: little-endian float32/float64, C order, rank 2.
FeatureMatrix parse_feature_file(std::span<const std::byte> bytes, FeatureOrientation orientation);
std::vector<std::byte> write_feature_file(const FeatureMatrix& matrix, FeatureOrientation orientation);

Dataset load_dataset(const DatasetLayout& layout, int threads = 1);

/// Writes a full dataset tree (mapping.txt, groundTruth/, splits/, and
/// features/ when bound) under out_root in the given orientation.
void write_dataset_tree(const Dataset& dataset, const std::filesystem::path& out_root,
                        FeatureOrientation orientation = FeatureOrientation::dims_by_frames);

/// Predictions use the identical frame-label format, keyed by video id.
struct PredictionSet {
    std::map<std::string, std::vector<LabelId>> labels;
    std::vector<std::string> missing;  // dataset videos without a prediction file
};

PredictionSet load_predictions(const std::filesystem::path& dir, const LabelVocab& vocab,
                               const Dataset& dataset);

std::string read_text_file(const std::filesystem::path& path);
std::vector<std::byte> read_binary_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
void write_binary_file(const std::filesystem::path& path, std::span<const std::byte> bytes);

}  // namespace segbias::ingest
