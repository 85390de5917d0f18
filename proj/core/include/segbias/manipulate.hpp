#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "segbias/rng.hpp"
#include "segbias/types.hpp"

namespace segbias::manipulate {

enum class Method { mask_pair, mask_random, shuffle, limited_shuffle };

std::string method_name(Method method);

struct AffectedSegment {
    Segment original;     // where the segment was, with its original label
    Segment replacement;  // same interval relabeled (masks) or the new location (shuffles)
};

/// Audit trail for one video. Sufficient to invert the label transformation:
/// masks restore by writing original labels back over their intervals,
/// shuffles by moving the blocks home.
struct ManipulationRecord {
    std::string video_id;
    Method method = Method::mask_pair;
    std::vector<AffectedSegment> affected;
    std::uint64_t sub_seed = 0;
};

struct ManipResult {
    Dataset dataset;
    std::vector<ManipulationRecord> records;  // only videos that actually changed
};

/// Every segment of label b immediately following a segment of label a is
/// relabeled to background and its feature rows are zeroed. Requires a
/// background label; a and b must not be background themselves.
ManipResult mask_pair(const Dataset& dataset, LabelId a, LabelId b, int threads = 1);

/// Each non-background segment is independently masked with probability p,
/// driven by the video's sub-seed.
ManipResult mask_random(const Dataset& dataset, double p, SeedSpec seed, int threads = 1);

/// Uniform random permutation of each video's segments. Frame order within
/// each action unit is untouched; feature blocks travel with their segment.
ManipResult shuffle_sequences(const Dataset& dataset, SeedSpec seed, int threads = 1);

/// For each occurrence of b immediately following a, the b segment is
/// transposed with a uniformly chosen other segment of the same video.
ManipResult limited_shuffle(const Dataset& dataset, LabelId a, LabelId b, SeedSpec seed,
                            int threads = 1);

/// Union of datasets with suffix-renamed video ids ("<id>#<suffix>") and
/// per-fold unions of the variants' split memberships.
Dataset combine(std::span<const Dataset> datasets, std::span<const std::string> suffixes);

/// Restores pre-mask labels from a mask-method record. Features stay zeroed.
std::vector<LabelId> unmask_labels(std::span<const LabelId> masked_labels,
                                   const ManipulationRecord& record);

std::string records_json(std::span<const ManipulationRecord> records, const LabelVocab& vocab,
                         std::uint64_t master_seed, const std::string& method,
                         std::uint64_t input_hash);

struct ParsedRecords {
    std::vector<ManipulationRecord> records;
    std::uint64_t master_seed = 0;
    std::string method;
};

ParsedRecords parse_records_json(const std::string& text, const LabelVocab& vocab);

}  // namespace segbias::manipulate
