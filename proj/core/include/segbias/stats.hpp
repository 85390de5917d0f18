#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "segbias/types.hpp"

namespace segbias::stats {

/// Counts of ordered (preceding, following) segment-label bigrams. Pairs are
/// counted at segment level between adjacent action units of one video;
/// cross-video boundaries never form pairs.
struct PairHistogram {
    std::map<std::pair<LabelId, LabelId>, std::int64_t> counts;
    std::int64_t total = 0;

    void add(LabelId prev, LabelId next, std::int64_t n = 1);
    void merge(const PairHistogram& other);
    std::int64_t count(LabelId prev, LabelId next) const;
};

PairHistogram bigram_counts(const Dataset& dataset, bool include_background = true);

/// Smallest k such that the k highest-count pairs (ties broken by
/// lexicographic pair id) cover at least `fraction` of all pair occurrences.
int coverage_rank(const PairHistogram& hist, double fraction);

struct DominantPairCriteria {
    double min_initial_share = 0.01;  // of all segments in the dataset
    double min_follow_share = 0.9;    // of the initial action's non-terminal occurrences
    bool exclude_no_action_follower = true;
};

struct DominantPair {
    LabelId prev = 0;
    LabelId next = 0;
    double initial_share = 0.0;        // prev's share of all segments
    double initial_frame_share = 0.0;  // prev's share of all frames
    double follow_share = 0.0;         // fraction of prev's followers that are next
    std::int64_t pair_count = 0;
};

/// All pairs meeting the criteria, sorted by follow share descending.
std::vector<DominantPair> dominant_pairs(const Dataset& dataset, const DominantPairCriteria& criteria);

/// K x K matrix of bigram counts; row = former action, column = latter.
std::vector<std::vector<std::int64_t>> pair_heatmap(const Dataset& dataset);

/// Per-label histogram of frame positions normalized to [0, 1).
struct PositionalHistogram {
    int bins = 0;
    std::vector<std::vector<std::int64_t>> counts;  // [label][bin]
};

PositionalHistogram positional_histogram(const Dataset& dataset, int bins);

std::string pairs_csv(const PairHistogram& hist, const LabelVocab& vocab);
std::string heatmap_csv(const std::vector<std::vector<std::int64_t>>& matrix, const LabelVocab& vocab);
std::string positions_csv(const PositionalHistogram& hist, const LabelVocab& vocab);

}  // namespace segbias::stats
