#include "segbias/stats.hpp"

#include <algorithm>

#include "segbias/format.hpp"

namespace segbias::stats {

void PairHistogram::add(LabelId prev, LabelId next, std::int64_t n) {
    if (n == 0) return;
    counts[{prev, next}] += n;
    total += n;
}

void PairHistogram::merge(const PairHistogram& other) {
    for (const auto& [pair, n] : other.counts) counts[pair] += n;
    total += other.total;
}

std::int64_t PairHistogram::count(LabelId prev, LabelId next) const {
    auto it = counts.find({prev, next});
    return it == counts.end() ? 0 : it->second;
}

PairHistogram bigram_counts(const Dataset& dataset, bool include_background) {
    PairHistogram hist;
    const auto& vocab = dataset.vocab();
    for (const auto& video : dataset.videos()) {
        auto segments = video.segments();
        for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
            LabelId prev = segments[i].label;
            LabelId next = segments[i + 1].label;
            if (!include_background && (vocab.is_background(prev) || vocab.is_background(next)))
                continue;
            hist.add(prev, next);
        }
    }
    return hist;
}

int coverage_rank(const PairHistogram& hist, double fraction) {
    if (hist.counts.empty()) throw Error::input("coverage rank of an empty histogram");
    if (!(fraction > 0.0) || fraction > 1.0)
        throw Error::input("coverage fraction must be in (0, 1]");
    std::vector<std::pair<std::pair<LabelId, LabelId>, std::int64_t>> pairs(hist.counts.begin(),
                                                                            hist.counts.end());
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    // Small slack guards the exact-coverage boundary against the fraction's
    // binary representation (0.3 * total is not representable).
    long double threshold = static_cast<long double>(fraction) * static_cast<long double>(hist.total);
    long double sum = 0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        sum += static_cast<long double>(pairs[k].second);
        if (sum >= threshold - 1e-9L) return static_cast<int>(k + 1);
    }
    return static_cast<int>(pairs.size());
}

std::vector<DominantPair> dominant_pairs(const Dataset& dataset, const DominantPairCriteria& criteria) {
    if (criteria.min_initial_share < 0 || criteria.min_initial_share > 1 ||
        criteria.min_follow_share < 0 || criteria.min_follow_share > 1)
        throw Error::input("dominant-pair shares must be in [0, 1]");
    const auto& vocab = dataset.vocab();
    if (criteria.exclude_no_action_follower && !vocab.has_background())
        throw Error::input("exclude_no_action_follower requires a background label");

    int K = vocab.size();
    std::vector<std::int64_t> segment_count(K, 0), frame_count(K, 0), nonterminal(K, 0);
    PairHistogram follows;
    for (const auto& video : dataset.videos()) {
        auto segments = video.segments();
        for (std::size_t i = 0; i < segments.size(); ++i) {
            segment_count[segments[i].label] += 1;
            frame_count[segments[i].label] += segments[i].length();
            if (i + 1 < segments.size()) {
                nonterminal[segments[i].label] += 1;
                follows.add(segments[i].label, segments[i + 1].label);
            }
        }
    }
    std::int64_t total_segments = dataset.total_segments();
    std::int64_t total_frames = dataset.total_frames();

    std::vector<DominantPair> out;
    for (const auto& [pair, count] : follows.counts) {
        auto [a, b] = pair;
        if (criteria.exclude_no_action_follower && vocab.is_background(b)) continue;
        double initial_share =
            total_segments > 0 ? static_cast<double>(segment_count[a]) / total_segments : 0.0;
        double follow_share = nonterminal[a] > 0 ? static_cast<double>(count) / nonterminal[a] : 0.0;
        if (initial_share < criteria.min_initial_share) continue;
        if (follow_share < criteria.min_follow_share) continue;
        DominantPair dp;
        dp.prev = a;
        dp.next = b;
        dp.initial_share = initial_share;
        dp.initial_frame_share =
            total_frames > 0 ? static_cast<double>(frame_count[a]) / total_frames : 0.0;
        dp.follow_share = follow_share;
        dp.pair_count = count;
        out.push_back(dp);
    }
    std::sort(out.begin(), out.end(), [](const DominantPair& x, const DominantPair& y) {
        if (x.follow_share != y.follow_share) return x.follow_share > y.follow_share;
        return std::pair{x.prev, x.next} < std::pair{y.prev, y.next};
    });
    return out;
}

std::vector<std::vector<std::int64_t>> pair_heatmap(const Dataset& dataset) {
    int K = dataset.vocab().size();
    std::vector<std::vector<std::int64_t>> matrix(K, std::vector<std::int64_t>(K, 0));
    for (const auto& video : dataset.videos()) {
        auto segments = video.segments();
        for (std::size_t i = 0; i + 1 < segments.size(); ++i)
            matrix[segments[i].label][segments[i + 1].label] += 1;
    }
    return matrix;
}

PositionalHistogram positional_histogram(const Dataset& dataset, int bins) {
    if (bins < 1) throw Error::input("positional histogram needs at least one bin");
    PositionalHistogram hist;
    hist.bins = bins;
    hist.counts.assign(dataset.vocab().size(), std::vector<std::int64_t>(bins, 0));
    for (const auto& video : dataset.videos()) {
        std::int64_t T = video.frames();
        auto labels = video.frame_labels();
        for (std::int64_t t = 0; t < T; ++t) {
            auto bin = static_cast<std::size_t>(static_cast<std::int64_t>(bins) * t / T);
            hist.counts[labels[t]][bin] += 1;
        }
    }
    return hist;
}

std::string pairs_csv(const PairHistogram& hist, const LabelVocab& vocab) {
    std::vector<std::pair<std::pair<LabelId, LabelId>, std::int64_t>> pairs(hist.counts.begin(),
                                                                            hist.counts.end());
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::string out = "prev,next,count,share\n";
    for (const auto& [pair, count] : pairs) {
        out += csv_field(vocab.name(pair.first)) + "," + csv_field(vocab.name(pair.second)) + "," +
               std::to_string(count) + "," +
               format_sig6(hist.total > 0 ? static_cast<double>(count) / hist.total : 0.0) + "\n";
    }
    return out;
}

std::string heatmap_csv(const std::vector<std::vector<std::int64_t>>& matrix, const LabelVocab& vocab) {
    std::string out;
    for (const auto& entry : vocab.entries()) out += "," + csv_field(entry.name);
    out += "\n";
    for (int a = 0; a < vocab.size(); ++a) {
        out += csv_field(vocab.name(a));
        for (int b = 0; b < vocab.size(); ++b) out += "," + std::to_string(matrix[a][b]);
        out += "\n";
    }
    return out;
}

std::string positions_csv(const PositionalHistogram& hist, const LabelVocab& vocab) {
    std::string out = "label,bin,count\n";
    for (int label = 0; label < static_cast<int>(hist.counts.size()); ++label)
        for (int bin = 0; bin < hist.bins; ++bin)
            out += csv_field(vocab.name(label)) + "," + std::to_string(bin) + "," +
                   std::to_string(hist.counts[label][bin]) + "\n";
    return out;
}

}  // namespace segbias::stats
