#include <doctest.h>

#include <algorithm>

#include "segbias/stats.hpp"
#include "test_util.hpp"

using namespace segbias;
using namespace segbias::stats;

namespace {

/// One frame per segment; sequences must not repeat adjacent labels.
Dataset dataset_from_sequences(const std::vector<std::vector<LabelId>>& sequences, int k,
                               std::optional<LabelId> background = {}) {
    std::vector<VideoAnnotation> videos;
    for (std::size_t i = 0; i < sequences.size(); ++i)
        videos.push_back(VideoAnnotation::from_labels("v" + std::to_string(i), sequences[i]));
    return Dataset::make("seq", testutil::simple_vocab(k, background), std::move(videos));
}

/// Independent coverage oracle: sort ascending, walk from the tail.
int coverage_oracle(const PairHistogram& hist, double fraction) {
    std::vector<std::pair<std::pair<LabelId, LabelId>, std::int64_t>> pairs(hist.counts.begin(),
                                                                            hist.counts.end());
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return a.first > b.first;
    });
    long double threshold =
        static_cast<long double>(fraction) * static_cast<long double>(hist.total) - 1e-9L;
    long double sum = 0;
    int k = 0;
    for (auto it = pairs.rbegin(); it != pairs.rend(); ++it) {
        sum += static_cast<long double>(it->second);
        ++k;
        if (sum >= threshold) return k;
    }
    return k;
}

}  // namespace

TEST_SUITE_BEGIN("stats");

TEST_CASE("bigram_counts on one video") {
    auto ds = dataset_from_sequences({{0, 1, 0}}, 2);
    auto hist = bigram_counts(ds);
    CHECK(hist.total == 2);
    CHECK(hist.count(0, 1) == 1);
    CHECK(hist.count(1, 0) == 1);

    auto single = dataset_from_sequences({{1}}, 2);
    CHECK(bigram_counts(single).total == 0);
    CHECK(bigram_counts(single).counts.empty());
}

TEST_CASE("bigram_counts background exclusion") {
    auto ds = dataset_from_sequences({{0, 1, 2, 0, 1}}, 3, LabelId{0});
    auto all = bigram_counts(ds, true);
    CHECK(all.total == 4);
    auto trimmed = bigram_counts(ds, false);
    CHECK(trimmed.total == 1);  // only (1,2) avoids background
    CHECK(trimmed.count(1, 2) == 1);
}

TEST_CASE("bigram_counts additive over video subsets") {
    Rng rng(5);
    auto ds = testutil::random_dataset(rng, 4, 12, 5, 40, false);
    std::vector<std::string> first_half, second_half;
    for (std::size_t i = 0; i < ds.videos().size(); ++i)
        (i % 2 ? first_half : second_half).push_back(ds.videos()[i].video_id());
    auto h1 = bigram_counts(dataset_subset(ds, first_half, "a"));
    auto h2 = bigram_counts(dataset_subset(ds, second_half, "b"));
    h1.merge(h2);
    auto whole = bigram_counts(ds);
    CHECK(h1.counts == whole.counts);
    CHECK(h1.total == whole.total);
}

TEST_CASE("coverage_rank examples") {
    PairHistogram hist;
    hist.add(0, 1, 5);
    hist.add(1, 0, 3);
    hist.add(0, 2, 1);
    hist.add(2, 0, 1);
    CHECK(coverage_rank(hist, 0.3) == 1);  // top pair 5 >= 3
    CHECK(coverage_rank(hist, 1.0) == 4);  // all distinct pairs

    PairHistogram empty;
    CHECK_THROWS_AS(coverage_rank(empty, 0.5), Error);
    CHECK_THROWS_AS(coverage_rank(hist, 0.0), Error);
    CHECK_THROWS_AS(coverage_rank(hist, 1.5), Error);
}

TEST_CASE("coverage_rank matches prefix-sum oracle and is monotone") {
    Rng rng(6);
    for (int iter = 0; iter < 300; ++iter) {
        PairHistogram hist;
        int pairs = 1 + static_cast<int>(rng.index(12));
        for (int p = 0; p < pairs; ++p)
            hist.add(static_cast<LabelId>(rng.index(4)), static_cast<LabelId>(rng.index(4)),
                     1 + static_cast<std::int64_t>(rng.index(20)));
        double fractions[] = {0.125, 0.25, 0.3, 0.5, 0.75, 1.0};
        int prev = 0;
        for (double f : fractions) {
            int k = coverage_rank(hist, f);
            CHECK(k == coverage_oracle(hist, f));
            CHECK(k >= prev);  // monotone in fraction
            prev = k;
        }
    }
}

TEST_CASE("dominant_pairs planted bias") {
    // Pair (1,2) planted: 1 is followed by 2 in 18 of 20 occurrences.
    std::vector<std::vector<LabelId>> sequences;
    for (int i = 0; i < 18; ++i) sequences.push_back({1, 2, 3});
    sequences.push_back({1, 3, 2});
    sequences.push_back({1, 0, 2});
    auto ds = dataset_from_sequences(sequences, 4, LabelId{0});

    DominantPairCriteria criteria;
    criteria.min_initial_share = 0.1;
    criteria.min_follow_share = 0.5;
    criteria.exclude_no_action_follower = true;
    auto pairs = dominant_pairs(ds, criteria);
    REQUIRE(!pairs.empty());
    auto planted = std::find_if(pairs.begin(), pairs.end(),
                                [](const DominantPair& p) { return p.prev == 1 && p.next == 2; });
    REQUIRE(planted != pairs.end());
    CHECK(planted->follow_share == doctest::Approx(0.9));
    CHECK(planted->initial_share == doctest::Approx(20.0 / 60.0));
    CHECK(planted->initial_frame_share == doctest::Approx(20.0 / 60.0));
    CHECK(planted->pair_count == 18);
    // No background followers; sorted by follow share descending.
    for (const auto& pair : pairs) CHECK(pair.next != 0);
    for (std::size_t i = 1; i < pairs.size(); ++i)
        CHECK(pairs[i - 1].follow_share >= pairs[i].follow_share);
}

TEST_CASE("dominant_pairs requires background only when excluding") {
    auto ds = dataset_from_sequences({{1, 2}}, 3);
    DominantPairCriteria criteria;
    criteria.exclude_no_action_follower = true;
    CHECK_THROWS_AS(dominant_pairs(ds, criteria), Error);
    criteria.exclude_no_action_follower = false;
    CHECK(!dominant_pairs(ds, criteria).empty());
}

TEST_CASE("dominant_pairs invariant under video reordering") {
    Rng rng(7);
    auto ds = testutil::random_dataset(rng, 5, 10, 10, 60, false, LabelId{0});
    DominantPairCriteria criteria;
    criteria.min_initial_share = 0.0;
    criteria.min_follow_share = 0.0;
    auto pairs = dominant_pairs(ds, criteria);
    std::vector<std::string> reversed;
    for (auto it = ds.videos().rbegin(); it != ds.videos().rend(); ++it)
        reversed.push_back(it->video_id());
    auto reordered = dominant_pairs(dataset_subset(ds, reversed, "r"), criteria);
    REQUIRE(pairs.size() == reordered.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        CHECK(pairs[i].prev == reordered[i].prev);
        CHECK(pairs[i].next == reordered[i].next);
        CHECK(pairs[i].follow_share == reordered[i].follow_share);
    }
}

TEST_CASE("pair_heatmap matches histogram and conserves mass") {
    auto ds = dataset_from_sequences({{0, 1, 0, 1}, {2, 1}}, 3);
    auto matrix = pair_heatmap(ds);
    auto hist = bigram_counts(ds);
    std::int64_t matrix_total = 0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            CHECK(matrix[a][b] == hist.count(a, b));
            matrix_total += matrix[a][b];
        }
    CHECK(matrix_total == hist.total);

    // Marginals equal per-label participation counts.
    for (int a = 0; a < 3; ++a) {
        std::int64_t row = 0, from_hist = 0;
        for (int b = 0; b < 3; ++b) row += matrix[a][b];
        for (const auto& [pair, n] : hist.counts)
            if (pair.first == a) from_hist += n;
        CHECK(row == from_hist);
    }
}

TEST_CASE("positional_histogram") {
    std::vector<VideoAnnotation> videos;
    videos.push_back(VideoAnnotation::from_labels("v", {0, 0, 1, 1}));
    auto ds = Dataset::make("d", testutil::simple_vocab(2), videos);
    auto hist = positional_histogram(ds, 2);
    CHECK(hist.counts[0] == std::vector<std::int64_t>{2, 0});
    CHECK(hist.counts[1] == std::vector<std::int64_t>{0, 2});

    // A label spanning a whole video spreads near-uniformly.
    std::vector<VideoAnnotation> whole;
    whole.push_back(VideoAnnotation::from_labels("w", std::vector<LabelId>(100, 0)));
    auto spread = positional_histogram(Dataset::make("d", testutil::simple_vocab(1), whole), 4);
    CHECK(spread.counts[0] == std::vector<std::int64_t>{25, 25, 25, 25});

    CHECK_THROWS_AS(positional_histogram(ds, 0), Error);
}

TEST_CASE("positional_histogram conserves per-label frame totals") {
    Rng rng(8);
    auto ds = testutil::random_dataset(rng, 4, 8, 3, 50, false);
    auto hist = positional_histogram(ds, 7);
    std::vector<std::int64_t> frame_totals(4, 0);
    for (const auto& video : ds.videos())
        for (LabelId label : video.frame_labels()) frame_totals[label] += 1;
    for (int label = 0; label < 4; ++label) {
        std::int64_t total = 0;
        for (auto c : hist.counts[label]) total += c;
        CHECK(total == frame_totals[label]);
    }
}

TEST_CASE("csv exports") {
    auto ds = dataset_from_sequences({{0, 1, 0}}, 2);
    auto hist = bigram_counts(ds);
    auto csv = pairs_csv(hist, ds.vocab());
    CHECK(csv == "prev,next,count,share\nact0,act1,1,0.5\nact1,act0,1,0.5\n");

    auto matrix = pair_heatmap(ds);
    auto heat = heatmap_csv(matrix, ds.vocab());
    CHECK(heat == ",act0,act1\nact0,0,1\nact1,1,0\n");

    auto positions = positions_csv(positional_histogram(ds, 2), ds.vocab());
    CHECK(positions.starts_with("label,bin,count\n"));
}

TEST_SUITE_END();
