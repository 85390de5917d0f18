#include <memory>

#include "cli_util.hpp"
#include "commands.hpp"
#include "segbias/format.hpp"
#include "segbias/stats.hpp"
#include "segbias/svg.hpp"

namespace segbias::cli {
namespace {

struct AuditOptions {
    DatasetFlags dataset;
    OutputFlags output;
    std::uint64_t seed = 1;
    int threads = 1;
    bool include_background = true;
    std::vector<double> fractions{0.3};
    int bins = 20;
    double min_initial_share = 0.01;
    double min_follow_share = 0.9;
    int top_pairs = 50;
};

void run_audit(const AuditOptions& options) {
    auto layout = options.dataset.layout();
    auto dataset = ingest::load_dataset(layout, options.threads);
    auto out_dir = options.output.prepare(layout.root);
    auto formats = options.output.format_set();
    const auto& vocab = dataset.vocab();

    auto hist = stats::bigram_counts(dataset, options.include_background);
    auto heatmap = stats::pair_heatmap(dataset);
    auto positions = stats::positional_histogram(dataset, options.bins);

    stats::DominantPairCriteria criteria;
    criteria.min_initial_share = options.min_initial_share;
    criteria.min_follow_share = options.min_follow_share;
    // The exclusion rule needs a background label; without one there is
    // nothing to exclude (the 50Salads shape).
    criteria.exclude_no_action_follower = vocab.has_background();
    auto dominant = stats::dominant_pairs(dataset, criteria);

    if (formats.count("json")) {
        nlohmann::json doc;
        doc["provenance"] = provenance(options.seed, dataset.content_hash());
        doc["dataset"] = {{"name", dataset.name()},
                          {"videos", dataset.videos().size()},
                          {"labels", vocab.size()},
                          {"frames", dataset.total_frames()},
                          {"segments", dataset.total_segments()},
                          {"background",
                           vocab.has_background() ? nlohmann::json(vocab.name(*vocab.background_id()))
                                                  : nlohmann::json()}};
        doc["pairs"] = {{"total", hist.total},
                        {"distinct", hist.counts.size()},
                        {"include_background", options.include_background}};
        nlohmann::json coverage = nlohmann::json::array();
        for (double fraction : options.fractions) {
            nlohmann::json entry;
            entry["fraction"] = fraction;
            entry["rank"] = hist.counts.empty() ? 0 : stats::coverage_rank(hist, fraction);
            coverage.push_back(entry);
        }
        doc["coverage"] = std::move(coverage);
        nlohmann::json pairs = nlohmann::json::array();
        for (const auto& pair : dominant) {
            pairs.push_back({{"prev", vocab.name(pair.prev)},
                             {"next", vocab.name(pair.next)},
                             {"initial_share_segments", pair.initial_share},
                             {"initial_share_frames", pair.initial_frame_share},
                             {"follow_share", pair.follow_share},
                             {"count", pair.pair_count}});
        }
        doc["dominant_pairs"] = std::move(pairs);
        ingest::write_text_file(out_dir / "audit.json", doc.dump(2) + "\n");
    }

    if (formats.count("csv")) {
        ingest::write_text_file(out_dir / "pairs.csv", stats::pairs_csv(hist, vocab));
        ingest::write_text_file(out_dir / "heatmap.csv", stats::heatmap_csv(heatmap, vocab));
        ingest::write_text_file(out_dir / "positions.csv", stats::positions_csv(positions, vocab));
    }

    if (formats.count("svg")) {
        ingest::write_text_file(out_dir / "heatmap.svg",
                                svg::heatmap(heatmap, vocab, "Action pair frequency: " + dataset.name()));
        std::vector<std::pair<std::string, std::int64_t>> ranked;
        for (const auto& [pair, count] : hist.counts)
            ranked.push_back({vocab.name(pair.first) + ">" + vocab.name(pair.second), count});
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (static_cast<int>(ranked.size()) > options.top_pairs) ranked.resize(options.top_pairs);
        int highlighted =
            hist.counts.empty() ? 0 : stats::coverage_rank(hist, options.fractions.front());
        ingest::write_text_file(
            out_dir / "longtail.svg",
            svg::longtail(ranked, highlighted, "Ranked action pairs: " + dataset.name()));
    }
}

}  // namespace

void register_audit(CLI::App& app) {
    auto options = std::make_shared<AuditOptions>();
    auto* cmd = app.add_subcommand("audit", "Bias diagnostics: pair histogram, coverage rank, "
                                            "heatmap, positional distributions");
    options->dataset.add_to(cmd);
    options->output.add_to(cmd, "Report output directory");
    cmd->add_option("--seed", options->seed, "Master seed recorded in reports")->capture_default_str();
    cmd->add_option("--threads", options->threads, "Worker pool width")->capture_default_str();
    cmd->add_option("--include-background", options->include_background,
                    "Count pairs touching the background label")
        ->capture_default_str();
    cmd->add_option("--fraction", options->fractions,
                    "Coverage fraction(s) for the rank report")
        ->capture_default_str();
    cmd->add_option("--bins", options->bins, "Positional histogram bins")->capture_default_str();
    cmd->add_option("--min-initial-share", options->min_initial_share,
                    "Dominant pair: min share of all segments for the initial action")
        ->capture_default_str();
    cmd->add_option("--min-follow-share", options->min_follow_share,
                    "Dominant pair: min follower share")
        ->capture_default_str();
    cmd->add_option("--top-pairs", options->top_pairs, "Bars in longtail.svg")->capture_default_str();
    cmd->callback([options] { run_audit(*options); });
}

}  // namespace segbias::cli
