#include <memory>

#include "cli_util.hpp"
#include "commands.hpp"
#include "segbias/baseline.hpp"

namespace segbias::cli {
namespace {

struct SynthOptions {
    std::string out;
    int labels = 8;
    int videos = 100;
    std::string segments = "8,16";
    std::string duration = "20,4";
    std::vector<std::string> pairs;  // "<prev>,<next>,<prob>"
    int dim = 8;
    double separation = 4.0;
    double noise = 0.5;
    std::uint64_t seed = 1;
    int folds = 4;
    std::string orientation = "dims-by-frames";
};

void run_synth(const SynthOptions& options) {
    baseline::SynthConfig config;
    config.num_labels = options.labels;
    config.videos = options.videos;
    auto seg = split_fields(options.segments, 2, "--segments");
    config.segments_min = std::stoi(seg[0]);
    config.segments_max = std::stoi(seg[1]);
    auto dur = split_fields(options.duration, 2, "--duration");
    config.duration_mean = std::stod(dur[0]);
    config.duration_sigma = std::stod(dur[1]);
    config.feature_dim = options.dim;
    config.class_separation = options.separation;
    config.noise_sigma = options.noise;
    config.seed = options.seed;
    config.folds = options.folds;

    // Pairs may name labels by generated name ("act02") or id.
    for (const auto& spec : options.pairs) {
        auto fields = split_fields(spec, 3, "--pair");
        auto parse_label = [&](const std::string& field) -> LabelId {
            if (field.starts_with("act")) {
                try {
                    return static_cast<LabelId>(std::stoi(field.substr(3)));
                } catch (...) {
                }
            }
            try {
                return static_cast<LabelId>(std::stoi(field));
            } catch (...) {
                throw Error::input("--pair label '" + field + "' is neither an id nor actNN");
            }
        };
        config.dominant_pairs.push_back(
            {parse_label(fields[0]), parse_label(fields[1]), std::stod(fields[2])});
    }

    auto result = baseline::gen_synthetic(config);

    OutputFlags output;
    output.out = options.out;
    auto out_dir = output.prepare("");
    auto orientation = options.orientation == "frames-by-dims"
                           ? ingest::FeatureOrientation::frames_by_dims
                           : ingest::FeatureOrientation::dims_by_frames;
    ingest::write_dataset_tree(result.dataset, out_dir, orientation);

    nlohmann::json doc;
    doc["provenance"] = provenance(config.seed, result.dataset.content_hash());
    doc["config"] = {{"labels", config.num_labels},
                     {"videos", config.videos},
                     {"segments_min", config.segments_min},
                     {"segments_max", config.segments_max},
                     {"duration_mean", config.duration_mean},
                     {"duration_sigma", config.duration_sigma},
                     {"feature_dim", config.feature_dim},
                     {"class_separation", config.class_separation},
                     {"noise_sigma", config.noise_sigma},
                     {"folds", config.folds}};
    nlohmann::json planted = nlohmann::json::array();
    const auto& vocab = result.dataset.vocab();
    for (const auto& [pair, count] : result.planted.counts)
        planted.push_back({{"prev", vocab.name(pair.first)},
                           {"next", vocab.name(pair.second)},
                           {"count", count}});
    doc["planted_pairs"] = std::move(planted);
    doc["planted_total"] = result.planted.total;
    nlohmann::json rules = nlohmann::json::array();
    for (const auto& rule : config.dominant_pairs)
        rules.push_back({{"prev", vocab.name(rule.prev)},
                         {"next", vocab.name(rule.next)},
                         {"follow_prob", rule.follow_prob}});
    doc["dominant_pairs"] = std::move(rules);
    ingest::write_text_file(out_dir / "synth.json", doc.dump(2) + "\n");
}

}  // namespace

void register_synth(CLI::App& app) {
    auto options = std::make_shared<SynthOptions>();
    auto* cmd = app.add_subcommand("synth",
                                   "Generate a loadable synthetic dataset with controllable bias");
    cmd->add_option("--out", options->out, "Output dataset root")->required();
    cmd->add_option("--labels", options->labels, "Label count (label 0 is 'background')")
        ->capture_default_str();
    cmd->add_option("--videos", options->videos, "Video count")->capture_default_str();
    cmd->add_option("--segments", options->segments, "Segments per video as 'min,max'")
        ->capture_default_str();
    cmd->add_option("--duration", options->duration, "Segment frames as 'mean,sigma'")
        ->capture_default_str();
    cmd->add_option("--pair", options->pairs,
                    "Dominant pair '<prev>,<next>,<follow_prob>' (repeatable)");
    cmd->add_option("--dim", options->dim, "Feature dimension")->capture_default_str();
    cmd->add_option("--separation", options->separation, "Min distance between class centroids")
        ->capture_default_str();
    cmd->add_option("--noise", options->noise, "Feature noise sigma")->capture_default_str();
    cmd->add_option("--seed", options->seed, "Master seed")->capture_default_str();
    cmd->add_option("--folds", options->folds, "Round-robin fold count (0 = no splits)")
        ->capture_default_str();
    cmd->add_option("--orientation", options->orientation, "Feature file orientation on disk")
        ->check(CLI::IsMember({"frames-by-dims", "dims-by-frames"}))
        ->capture_default_str();
    cmd->callback([options] { run_synth(*options); });
}

}  // namespace segbias::cli
