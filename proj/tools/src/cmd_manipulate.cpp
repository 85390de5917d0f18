#include <memory>

#include "cli_util.hpp"
#include "commands.hpp"
#include "segbias/manipulate.hpp"

namespace segbias::cli {
namespace {

struct ManipOptions {
    DatasetFlags dataset;
    std::string out;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string pair;
    double p = 0.15;
    // combine only
    std::vector<std::string> roots;
    std::string suffixes = "orig,mask,shuf";
};

void write_result(const manipulate::ManipResult& result, const ManipOptions& options,
                  const std::string& method, std::uint64_t input_hash,
                  const ingest::DatasetLayout& layout) {
    OutputFlags output;
    output.out = options.out;
    auto out_dir = output.prepare(layout.root);
    ingest::write_dataset_tree(result.dataset, out_dir, layout.feature_orientation);
    ingest::write_text_file(out_dir / "records.json",
                            manipulate::records_json(result.records, result.dataset.vocab(),
                                                     options.seed, method, input_hash));
}

std::pair<LabelId, LabelId> parse_pair(const LabelVocab& vocab, const std::string& flag) {
    auto fields = split_fields(flag, 2, "--pair");
    return {resolve_label(vocab, fields[0]), resolve_label(vocab, fields[1])};
}

void run_mask_pair(const ManipOptions& options) {
    auto layout = options.dataset.layout();
    auto dataset = ingest::load_dataset(layout, options.threads);
    auto [a, b] = parse_pair(dataset.vocab(), options.pair);
    auto result = manipulate::mask_pair(dataset, a, b, options.threads);
    write_result(result, options, "mask_pair", dataset.content_hash(), layout);
}

void run_mask_random(const ManipOptions& options) {
    auto layout = options.dataset.layout();
    auto dataset = ingest::load_dataset(layout, options.threads);
    auto result = manipulate::mask_random(dataset, options.p, SeedSpec{options.seed}, options.threads);
    write_result(result, options, "mask_random", dataset.content_hash(), layout);
}

void run_shuffle(const ManipOptions& options) {
    auto layout = options.dataset.layout();
    auto dataset = ingest::load_dataset(layout, options.threads);
    auto result = manipulate::shuffle_sequences(dataset, SeedSpec{options.seed}, options.threads);
    write_result(result, options, "shuffle", dataset.content_hash(), layout);
}

void run_limited_shuffle(const ManipOptions& options) {
    auto layout = options.dataset.layout();
    auto dataset = ingest::load_dataset(layout, options.threads);
    auto [a, b] = parse_pair(dataset.vocab(), options.pair);
    auto result = manipulate::limited_shuffle(dataset, a, b, SeedSpec{options.seed}, options.threads);
    write_result(result, options, "limited_shuffle", dataset.content_hash(), layout);
}

void run_combine(const ManipOptions& options) {
    if (options.roots.empty()) throw Error::input("combine needs at least one --root");
    std::vector<std::string> suffixes;
    {
        std::size_t start = 0;
        for (;;) {
            auto comma = options.suffixes.find(',', start);
            suffixes.push_back(options.suffixes.substr(
                start, comma == std::string::npos ? comma : comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }
    if (suffixes.size() != options.roots.size())
        throw Error::input("--suffixes must list one suffix per --root");

    std::vector<Dataset> datasets;
    std::uint64_t input_hash = 0;
    ingest::FeatureOrientation orientation = ingest::FeatureOrientation::dims_by_frames;
    for (const auto& root : options.roots) {
        DatasetFlags flags = options.dataset;
        flags.root = root;
        auto layout = flags.layout();
        orientation = layout.feature_orientation;
        datasets.push_back(ingest::load_dataset(layout, options.threads));
        input_hash = hash_combine(input_hash, datasets.back().content_hash());
    }
    auto combined = manipulate::combine(datasets, suffixes);

    OutputFlags output;
    output.out = options.out;
    std::filesystem::path out_dir;
    for (const auto& root : options.roots) out_dir = output.prepare(root);
    ingest::write_dataset_tree(combined, out_dir, orientation);
    ingest::write_text_file(out_dir / "records.json",
                            manipulate::records_json({}, combined.vocab(), options.seed, "combine",
                                                     input_hash));
}

CLI::App* add_mode(CLI::App* parent, std::shared_ptr<ManipOptions> options, const char* name,
                   const char* help, bool needs_root = true) {
    auto* cmd = parent->add_subcommand(name, help);
    if (needs_root) options->dataset.add_to(cmd);
    cmd->add_option("--out", options->out, "Output dataset root")->required();
    cmd->add_option("--seed", options->seed, "Master seed")->capture_default_str();
    cmd->add_option("--threads", options->threads, "Worker pool width")->capture_default_str();
    return cmd;
}

}  // namespace

void register_manipulate(CLI::App& app) {
    auto* parent = app.add_subcommand("manipulate",
                                      "Produce a manipulated dataset tree plus records.json");
    parent->require_subcommand(1);
    auto options = std::make_shared<ManipOptions>();

    auto* mask_pair_cmd = add_mode(parent, options, "mask-pair",
                                   "Relabel the latter action of a dominant pair to 'no action' "
                                   "and zero its features");
    mask_pair_cmd->add_option("--pair", options->pair, "Pair as '<prev>,<next>' label names")
        ->required();
    mask_pair_cmd->callback([options] { run_mask_pair(*options); });

    auto* mask_random_cmd = add_mode(parent, options, "mask-random",
                                     "Independently mask each non-background segment");
    mask_random_cmd->add_option("--p", options->p, "Masking probability")->capture_default_str();
    mask_random_cmd->callback([options] { run_mask_random(*options); });

    auto* shuffle_cmd = add_mode(parent, options, "shuffle",
                                 "Randomly permute each video's action segments");
    shuffle_cmd->callback([options] { run_shuffle(*options); });

    auto* limited_cmd = add_mode(parent, options, "limited-shuffle",
                                 "Transpose the latter action of a pair with a random segment");
    limited_cmd->add_option("--pair", options->pair, "Pair as '<prev>,<next>' label names")
        ->required();
    limited_cmd->callback([options] { run_limited_shuffle(*options); });

    auto* combine_cmd = parent->add_subcommand(
        "combine", "Union of dataset variants with suffix-renamed video ids");
    combine_cmd->add_option("--root", options->roots, "Input dataset roots (repeat per variant)")
        ->required();
    combine_cmd->add_option("--suffixes", options->suffixes, "Comma list, one suffix per root")
        ->capture_default_str();
    combine_cmd->add_option("--background", options->dataset.background,
                            "Name of the 'no action' label");
    combine_cmd->add_option("--orientation", options->dataset.orientation,
                            "Feature file orientation")
        ->check(CLI::IsMember({"frames-by-dims", "dims-by-frames"}));
    combine_cmd->add_option("--out", options->out, "Output dataset root")->required();
    combine_cmd->add_option("--seed", options->seed, "Master seed")->capture_default_str();
    combine_cmd->add_option("--threads", options->threads, "Worker pool width")->capture_default_str();
    combine_cmd->callback([options] { run_combine(*options); });
}

}  // namespace segbias::cli
