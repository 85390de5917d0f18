#include <memory>

#include "cli_util.hpp"
#include "commands.hpp"
#include "segbias/baseline.hpp"

namespace segbias::cli {
namespace {

struct BaselineOptions {
    DatasetFlags dataset;
    std::string kind;  // ordinal | visual | hybrid
    std::string fold;
    std::string out;
    std::string model_file;
    double alpha = 0.7;
    std::string first = "initial";  // initial | gt
    std::uint64_t seed = 1;
    int threads = 1;
};

Dataset fold_subset(const Dataset& dataset, const std::string& fold, bool train) {
    if (fold.empty()) return dataset;
    const auto& split = dataset.split(fold);
    const auto& ids = train ? split.train_ids : split.test_ids;
    return dataset_subset(dataset, ids, dataset.name() + "/" + fold + (train ? "-train" : "-test"));
}

void run_fit(const BaselineOptions& options) {
    auto layout = options.dataset.layout();
    auto dataset = ingest::load_dataset(layout, options.threads);
    auto train = fold_subset(dataset, options.fold, /*train=*/true);
    if (train.videos().empty()) throw Error::input("train split is empty");

    baseline::MarkovModel markov;
    baseline::CentroidModel centroid;
    bool want_markov = options.kind == "ordinal" || options.kind == "hybrid";
    bool want_centroid = options.kind == "visual" || options.kind == "hybrid";
    if (want_markov) markov = baseline::fit_markov(train);
    if (want_centroid) centroid = baseline::fit_centroid(train);

    auto parent = std::filesystem::path(options.out).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    ingest::write_text_file(options.out,
                            baseline::models_to_json(want_markov ? &markov : nullptr,
                                                     want_centroid ? &centroid : nullptr,
                                                     dataset.vocab(), options.seed,
                                                     train.content_hash()));
}

void run_predict(const BaselineOptions& options) {
    auto layout = options.dataset.layout();
    auto dataset = ingest::load_dataset(layout, options.threads);
    auto targets = fold_subset(dataset, options.fold, /*train=*/false);
    if (targets.videos().empty()) throw Error::input("no videos to predict");

    auto models =
        baseline::models_from_json(ingest::read_text_file(options.model_file), dataset.vocab());
    bool need_markov = options.kind == "ordinal" || options.kind == "hybrid";
    bool need_centroid = options.kind == "visual" || options.kind == "hybrid";
    if (need_markov && !models.has_markov)
        throw Error::input("model file has no transition model; fit with kind '" + options.kind + "'");
    if (need_centroid && !models.has_centroid)
        throw Error::input("model file has no centroids; fit with kind '" + options.kind + "'");

    auto first = options.first == "gt" ? baseline::FirstLabelMode::ground_truth
                                       : baseline::FirstLabelMode::from_initial;

    OutputFlags output;
    output.out = options.out;
    auto out_dir = output.prepare(layout.root);
    for (const auto& video : targets.videos()) {
        std::vector<LabelId> pred;
        if (options.kind == "ordinal") {
            pred = baseline::predict_ordinal(models.markov, video.segments(), first);
        } else if (options.kind == "visual") {
            pred = baseline::predict_visual(models.centroid, video.features());
        } else {
            pred = baseline::predict_hybrid(models.markov, models.centroid, options.alpha,
                                            video.features(), video.segments(), first);
        }
        auto annotation = VideoAnnotation::from_labels(video.video_id(), std::move(pred));
        ingest::write_text_file(out_dir / (video.video_id() + ".txt"),
                                ingest::write_frame_labels(annotation, dataset.vocab()));
    }
}

void add_common(CLI::App* cmd, std::shared_ptr<BaselineOptions> options) {
    cmd->add_option("kind", options->kind, "Predictor kind")
        ->required()
        ->check(CLI::IsMember({"ordinal", "visual", "hybrid"}));
    options->dataset.add_to(cmd);
    cmd->add_option("--fold", options->fold, "Named fold (fit: train side, predict: test side)");
    cmd->add_option("--seed", options->seed, "Master seed recorded in artifacts")
        ->capture_default_str();
    cmd->add_option("--threads", options->threads, "Worker pool width")->capture_default_str();
}

}  // namespace

void register_baseline(CLI::App& app) {
    auto* parent = app.add_subcommand("baseline",
                                      "Ordinal / visual / hybrid reference predictors");
    parent->require_subcommand(1);
    auto options = std::make_shared<BaselineOptions>();

    auto* fit = parent->add_subcommand("fit", "Fit a predictor on a train split");
    add_common(fit, options);
    fit->add_option("--out", options->out, "Model JSON path")->required();
    fit->callback([options] { run_fit(*options); });

    auto* predict = parent->add_subcommand("predict", "Write predictions in the frame-label format");
    add_common(predict, options);
    predict->add_option("--model", options->model_file, "Model JSON from 'baseline fit'")->required();
    predict->add_option("--out", options->out, "Prediction output directory")->required();
    predict->add_option("--alpha", options->alpha, "Hybrid prior weight in [0,1]")
        ->capture_default_str();
    predict->add_option("--first", options->first, "First-segment label source")
        ->check(CLI::IsMember({"initial", "gt"}))
        ->capture_default_str();
    predict->callback([options] { run_predict(*options); });
}

}  // namespace segbias::cli
