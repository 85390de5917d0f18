#include <map>
#include <memory>
#include <set>

#include "cli_util.hpp"
#include "commands.hpp"
#include "segbias/format.hpp"
#include "segbias/metrics.hpp"
#include "segbias/svg.hpp"

namespace segbias::cli {
namespace {

struct EvalCmdOptions {
    DatasetFlags dataset;
    OutputFlags output;
    std::string pred_dir;
    std::string records_file;
    std::string original_root;
    std::string folds;  // comma list; empty = score everything predicted
    bool include_background = true;
    std::uint64_t seed = 1;
    int threads = 1;
};

std::vector<std::string> parse_fold_list(const std::string& folds) {
    std::vector<std::string> list;
    std::size_t start = 0;
    while (start <= folds.size()) {
        auto comma = folds.find(',', start);
        std::string item = folds.substr(start, comma == std::string::npos ? comma : comma - start);
        if (!item.empty()) list.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return list;
}

nlohmann::json metrics_json(const metrics::VideoMetrics& m) {
    nlohmann::json j;
    j["frames"] = m.frames;
    j["accuracy"] = m.accuracy;
    j["edit"] = m.edit;
    nlohmann::json f1;
    for (const auto& [k, v] : m.f1) f1["f1_" + std::to_string(k)] = v;
    j["f1"] = std::move(f1);
    return j;
}

void run_eval(const EvalCmdOptions& options) {
    auto layout = options.dataset.layout();
    auto dataset = ingest::load_dataset(layout, options.threads);
    auto out_dir = options.output.prepare(layout.root);
    auto formats = options.output.format_set();
    const auto& vocab = dataset.vocab();

    auto all_predictions = ingest::load_predictions(options.pred_dir, vocab, dataset);

    metrics::EvalOptions eval_options;
    eval_options.include_background = options.include_background;
    eval_options.background_id = vocab.background_id();

    // One report per named fold (test side), or a single unrestricted one.
    auto fold_names = parse_fold_list(options.folds);
    std::vector<metrics::EvalReport> fold_reports;
    ingest::PredictionSet predictions;  // union of everything scored
    if (fold_names.empty()) {
        if (all_predictions.labels.empty()) throw Error::input("no predictions to score");
        predictions = all_predictions;
        fold_reports.push_back(
            metrics::evaluate(dataset, predictions, eval_options, std::nullopt, options.threads));
    } else {
        for (const auto& name : fold_names) {
            const auto& split = dataset.split(name);
            std::set<std::string> test(split.test_ids.begin(), split.test_ids.end());
            ingest::PredictionSet scoped;
            for (const auto& [id, labels] : all_predictions.labels)
                if (test.count(id)) scoped.labels.emplace(id, labels);
            for (const auto& id : all_predictions.missing)
                if (test.count(id)) scoped.missing.push_back(id);
            if (scoped.labels.empty())
                throw Error::input("fold '" + name + "' has no predicted test videos");
            fold_reports.push_back(
                metrics::evaluate(dataset, scoped, eval_options, name, options.threads));
            for (auto& [id, labels] : scoped.labels) predictions.labels.emplace(id, labels);
            for (auto& id : scoped.missing) predictions.missing.push_back(id);
        }
    }
    const metrics::EvalReport& report = fold_reports.front();

    std::uint64_t pred_hash = 0;
    for (const auto& [id, labels] : predictions.labels) {
        std::uint64_t h = fnv1a64(id);
        for (LabelId l : labels) h = splitmix64(h ^ static_cast<std::uint64_t>(l));
        pred_hash = hash_combine(pred_hash, h);
    }
    std::uint64_t input_hash = hash_combine(dataset.content_hash(), pred_hash);

    // Masked-region bias accounting, when a mask audit trail is supplied.
    bool have_records = !options.records_file.empty();
    metrics::MaskedBucket masked_aggregate;
    std::map<std::string, metrics::MaskedBucket> masked_per_video;
    std::vector<std::int64_t> region_original(vocab.size(), 0), region_masked(vocab.size(), 0),
        region_predicted(vocab.size(), 0);
    std::optional<Dataset> original;
    if (!options.original_root.empty()) {
        DatasetFlags original_flags = options.dataset;
        original_flags.root = options.original_root;
        original = ingest::load_dataset(original_flags.layout(), options.threads);
    }
    if (have_records) {
        if (!vocab.has_background())
            throw Error::input("masked-region reporting needs a background label");
        LabelId background = *vocab.background_id();
        auto parsed = manipulate::parse_records_json(
            ingest::read_text_file(options.records_file), vocab);
        for (const auto& record : parsed.records) {
            if (record.method != manipulate::Method::mask_pair &&
                record.method != manipulate::Method::mask_random)
                continue;
            auto pred_it = predictions.labels.find(record.video_id);
            if (pred_it == predictions.labels.end()) continue;
            const auto* masked_video = dataset.find(record.video_id);
            if (!masked_video)
                throw Error::input("records reference unknown video '" + record.video_id + "'");
            std::vector<LabelId> original_labels;
            if (original) {
                const auto* original_video = original->find(record.video_id);
                if (!original_video)
                    throw Error::input("video '" + record.video_id +
                                       "' missing from the original dataset");
                auto span = original_video->frame_labels();
                original_labels.assign(span.begin(), span.end());
            } else {
                original_labels = manipulate::unmask_labels(masked_video->frame_labels(), record);
            }
            auto region = metrics::masked_region_report(pred_it->second, original_labels,
                                                        masked_video->frame_labels(), record,
                                                        background);
            masked_per_video[record.video_id] = region.aggregate;
            masked_aggregate.frames_total += region.aggregate.frames_total;
            masked_aggregate.predicted_no_action += region.aggregate.predicted_no_action;
            masked_aggregate.predicted_original_label += region.aggregate.predicted_original_label;
            masked_aggregate.predicted_other += region.aggregate.predicted_other;
            for (const auto& affected : record.affected) {
                const Segment& seg = affected.original;
                for (std::int64_t t = seg.start; t < seg.end; ++t) {
                    region_original[original_labels[t]] += 1;
                    region_masked[masked_video->frame_labels()[t]] += 1;
                    region_predicted[pred_it->second[t]] += 1;
                }
            }
        }
    }

    if (formats.count("json")) {
        nlohmann::json doc;
        doc["provenance"] = provenance(options.seed, input_hash);
        doc["options"] = {{"include_background", options.include_background},
                          {"folds", fold_names}};
        nlohmann::json folds = nlohmann::json::array();
        for (const auto& fold_report : fold_reports) {
            nlohmann::json entry;
            entry["fold"] =
                fold_report.fold ? nlohmann::json(*fold_report.fold) : nlohmann::json();
            nlohmann::json per_video;
            for (const auto& [id, m] : fold_report.per_video) per_video[id] = metrics_json(m);
            entry["per_video"] = std::move(per_video);
            entry["aggregate"] = metrics_json(fold_report.aggregate);
            folds.push_back(std::move(entry));
        }
        doc["folds"] = std::move(folds);
        // Unweighted mean over folds is the headline number; the pooled
        // per-video mean and frame-weighted accuracy are the verbose pair.
        doc["cv_mean"] = metrics_json(metrics::cv_aggregate(fold_reports).aggregate);
        {
            metrics::EvalReport pooled;
            for (const auto& fold_report : fold_reports)
                for (const auto& [id, m] : fold_report.per_video) pooled.per_video[id] = m;
            double weighted = 0.0, accuracy = 0.0, edit = 0.0;
            std::int64_t frames = 0;
            for (const auto& [id, m] : pooled.per_video) {
                weighted += m.accuracy * static_cast<double>(m.frames);
                accuracy += m.accuracy;
                edit += m.edit;
                frames += m.frames;
            }
            auto n = static_cast<double>(pooled.per_video.size());
            doc["mean_over_videos"] = {{"accuracy", accuracy / n}, {"edit", edit / n}};
            doc["aggregate_frame_weighted"] = {{"accuracy", frames ? weighted / frames : 0.0}};
        }
        if (!predictions.missing.empty()) doc["missing_predictions"] = predictions.missing;
        if (have_records) {
            nlohmann::json masked;
            masked["aggregate"] = {
                {"frames_total", masked_aggregate.frames_total},
                {"predicted_no_action", masked_aggregate.predicted_no_action},
                {"predicted_original_label", masked_aggregate.predicted_original_label},
                {"predicted_other", masked_aggregate.predicted_other},
                {"bias_fraction",
                 masked_aggregate.frames_total > 0
                     ? static_cast<double>(masked_aggregate.predicted_original_label) /
                           static_cast<double>(masked_aggregate.frames_total)
                     : 0.0}};
            nlohmann::json per;
            for (const auto& [id, bucket] : masked_per_video)
                per[id] = {{"frames_total", bucket.frames_total},
                           {"predicted_no_action", bucket.predicted_no_action},
                           {"predicted_original_label", bucket.predicted_original_label},
                           {"predicted_other", bucket.predicted_other}};
            masked["per_video"] = std::move(per);
            doc["masked_regions"] = std::move(masked);
        }
        ingest::write_text_file(out_dir / "report.json", doc.dump(2) + "\n");
    }

    if (formats.count("csv")) {
        std::string csv = "fold,video,frames,accuracy,edit";
        std::vector<int> thresholds;
        for (const auto& [k, v] : report.aggregate.f1) thresholds.push_back(k);
        for (int k : thresholds) csv += ",f1_" + std::to_string(k);
        csv += "\n";
        for (const auto& fold_report : fold_reports) {
            std::string fold_name = fold_report.fold ? *fold_report.fold : "";
            for (const auto& [id, m] : fold_report.per_video) {
                csv += csv_field(fold_name) + "," + csv_field(id) + "," + std::to_string(m.frames) +
                       "," + format_sig6(m.accuracy) + "," + format_sig6(m.edit);
                for (int k : thresholds) csv += "," + format_sig6(m.f1.at(k));
                csv += "\n";
            }
        }
        ingest::write_text_file(out_dir / "per_video.csv", csv);

        if (have_records) {
            std::string breakdown = "label,original_count,masked_count,predicted_count\n";
            for (int l = 0; l < vocab.size(); ++l)
                breakdown += csv_field(vocab.name(l)) + "," + std::to_string(region_original[l]) +
                             "," + std::to_string(region_masked[l]) + "," +
                             std::to_string(region_predicted[l]) + "\n";
            ingest::write_text_file(out_dir / "masked_breakdown.csv", breakdown);
        }

        // Whole-sequence label distributions over the scored videos.
        std::vector<std::int64_t> gt_hist(vocab.size(), 0), pred_hist(vocab.size(), 0);
        for (const auto& [id, labels] : predictions.labels) {
            for (LabelId l : dataset.find(id)->frame_labels()) gt_hist[l] += 1;
            for (LabelId l : labels) pred_hist[l] += 1;
        }
        std::string dist = "label,gt_count,predicted_count\n";
        for (int l = 0; l < vocab.size(); ++l)
            dist += csv_field(vocab.name(l)) + "," + std::to_string(gt_hist[l]) + "," +
                    std::to_string(pred_hist[l]) + "\n";
        ingest::write_text_file(out_dir / "distributions.csv", dist);
    }

    if (formats.count("svg") && have_records) {
        std::vector<std::string> categories;
        for (const auto& entry : vocab.entries()) categories.push_back(entry.name);
        std::vector<svg::BarSeries> series(3);
        series[0] = {"original", "#c62828", {}};
        series[1] = {"masked ground truth", "#1565c0", {}};
        series[2] = {"predicted", "#2e7d32", {}};
        for (int l = 0; l < vocab.size(); ++l) {
            series[0].values.push_back(static_cast<double>(region_original[l]));
            series[1].values.push_back(static_cast<double>(region_masked[l]));
            series[2].values.push_back(static_cast<double>(region_predicted[l]));
        }
        ingest::write_text_file(out_dir / "masked_breakdown.svg",
                                svg::grouped_bars(categories, series,
                                                  "Masked-region label counts: " + dataset.name()));
    }
}

}  // namespace

void register_eval(CLI::App& app) {
    auto options = std::make_shared<EvalCmdOptions>();
    auto* cmd = app.add_subcommand("eval", "Score prediction files against a dataset");
    options->dataset.add_to(cmd);
    options->output.add_to(cmd, "Report output directory");
    cmd->add_option("--pred", options->pred_dir, "Directory of prediction .txt files")->required();
    cmd->add_option("--records", options->records_file,
                    "records.json from a mask manipulation, enables masked-region reports");
    cmd->add_option("--original-root", options->original_root,
                    "Pre-manipulation dataset root (otherwise restored from records)");
    cmd->add_option("--folds,--fold", options->folds,
                    "Comma list of folds; each is scored on its test videos and the "
                    "cross-validation mean is reported");
    cmd->add_option("--include-background", options->include_background,
                    "Score background frames/segments")
        ->capture_default_str();
    cmd->add_option("--seed", options->seed, "Master seed recorded in reports")->capture_default_str();
    cmd->add_option("--threads", options->threads, "Worker pool width")->capture_default_str();
    cmd->callback([options] { run_eval(*options); });
}

}  // namespace segbias::cli
