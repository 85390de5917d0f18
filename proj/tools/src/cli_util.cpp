#include "cli_util.hpp"

#include <cstdio>

#include "segbias/error.hpp"

namespace segbias::cli {
namespace fs = std::filesystem;

void DatasetFlags::add_to(CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--root", root, "Dataset root directory");
    if (required) opt->required();
    cmd->add_option("--groundtruth", groundtruth, "Ground-truth dir (default <root>/groundTruth)");
    cmd->add_option("--mapping", mapping, "Mapping file (default <root>/mapping.txt)");
    cmd->add_option("--splits", splits, "Splits dir (default <root>/splits)");
    cmd->add_option("--features", features, "Features dir (default <root>/features when present)");
    cmd->add_option("--orientation", orientation, "Feature file orientation")
        ->check(CLI::IsMember({"frames-by-dims", "dims-by-frames"}))
        ->capture_default_str();
    cmd->add_option("--background", background, "Name of the 'no action' label, when the dataset has one");
}

ingest::DatasetLayout DatasetFlags::layout() const {
    auto l = ingest::DatasetLayout::at(root);
    if (!groundtruth.empty()) l.groundtruth_dir = groundtruth;
    if (!mapping.empty()) l.mapping_file = mapping;
    if (!splits.empty()) l.splits_dir = splits;
    if (!features.empty()) l.features_dir = features;
    l.feature_orientation = orientation == "frames-by-dims"
                                ? ingest::FeatureOrientation::frames_by_dims
                                : ingest::FeatureOrientation::dims_by_frames;
    if (!background.empty()) l.background_name = background;
    return l;
}

void OutputFlags::add_to(CLI::App* cmd, const std::string& out_help) {
    cmd->add_option("--out", out, out_help)->required();
    cmd->add_option("--format", formats, "Report formats: comma-set of csv,json,svg")
        ->capture_default_str();
}

std::set<std::string> OutputFlags::format_set() const {
    std::set<std::string> set;
    std::size_t start = 0;
    while (start <= formats.size()) {
        auto comma = formats.find(',', start);
        std::string item = formats.substr(start, comma == std::string::npos ? comma : comma - start);
        if (!item.empty()) {
            if (item != "csv" && item != "json" && item != "svg")
                throw Error::input("unknown report format '" + item + "'");
            set.insert(item);
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (set.empty()) throw Error::input("--format needs at least one of csv,json,svg");
    return set;
}

fs::path OutputFlags::prepare(const fs::path& input_root) const {
    fs::path out_path(out);
    if (!input_root.empty()) {
        std::error_code ec;
        auto canonical_out = fs::weakly_canonical(out_path, ec);
        auto canonical_in = fs::weakly_canonical(input_root, ec);
        if (canonical_out == canonical_in)
            throw Error::input("output directory must be distinct from the input root");
    }
    fs::create_directories(out_path);
    return out_path;
}

std::vector<std::string> split_fields(const std::string& text, std::size_t parts,
                                      const std::string& flag) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        auto comma = text.find(',', start);
        fields.push_back(text.substr(start, comma == std::string::npos ? comma : comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (fields.size() != parts)
        throw Error::input(flag + " expects " + std::to_string(parts) +
                           " comma-separated values, got '" + text +
                           "' (labels whose names contain commas can be given by id)");
    return fields;
}

LabelId resolve_label(const LabelVocab& vocab, const std::string& name) {
    if (auto id = vocab.id_of(name)) return *id;
    // Numeric fallback for vocabularies addressed by id.
    try {
        std::size_t consumed = 0;
        int id = std::stoi(name, &consumed);
        if (consumed == name.size() && vocab.valid(id)) return id;
    } catch (...) {
    }
    throw Error::input("label '" + name + "' not found in the vocabulary");
}

nlohmann::json provenance(std::uint64_t master_seed, std::uint64_t input_hash) {
    nlohmann::json p;
    p["tool"] = "segbias";
    p["version"] = kVersion;
    p["master_seed"] = master_seed;
    p["input_hash"] = hex64(input_hash);
    return p;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

}  // namespace segbias::cli
