#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "segbias/ingest.hpp"
#include "segbias/types.hpp"

namespace segbias::cli {

struct DatasetFlags {
    std::string root;
    std::string groundtruth;
    std::string mapping;
    std::string splits;
    std::string features;
    std::string orientation = "dims-by-frames";
    std::string background;

    void add_to(CLI::App* cmd, bool required = true);
    ingest::DatasetLayout layout() const;
};

struct OutputFlags {
    std::string out;
    std::string formats = "csv,json";

    void add_to(CLI::App* cmd, const std::string& out_help);
    std::set<std::string> format_set() const;
    std::filesystem::path prepare(const std::filesystem::path& input_root) const;
};

/// Splits "a,b" into exactly `parts` comma-separated fields.
std::vector<std::string> split_fields(const std::string& text, std::size_t parts,
                                      const std::string& flag);

LabelId resolve_label(const LabelVocab& vocab, const std::string& name);

nlohmann::json provenance(std::uint64_t master_seed, std::uint64_t input_hash);

std::string hex64(std::uint64_t value);

}  // namespace segbias::cli
