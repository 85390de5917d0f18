#pragma once

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "segbias/rng.hpp"
#include "segbias/types.hpp"

namespace testutil {

/// Self-deleting temp directory under the system tmp root.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("segbias_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline segbias::LabelVocab simple_vocab(int k, std::optional<segbias::LabelId> background = {}) {
    std::vector<segbias::LabelEntry> entries;
    for (int i = 0; i < k; ++i) {
        std::string name = background && *background == i ? "background" : "act" + std::to_string(i);
        entries.push_back({i, name});
    }
    return segbias::LabelVocab::make(std::move(entries), background);
}

inline std::vector<segbias::LabelId> random_labels(segbias::Rng& rng, int k, int min_len, int max_len) {
    auto len = static_cast<std::size_t>(min_len + rng.index(max_len - min_len + 1));
    std::vector<segbias::LabelId> labels(len);
    for (auto& label : labels) label = static_cast<segbias::LabelId>(rng.index(k));
    return labels;
}

/// Random dataset over simple_vocab(k): `videos` label sequences with
/// optional attached features (value = label + small per-cell offset).
inline segbias::Dataset random_dataset(segbias::Rng& rng, int k, int videos, int min_len,
                                       int max_len, bool with_features,
                                       std::optional<segbias::LabelId> background = {}) {
    std::vector<segbias::VideoAnnotation> annotations;
    for (int v = 0; v < videos; ++v) {
        auto labels = random_labels(rng, k, min_len, max_len);
        char id[32];
        std::snprintf(id, sizeof(id), "vid%03d", v);
        auto annotation = segbias::VideoAnnotation::from_labels(id, labels);
        if (with_features) {
            int dims = 3;
            std::vector<double> values;
            values.reserve(labels.size() * dims);
            // Rows unique per frame so block-identity checks cannot alias.
            for (std::size_t t = 0; t < labels.size(); ++t)
                for (int d = 0; d < dims; ++d)
                    values.push_back(static_cast<double>(
                        static_cast<float>(16.0 * static_cast<double>(t) + d + 0.5 * labels[t])));
            annotation = annotation.with_features(
                std::make_shared<segbias::FeatureMatrix>(segbias::FeatureMatrix::make(
                    static_cast<std::int64_t>(labels.size()), dims, std::move(values))));
        }
        annotations.push_back(std::move(annotation));
    }
    return segbias::Dataset::make("random", simple_vocab(k, background), std::move(annotations));
}

}  // namespace testutil
