#include "segbias/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "segbias/parallel.hpp"

namespace segbias::ingest {
namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Splits on '\n', dropping one final empty element from a trailing newline.
std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

}  // namespace

DatasetLayout DatasetLayout::at(const fs::path& root) {
    DatasetLayout layout;
    layout.root = root;
    layout.groundtruth_dir = root / "groundTruth";
    layout.mapping_file = root / "mapping.txt";
    layout.splits_dir = root / "splits";
    if (fs::is_directory(root / "features")) layout.features_dir = root / "features";
    return layout;
}

LabelVocab parse_mapping(std::string_view text, std::optional<std::string> background_name) {
    std::vector<LabelEntry> entries;
    int line_no = 0;
    for (std::string_view raw : split_lines(text)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty()) continue;
        std::size_t space = line.find(' ');
        if (space == std::string_view::npos)
            throw Error::input("mapping line " + std::to_string(line_no) + ": expected '<id> <name>'");
        LabelId id;
        auto [ptr, ec] = std::from_chars(line.data(), line.data() + space, id);
        if (ec != std::errc{} || ptr != line.data() + space)
            throw Error::input("mapping line " + std::to_string(line_no) + ": malformed label id");
        std::string name(trim(line.substr(space + 1)));
        if (name.empty())
            throw Error::input("mapping line " + std::to_string(line_no) + ": empty label name");
        entries.push_back({id, std::move(name)});
    }
    if (entries.empty()) throw Error::input("mapping file has no entries");

    // Dense-id check with a clearer message than the vocab constructor's.
    std::vector<LabelId> ids;
    for (const auto& e : entries) ids.push_back(e.id);
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] != static_cast<LabelId>(i)) {
            if (i > 0 && ids[i] == ids[i - 1])
                throw Error::input("mapping: duplicate label id " + std::to_string(ids[i]));
            throw Error::input("non-dense ids in mapping (missing id " + std::to_string(i) + ")");
        }
    }

    std::optional<LabelId> background;
    if (background_name) {
        auto it = std::find_if(entries.begin(), entries.end(),
                               [&](const LabelEntry& e) { return e.name == *background_name; });
        if (it == entries.end())
            throw Error::input("configured background label '" + *background_name +
                               "' not present in mapping");
        background = it->id;
    }
    return LabelVocab::make(std::move(entries), background);
}

std::string write_mapping(const LabelVocab& vocab) {
    std::string out;
    for (const auto& entry : vocab.entries()) {
        out += std::to_string(entry.id);
        out += ' ';
        out += entry.name;
        out += '\n';
    }
    return out;
}

VideoAnnotation parse_frame_labels(std::string_view text, const LabelVocab& vocab,
                                   std::string video_id) {
    auto lines = split_lines(text);
    if (lines.empty()) throw Error::input("'" + video_id + "': empty label file");
    std::vector<LabelId> labels;
    labels.reserve(lines.size());
    int line_no = 0;
    for (std::string_view raw : lines) {
        ++line_no;
        std::string name(trim(raw));
        if (name.empty())
            throw Error::input("'" + video_id + "' line " + std::to_string(line_no) + ": blank line");
        auto id = vocab.id_of(name);
        if (!id)
            throw Error::input("'" + video_id + "' line " + std::to_string(line_no) +
                               ": unknown label '" + name + "'");
        labels.push_back(*id);
    }
    return VideoAnnotation::from_labels(std::move(video_id), std::move(labels));
}

std::string write_frame_labels(const VideoAnnotation& annotation, const LabelVocab& vocab) {
    std::string out;
    for (LabelId label : annotation.frame_labels()) {
        out += vocab.name(label);
        out += '\n';
    }
    return out;
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error::input("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::byte> read_binary_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw Error::input("cannot open '" + path.string() + "'");
    auto size = static_cast<std::size_t>(in.tellg());
    std::vector<std::byte> bytes(size);
    in.seekg(0);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
    if (!in) throw Error::input("failed reading '" + path.string() + "'");
    return bytes;
}

void write_text_file(const fs::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error::input("cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error::input("failed writing '" + path.string() + "'");
}

void write_binary_file(const fs::path& path, std::span<const std::byte> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error::input("cannot write '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error::input("failed writing '" + path.string() + "'");
}

namespace {

std::vector<Split> load_splits(const fs::path& splits_dir, const fs::path& groundtruth_dir) {
    std::vector<Split> splits;
    if (!fs::is_directory(splits_dir)) return splits;

    auto read_bundle = [](const fs::path& path) {
        std::vector<std::string> ids;
        const std::string text = read_text_file(path);
        for (std::string_view raw : split_lines(text)) {
            std::string name(trim(raw));
            if (name.empty()) continue;
            if (name.size() > 4 && name.ends_with(".txt")) name.resize(name.size() - 4);
            ids.push_back(std::move(name));
        }
        return ids;
    };

    // Bundle suffixes are usually "1".."5" but any tag is accepted; numeric
    // tags sort numerically so split10 follows split9.
    auto numeric_aware_less = [](const std::string& a, const std::string& b) {
        auto digits = [](const std::string& s) {
            return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
                return std::isdigit(c);
            });
        };
        if (digits(a) && digits(b))
            return a.size() != b.size() ? a.size() < b.size() : a < b;
        return a < b;
    };
    std::set<std::string, decltype(numeric_aware_less)> suffixes(numeric_aware_less);
    for (const auto& entry : fs::directory_iterator(splits_dir)) {
        std::string fname = entry.path().filename().string();
        for (std::string_view prefix : {"train.split", "test.split"}) {
            if (fname.starts_with(prefix) && fname.ends_with(".bundle")) {
                std::string suffix(fname.substr(prefix.size(), fname.size() - prefix.size() - 7));
                if (!suffix.empty()) suffixes.insert(suffix);
            }
        }
    }
    for (const std::string& suffix : suffixes) {
        fs::path train_path = splits_dir / ("train.split" + suffix + ".bundle");
        fs::path test_path = splits_dir / ("test.split" + suffix + ".bundle");
        if (!fs::exists(train_path))
            throw Error::input("split " + suffix + ": missing train bundle");
        if (!fs::exists(test_path))
            throw Error::input("split " + suffix + ": missing test bundle");
        Split split;
        split.name = "split" + suffix;
        split.train_ids = read_bundle(train_path);
        split.test_ids = read_bundle(test_path);
        splits.push_back(std::move(split));
    }
    (void)groundtruth_dir;
    return splits;
}

}  // namespace

Dataset load_dataset(const DatasetLayout& layout, int threads) {
    if (!fs::exists(layout.mapping_file))
        throw Error::input("mapping file '" + layout.mapping_file.string() + "' not found");
    LabelVocab vocab = parse_mapping(read_text_file(layout.mapping_file), layout.background_name);

    if (!fs::is_directory(layout.groundtruth_dir))
        throw Error::input("ground-truth directory '" + layout.groundtruth_dir.string() + "' not found");
    std::vector<fs::path> label_files;
    for (const auto& entry : fs::directory_iterator(layout.groundtruth_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".txt")
            label_files.push_back(entry.path());
    if (label_files.empty())
        throw Error::input("no label files found in '" + layout.groundtruth_dir.string() + "'");
    std::sort(label_files.begin(), label_files.end());

    std::vector<VideoAnnotation> videos(label_files.size());
    parallel_for(label_files.size(), threads, [&](std::size_t i) {
        std::string video_id = label_files[i].stem().string();
        VideoAnnotation annotation =
            parse_frame_labels(read_text_file(label_files[i]), vocab, video_id);
        if (layout.features_dir) {
            fs::path feature_path = *layout.features_dir / (video_id + ".npy");
            if (!fs::exists(feature_path))
                throw Error::input("missing feature file '" + feature_path.string() + "'");
            FeatureMatrix m =
                parse_feature_file(read_binary_file(feature_path), layout.feature_orientation);
            if (m.rows() != annotation.frames())
                throw Error::input("video '" + video_id + "': feature matrix has " +
                                   std::to_string(m.rows()) + " frames, labels have " +
                                   std::to_string(annotation.frames()));
            annotation = annotation.with_features(std::make_shared<FeatureMatrix>(std::move(m)));
        }
        videos[i] = std::move(annotation);
    });

    std::vector<Split> splits = load_splits(layout.splits_dir, layout.groundtruth_dir);
    std::string name = layout.root.filename().string();
    if (name.empty()) name = layout.root.parent_path().filename().string();
    return Dataset::make(name.empty() ? "dataset" : name, std::move(vocab), std::move(videos),
                         std::move(splits));
}

void write_dataset_tree(const Dataset& dataset, const fs::path& out_root,
                        FeatureOrientation orientation) {
    fs::create_directories(out_root / "groundTruth");
    write_text_file(out_root / "mapping.txt", write_mapping(dataset.vocab()));

    bool any_features = false;
    for (const auto& video : dataset.videos())
        if (video.has_features()) any_features = true;
    if (any_features) fs::create_directories(out_root / "features");

    for (const auto& video : dataset.videos()) {
        write_text_file(out_root / "groundTruth" / (video.video_id() + ".txt"),
                        write_frame_labels(video, dataset.vocab()));
        if (video.has_features())
            write_binary_file(out_root / "features" / (video.video_id() + ".npy"),
                              write_feature_file(video.features(), orientation));
    }

    if (!dataset.splits().empty()) {
        fs::create_directories(out_root / "splits");
        for (const auto& split : dataset.splits()) {
            std::string idx = split.name.starts_with("split") ? split.name.substr(5) : split.name;
            auto bundle = [](const std::vector<std::string>& ids) {
                std::string out;
                for (const auto& id : ids) {
                    out += id;
                    out += ".txt\n";
                }
                return out;
            };
            write_text_file(out_root / "splits" / ("train.split" + idx + ".bundle"),
                            bundle(split.train_ids));
            write_text_file(out_root / "splits" / ("test.split" + idx + ".bundle"),
                            bundle(split.test_ids));
        }
    }
}

PredictionSet load_predictions(const fs::path& dir, const LabelVocab& vocab, const Dataset& dataset) {
    if (!fs::is_directory(dir))
        throw Error::input("prediction directory '" + dir.string() + "' not found");
    PredictionSet set;
    std::set<std::string> known;
    for (const auto& video : dataset.videos()) known.insert(video.video_id());

    std::vector<std::string> mismatches;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
        std::string video_id = entry.path().stem().string();
        if (!known.count(video_id))
            throw Error::input("prediction file for unknown video '" + video_id + "'");
        VideoAnnotation pred = parse_frame_labels(read_text_file(entry.path()), vocab, video_id);
        const VideoAnnotation* gt = dataset.find(video_id);
        if (pred.frames() != gt->frames()) {
            mismatches.push_back(video_id + ": prediction " + std::to_string(pred.frames()) +
                                 " frames, ground truth " + std::to_string(gt->frames()));
            continue;
        }
        auto span = pred.frame_labels();
        set.labels.emplace(video_id, std::vector<LabelId>(span.begin(), span.end()));
    }
    if (!mismatches.empty()) {
        std::string msg = "prediction length mismatch:";
        for (const auto& m : mismatches) msg += "\n  " + m;
        throw Error::input(msg);
    }
    for (const auto& video : dataset.videos())
        if (!set.labels.count(video.video_id())) set.missing.push_back(video.video_id());
    return set;
}

}  // namespace segbias::ingest
