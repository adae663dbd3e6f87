// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#ifdef RECAP_HAVE_OPENCV
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#endif

#include "recap/errors.hpp"
#include "recap/text.hpp"
#include "recap/vector_blob.hpp"

namespace recap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kThumbnailSide = 8;
constexpr std::size_t kThumbnailValues = kThumbnailSide * kThumbnailSide * 3;

class Problems {
  public:
    void add(std::string where, std::string what) { items_.push_back(std::move(where) + ": " + std::move(what)); }
    [[nodiscard]] bool empty() const { return items_.empty(); }

    [[noreturn]] void raise(const fs::path &source) const {
        std::string msg = "manifest " + source.string() + ": " + std::to_string(items_.size()) + " problem(s)";
        for (const auto &item : items_) {
            msg += "\n  " + item;
        }
        throw DataError(msg);
    }

  private:
    std::vector<std::string> items_;
};

fs::path resolve(const fs::path &base, const std::string &p) {
    const fs::path path(p);
    return (path.is_absolute() ? path : base / path).lexically_normal();
}

void check_frames(const ManifestEntry &e, const std::string &where, Problems &problems) {
    std::error_code ec;
    if (e.format == FrameFormat::embeddings) {
        if (!fs::is_regular_file(e.frames, ec)) {
            problems.add(where, "embedding file not found: " + e.frames.string());
        }
    } else if (!fs::is_directory(e.frames, ec)) {
        problems.add(where, "frame directory not found: " + e.frames.string());
    }
}

void check_unique(const std::vector<ManifestEntry> &entries, const std::vector<std::string> &where, Problems &problems) {
    std::map<std::string, std::size_t> first;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto [it, inserted] = first.emplace(entries[i].video_id, i);
        if (!inserted && !entries[i].video_id.empty()) {
            problems.add(where[i], "duplicate video_id '" + entries[i].video_id + "' (first at " + where[it->second] + ")");
        }
    }
}

DatasetManifest load_jsonl(const fs::path &path, const ManifestOptions &options) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("manifest: cannot open " + path.string());
    }
    const fs::path base = path.parent_path();
    DatasetManifest manifest{path, {}};
    std::vector<std::string> where;
    Problems problems;
    std::string line;
    for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
        if (is_blank(line)) {
            continue;
        }
        const std::string loc = "line " + std::to_string(line_no);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error &e) {
            problems.add(loc, std::string("invalid JSON: ") + e.what());
            continue;
        }
        if (!j.is_object()) {
            problems.add(loc, "expected an object");
            continue;
        }
        ManifestEntry e;
        if (j.contains("video_id") && j["video_id"].is_string() && !is_blank(j["video_id"].get<std::string>())) {
            e.video_id = j["video_id"].get<std::string>();
        } else {
            problems.add(loc, "missing or empty video_id");
        }
        const bool has_emb = j.contains("embeddings");
        const bool has_frames = j.contains("frames");
        if (has_emb == has_frames) {
            problems.add(loc, "exactly one of 'embeddings' or 'frames' is required");
        } else {
            const json &p = has_emb ? j["embeddings"] : j["frames"];
            if (!p.is_string()) {
                problems.add(loc, "frame path must be a string");
            } else {
                e.frames = resolve(base, p.get<std::string>());
                e.format = has_emb ? FrameFormat::embeddings : FrameFormat::images;
                if (options.require_frames) {
                    check_frames(e, loc, problems);
                }
            }
        }
        if (j.contains("references")) {
            const json &refs = j["references"];
            if (!refs.is_array() || !std::all_of(refs.begin(), refs.end(), [](const json &r) { return r.is_string(); })) {
                problems.add(loc, "references must be an array of strings");
            } else {
                for (const auto &r : refs) {
                    e.references.push_back(r.get<std::string>());
                }
            }
        }
        if (j.contains("fps")) {
            if (!j["fps"].is_number() || !(j["fps"].get<double>() > 0.0)) {
                problems.add(loc, "fps must be a positive number");
            } else {
                e.fps = j["fps"].get<double>();
            }
        }
        for (const auto &[key, value] : j.items()) {
            static const std::set<std::string> known = {"video_id", "embeddings", "frames", "references", "fps"};
            if (!known.count(key)) {
                problems.add(loc, "unknown key '" + key + "'");
            }
        }
        manifest.entries.push_back(std::move(e));
        where.push_back(loc);
    }
    check_unique(manifest.entries, where, problems);
    if (manifest.entries.empty() && problems.empty()) {
        problems.add("file", "no entries");
    }
    if (!problems.empty()) {
        problems.raise(path);
    }
    return manifest;
}

DatasetManifest load_msrvtt(const fs::path &path, const ManifestOptions &options) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("manifest: cannot open " + path.string());
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error &e) {
        throw DataError("manifest " + path.string() + ": invalid JSON: " + e.what());
    }
    Problems problems;
    if (!j.is_object() || !j.contains("videos") || !j["videos"].is_array()) {
        problems.add("root", "expected an object with a 'videos' array");
        problems.raise(path);
    }
    const fs::path root = options.frames_root.empty() ? path.parent_path() / "frames" : options.frames_root;
    DatasetManifest manifest{path, {}};
    std::vector<std::string> where;
    std::map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < j["videos"].size(); ++i) {
        const json &v = j["videos"][i];
        const std::string loc = "videos[" + std::to_string(i) + "]";
        if (!v.is_object() || !v.contains("video_id") || !v["video_id"].is_string()) {
            problems.add(loc, "missing video_id");
            continue;
        }
        ManifestEntry e;
        e.video_id = v["video_id"].get<std::string>();
        if (v.contains("fps") && v["fps"].is_number() && v["fps"].get<double>() > 0.0) {
            e.fps = v["fps"].get<double>();
        }
        const fs::path blob = root / (e.video_id + ".f32");
        std::error_code ec;
        if (fs::is_regular_file(blob, ec) || !fs::is_directory(root / e.video_id, ec)) {
            e.frames = blob.lexically_normal();
            e.format = FrameFormat::embeddings;
        } else {
            e.frames = (root / e.video_id).lexically_normal();
            e.format = FrameFormat::images;
        }
        if (options.require_frames) {
            check_frames(e, loc, problems);
        }
        by_id.emplace(e.video_id, manifest.entries.size());
        manifest.entries.push_back(std::move(e));
        where.push_back(loc);
    }
    if (j.contains("sentences")) {
        if (!j["sentences"].is_array()) {
            problems.add("sentences", "must be an array");
        } else {
            for (std::size_t i = 0; i < j["sentences"].size(); ++i) {
                const json &s = j["sentences"][i];
                const std::string loc = "sentences[" + std::to_string(i) + "]";
                if (!s.is_object() || !s.contains("video_id") || !s.contains("caption") || !s["caption"].is_string() ||
                    !s["video_id"].is_string()) {
                    problems.add(loc, "expected {video_id, caption}");
                    continue;
                }
                const auto it = by_id.find(s["video_id"].get<std::string>());
                if (it == by_id.end()) {
                    problems.add(loc, "unknown video_id '" + s["video_id"].get<std::string>() + "'");
                    continue;
                }
                manifest.entries[it->second].references.push_back(s["caption"].get<std::string>());
            }
        }
    }
    check_unique(manifest.entries, where, problems);
    if (manifest.entries.empty() && problems.empty()) {
        problems.add("videos", "no entries");
    }
    if (!problems.empty()) {
        problems.raise(path);
    }
    return manifest;
}

#ifdef RECAP_HAVE_OPENCV
std::vector<Frame> read_image_frames(const ManifestEntry &entry, const FrameLoadOptions &options) {
    static const std::set<std::string> extensions = {".jpg", ".jpeg", ".png", ".bmp"};
    std::vector<fs::path> files;
    for (const auto &item : fs::directory_iterator(entry.frames)) {
        if (item.is_regular_file() && extensions.count(to_lower(item.path().extension().string()))) {
            files.push_back(item.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw DataError("frames: no images in " + entry.frames.string());
    }
    // Fixed Gaussian projection of an 8x8 RGB thumbnail into the vision width.
    std::mt19937_64 rng(options.image_seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> projection(options.image_dim * kThumbnailValues);
    for (double &w : projection) {
        w = normal(rng);
    }
    std::vector<Frame> frames;
    for (const auto &file : files) {
        const cv::Mat image = cv::imread(file.string(), cv::IMREAD_COLOR);
        if (image.empty()) {
            throw DataError("frames: cannot decode " + file.string());
        }
        cv::Mat thumb;
        cv::resize(image, thumb, cv::Size(kThumbnailSide, kThumbnailSide), 0, 0, cv::INTER_AREA);
        std::vector<double> pixels;
        pixels.reserve(kThumbnailValues);
        for (int y = 0; y < kThumbnailSide; ++y) {
            for (int x = 0; x < kThumbnailSide; ++x) {
                const auto &px = thumb.at<cv::Vec3b>(y, x);
                for (int c = 0; c < 3; ++c) {
                    pixels.push_back(px[c] / 255.0 - 0.5);
                }
            }
        }
        Vector features(options.image_dim, 0.0);
        for (std::size_t r = 0; r < options.image_dim; ++r) {
            for (std::size_t c = 0; c < kThumbnailValues; ++c) {
                features[r] += projection[r * kThumbnailValues + c] * pixels[c];
            }
        }
        frames.push_back({file.filename().string(), std::move(features)});
    }
    return frames;
}
#endif

}  // namespace

const ManifestEntry *DatasetManifest::find(const std::string &video_id) const {
    for (const auto &e : entries) {
        if (e.video_id == video_id) {
            return &e;
        }
    }
    return nullptr;
}

std::vector<std::string> DatasetManifest::all_references() const {
    std::vector<std::string> out;
    for (const auto &e : entries) {
        out.insert(out.end(), e.references.begin(), e.references.end());
    }
    return out;
}

DatasetManifest load_manifest(const fs::path &path, const ManifestOptions &options) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
        throw DataError("manifest: not found: " + path.string());
    }
    const fs::path absolute = fs::absolute(path);
    if (absolute.extension() == ".json") {
        return load_msrvtt(absolute, options);
    }
    return load_jsonl(absolute, options);
}

void write_manifest_jsonl(const DatasetManifest &manifest, const fs::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("manifest: cannot write " + path.string());
    }
    const fs::path base = fs::absolute(path).parent_path();
    for (const auto &e : manifest.entries) {
        json j;
        j["video_id"] = e.video_id;
        const fs::path rel = e.frames.is_absolute() ? e.frames.lexically_relative(base) : e.frames;
        j[e.format == FrameFormat::embeddings ? "embeddings" : "frames"] = rel.generic_string();
        j["references"] = e.references;
        j["fps"] = e.fps;
        out << j.dump() << '\n';
    }
}

bool image_frames_supported() {
#ifdef RECAP_HAVE_OPENCV
    return true;
#else
    return false;
#endif
}

FrameSource load_frames(const ManifestEntry &entry, const FrameLoadOptions &options) {
    FrameSource source;
    source.native_fps = entry.fps;
    if (entry.format == FrameFormat::embeddings) {
        const auto rows = read_vector_blob(entry.frames);
        if (rows.empty()) {
            throw DataError("frames: " + entry.frames.string() + " holds no frames");
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
            source.frames.push_back({entry.video_id + "#" + std::to_string(i), rows[i]});
        }
        return source;
    }
#ifdef RECAP_HAVE_OPENCV
    source.frames = read_image_frames(entry, options);
    return source;
#else
    (void)options;
    throw DataError("frames: " + entry.frames.string() + ": image directories need a build with OpenCV");
#endif
}

}  // namespace recap
