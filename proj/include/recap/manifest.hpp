// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "recap/keyframes.hpp"

namespace recap {

enum class FrameFormat {
    embeddings,  ///< one vector blob holding a row per frame
    images,      ///< a directory of image files, read in file-name order
};

struct ManifestEntry {
    std::string video_id;
    std::filesystem::path frames;  ///< absolute after loading
    FrameFormat format = FrameFormat::embeddings;
    std::vector<std::string> references;
    double fps = 30.0;  ///< native frame rate of the stored frames
};

struct DatasetManifest {
    std::filesystem::path source;
    std::vector<ManifestEntry> entries;

    [[nodiscard]] const ManifestEntry *find(const std::string &video_id) const;
    /// Every reference of every entry, in entry order.
    [[nodiscard]] std::vector<std::string> all_references() const;
};

struct ManifestOptions {
    /// Where the MSR-VTT adapter looks for `<video_id>.f32` or `<video_id>/`.
    /// Empty means `<manifest dir>/frames`.
    std::filesystem::path frames_root;
    /// When false, frame paths are not checked on disk (used when only references matter).
    bool require_frames = true;
};

/// `.jsonl` files use the generic one-object-per-line layout:
///   {"video_id": ..., "embeddings": "a.f32" | "frames": "dir/", "references": [...], "fps": 30}
/// `.json` files are read as MSR-VTT style annotations ({"videos": [...], "sentences": [...]}).
/// Relative paths resolve against the manifest's directory. All problems are
/// collected and reported together in one DataError.
DatasetManifest load_manifest(const std::filesystem::path &path, const ManifestOptions &options = {});

void write_manifest_jsonl(const DatasetManifest &manifest, const std::filesystem::path &path);

struct FrameLoadOptions {
    std::size_t image_dim = 64;    ///< projection width for image frames
    std::uint64_t image_seed = 7;  ///< seed of the fixed thumbnail projection
};

/// Throws DataError when the frames cannot be read.
FrameSource load_frames(const ManifestEntry &entry, const FrameLoadOptions &options = {});

/// True when this build can decode image directories.
bool image_frames_supported();

}  // namespace recap
