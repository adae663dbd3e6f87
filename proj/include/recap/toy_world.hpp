// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "recap/config.hpp"
#include "recap/manifest.hpp"

namespace recap {

struct ToyWorldOptions {
    std::size_t videos = 3;
    std::uint64_t seed = 11;
    std::size_t frames_per_shot = 30;  ///< one second at 30 fps
    std::size_t shots = 2;
    double frame_noise = 0.02;
    std::size_t references = 3;
    BackendConfig backend;  ///< frames live in this backend's vision space
};

struct ToyWorld {
    DatasetManifest manifest;
    std::vector<std::string> corpus;  ///< distractor-rich sentence pool, references included
    RunConfig config;
};

/// Writes a small synthetic dataset to `dir`: frames/<id>.f32, manifest.jsonl,
/// corpus.txt and config.json. Frames are noisy image-space embeddings of
/// scene descriptions, so retrieval and keyframe scoring behave sensibly with
/// the toy backends. Deterministic in `options`.
ToyWorld write_toy_world(const std::filesystem::path &dir, const ToyWorldOptions &options = {});

}  // namespace recap
