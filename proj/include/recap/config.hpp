// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "recap/decoder.hpp"
#include "recap/keyframes.hpp"

namespace recap {

inline constexpr const char *kCodeVersion = "0.3.0";

/// Special corpus path: build the corpus from the manifest's own references.
inline constexpr const char *kManifestReferencesCorpus = "@references";

enum class BackendKind { toy, files, integration };
enum class DecodeMode { loss, prefix };

struct BackendConfig {
    BackendKind kind = BackendKind::toy;
    std::uint64_t seed = 7;
    std::size_t vision_dim = 64;
    std::size_t sentence_dim = 64;
    std::size_t lm_width = 32;
    std::string url;  ///< integration backend endpoint, e.g. http://127.0.0.1:8080
};

struct RunConfig {
    BackendConfig backend;
    std::string corpus_path = kManifestReferencesCorpus;
    std::string corpus_id = "testset";

    std::size_t retrieved_sentences = kDefaultRetrievedSentences;  // K
    std::size_t frequent_words = kDefaultFrequentWords;            // L
    std::size_t retrieval_frames = kDefaultRetrievalFrames;

    double sample_fps = kDefaultSampleFps;
    double keyframe_threshold = kDefaultKeyframeThreshold;  // lambda_CLIP
    AnchorMode anchor = AnchorMode::admitted;

    DecoderConfig decoder;
    DecodeMode mode = DecodeMode::loss;

    std::uint64_t seed = 0;
    // Runtime-only fields; they never change results and are left out of the fingerprint.
    std::size_t workers = 1;
    std::string output_dir = "out";
    /// Relative corpus paths resolve against this directory (the config file's, when loaded from one).
    std::filesystem::path base_dir;

    /// Throws ConfigError naming the first violated constraint.
    void validate() const;
};

nlohmann::json to_json(const RunConfig &config);

/// Missing keys keep their defaults; unknown keys and wrong types throw ConfigError.
RunConfig run_config_from_json(const nlohmann::json &j);

RunConfig load_run_config(const std::filesystem::path &path);

/// 16 hex digits over the serialized config (runtime fields excluded) and the code version.
std::string config_fingerprint(const RunConfig &config);

std::string to_string(AnchorMode mode);
std::string to_string(BackendKind kind);
std::string to_string(DecodeMode mode);
std::string to_string(Emission emission);

}  // namespace recap
