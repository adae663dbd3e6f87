// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "recap/config.hpp"
#include "recap/corpus_retrieval.hpp"
#include "recap/decoder.hpp"
#include "recap/manifest.hpp"
#include "recap/metrics.hpp"

namespace recap {

/// Builds the backend suite named by `config.backend`.
BackendSuite make_backends(const RunConfig &config);

/// Loads a saved index directory, reads a corpus file, or (for "@references")
/// indexes the manifest's own references.
CorpusIndex load_or_build_corpus(const RunConfig &config, const DatasetManifest &manifest, const VideoEncoder &encoder);

/// Per-video seed derived from the run seed and the video id.
std::uint64_t video_seed(std::uint64_t run_seed, const std::string &video_id);

struct VideoRecord {
    std::string video_id;
    bool ok = false;
    std::string error;
    CaptionResult result;
    RetrievalContext context;
    std::vector<std::size_t> keyframes;  ///< indices into the sampled frames
    std::size_t sampled_frames = 0;
};

struct CaptionRun {
    std::string fingerprint;
    std::vector<VideoRecord> records;  ///< sorted by video_id

    [[nodiscard]] std::size_t failed() const;
    /// True when more than 10% of the videos failed.
    [[nodiscard]] bool partial_failure() const;
};

/// Caption every manifest entry with `config.workers` threads. Per-video
/// failures are recorded, never thrown; setup failures throw.
CaptionRun run_caption(const RunConfig &config, const DatasetManifest &manifest);

/// Same as run_caption with `mode = prefix`: retrieved sentences become a text
/// prefix and both retrieval losses are switched off.
CaptionRun run_prefix_baseline(RunConfig config, const DatasetManifest &manifest);

nlohmann::json caption_run_json(const CaptionRun &run, const RunConfig &config);

/// Writes `<dir>/results.json` and returns its path.
std::filesystem::path write_caption_run(const CaptionRun &run, const RunConfig &config, const std::filesystem::path &dir);

struct EvaluationReport {
    std::string fingerprint;
    MetricReport metrics;

    [[nodiscard]] nlohmann::json to_json() const;
    [[nodiscard]] std::string table() const;
};

/// Scores the successful records of a results document. Throws DataError for an
/// empty results set or ids without references in the manifest (all ids listed).
EvaluationReport run_evaluate(const nlohmann::json &results, const DatasetManifest &manifest);

nlohmann::json read_json_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, const std::string &text);

inline const std::vector<std::string> &ablation_axes() {
    static const std::vector<std::string> axes = {"K", "L", "P", "corpus", "losses", "lambda_clip", "anchor"};
    return axes;
}

/// Returns `base` with one axis set. `losses` takes none, S, W, S+W or prefix.
/// Throws ConfigError for an unknown axis or unparsable value.
RunConfig apply_axis_value(RunConfig base, const std::string &axis, const std::string &value);

struct AblationRow {
    std::string value;
    std::string fingerprint;
    MetricReport metrics;
    std::size_t failed = 0;
};

struct AblationReport {
    std::string axis;
    std::vector<AblationRow> rows;

    [[nodiscard]] nlohmann::json to_json() const;
    [[nodiscard]] std::string table() const;
};

/// One caption + evaluate run per value. Writes per-value results under
/// `<out>/<axis>=<value>/`, plus ablation.json, ablation.txt and two SVG plots.
AblationReport run_ablation(const RunConfig &config, const DatasetManifest &manifest, const std::string &axis,
                            const std::vector<std::string> &values, const std::filesystem::path &out);

}  // namespace recap
