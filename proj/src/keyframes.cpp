// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/keyframes.hpp"

#include <cmath>

#include "recap/errors.hpp"

namespace recap {

std::vector<std::size_t> sample_frame_indices(std::size_t frame_count, double native_fps, double fps) {
    if (frame_count == 0) {
        throw InputError("sample_frames: video has no frames");
    }
    if (!(fps > 0.0) || !(native_fps > 0.0)) {
        throw InputError("sample_frames: frame rates must be positive");
    }
    std::vector<std::size_t> out;
    for (std::size_t k = 0;; ++k) {
        // Timestamp k / fps lands on native frame floor(k * native / fps); the
        // epsilon absorbs rounding for exact multiples.
        const double position = static_cast<double>(k) * native_fps / fps;
        const auto index = static_cast<std::size_t>(std::floor(position + 1e-9));
        if (index >= frame_count) {
            break;
        }
        out.push_back(index);
    }
    return out;
}

std::vector<Frame> sample_frames(const FrameSource &video, double fps) {
    std::vector<Frame> out;
    for (std::size_t i : sample_frame_indices(video.frames.size(), video.native_fps, fps)) {
        out.push_back(video.frames[i]);
    }
    return out;
}

namespace {

constexpr double kSimilarityTolerance = 1e-12;

}  // namespace

std::vector<std::size_t> select_keyframe_indices(std::span<const EmbeddingVector> embeddings, double threshold,
                                                 AnchorMode mode) {
    if (embeddings.empty()) {
        throw InputError("select_keyframes: no frames");
    }
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw InputError("select_keyframes: threshold must lie in (0, 1]");
    }
    std::vector<std::size_t> admitted{0};
    std::size_t anchor = 0;
    for (std::size_t i = 1; i < embeddings.size(); ++i) {
        // Rounding can put the cosine of identical unit vectors just below 1.
        const bool admit = embeddings[i].dot(embeddings[anchor]) < threshold - kSimilarityTolerance;
        if (admit) {
            admitted.push_back(i);
        }
        if (admit || mode == AnchorMode::every) {
            anchor = i;
        }
    }
    return admitted;
}

KeyframeSet select_keyframes(std::span<const Frame> frames, const ImageTextScorer &scorer, double threshold,
                             AnchorMode mode) {
    if (frames.empty()) {
        throw InputError("select_keyframes: no frames");
    }
    std::vector<EmbeddingVector> embeddings;
    embeddings.reserve(frames.size());
    for (const auto &f : frames) {
        embeddings.push_back(scorer.embed_image(f));
    }
    KeyframeSet set;
    set.threshold = threshold;
    set.source_indices = select_keyframe_indices(embeddings, threshold, mode);
    for (std::size_t i : set.source_indices) {
        set.frames.push_back(frames[i]);
        set.embeddings.push_back(embeddings[i]);
    }
    return set;
}

}  // namespace recap
