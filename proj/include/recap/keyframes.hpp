// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "recap/backends.hpp"

namespace recap {

inline constexpr double kDefaultSampleFps = 3.0;
inline constexpr double kDefaultKeyframeThreshold = 0.9;

/// Decoded frames of one video at its native frame rate.
struct FrameSource {
    std::vector<Frame> frames;
    double native_fps = 30.0;
};

/// Indices of the frames at timestamps k / fps, k = 0, 1, ... that fall
/// inside the video. Always contains index 0.
std::vector<std::size_t> sample_frame_indices(std::size_t frame_count, double native_fps, double fps);

/// Throws InputError when the source is empty or fps is not positive.
std::vector<Frame> sample_frames(const FrameSource &video, double fps = kDefaultSampleFps);

enum class AnchorMode {
    admitted,  ///< only admitted frames become the new anchor
    every,     ///< every examined frame becomes the new anchor
};

/// Deduplicated keyframes (the set F and its size T).
struct KeyframeSet {
    std::vector<Frame> frames;
    std::vector<EmbeddingVector> embeddings;
    std::vector<std::size_t> source_indices;  ///< positions in the sampled frame list
    double threshold = kDefaultKeyframeThreshold;

    [[nodiscard]] std::size_t size() const { return frames.size(); }
};

/// Frame 0 is admitted and anchors; a later frame is admitted iff its dot
/// product with the current anchor is below `threshold`.
std::vector<std::size_t> select_keyframe_indices(std::span<const EmbeddingVector> embeddings, double threshold,
                                                 AnchorMode mode = AnchorMode::admitted);

/// Embeds frames with the scorer's image tower and applies select_keyframe_indices.
/// Throws InputError on empty input or a threshold outside (0, 1].
KeyframeSet select_keyframes(std::span<const Frame> frames, const ImageTextScorer &scorer,
                             double threshold = kDefaultKeyframeThreshold, AnchorMode mode = AnchorMode::admitted);

}  // namespace recap
