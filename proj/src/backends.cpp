// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/backends.hpp"

#include <algorithm>

#include "recap/errors.hpp"

namespace recap {

double ImageTextScorer::score(const EmbeddingVector &image, const EmbeddingVector &text) {
    return std::clamp(image.dot(text), -1.0, 1.0);
}

double ImageTextScorer::score(const Frame &frame, std::string_view text) const {
    return score(embed_image(frame), embed_text(text));
}

std::vector<double> SentenceScorer::similarity_matrix(std::span<const std::string> a,
                                                      std::span<const std::string> b) const {
    std::vector<double> out;
    out.reserve(a.size() * b.size());
    for (const auto &x : a) {
        for (const auto &y : b) {
            out.push_back(similarity(x, y));
        }
    }
    return out;
}

void CausalLm::check_inputs(std::span<const Vector> prefix, std::span<const TokenId> tokens) const {
    const std::size_t width = embedding_width();
    for (const auto &row : prefix) {
        if (row.size() != width) {
            throw ConfigError("causal lm: prefix embedding width " + std::to_string(row.size()) +
                              " does not match model width " + std::to_string(width));
        }
    }
    const auto &tok = tokenizer();
    for (TokenId id : tokens) {
        if (!tok.contains(id)) {
            throw InputError("causal lm: invalid token id " + std::to_string(id));
        }
    }
    if (prefix.empty() && tokens.empty()) {
        throw InputError("causal lm: empty input sequence");
    }
}

TokenDistribution CausalLm::next_distribution(std::span<const Vector> prefix, std::span<const TokenId> tokens) const {
    check_inputs(prefix, tokens);
    return TokenDistribution::from_logits(next_logits(prefix, tokens));
}

std::uint64_t BackendSuite::parameter_checksum() const {
    Fnv1a h;
    h.u64(video_encoder ? video_encoder->parameter_checksum() : 0);
    h.u64(image_text ? image_text->parameter_checksum() : 0);
    h.u64(lm ? lm->parameter_checksum() : 0);
    h.u64(sentence ? sentence->parameter_checksum() : 0);
    return h.digest();
}

std::vector<std::size_t> uniform_sample_indices(std::size_t length, std::size_t n_sample) {
    std::vector<std::size_t> idx(n_sample);
    for (std::size_t i = 0; i < n_sample; ++i) {
        idx[i] = i * length / n_sample;
    }
    return idx;
}

EmbeddingVector encode_video(const VideoEncoder &encoder, std::span<const Frame> frames, std::size_t n_sample) {
    if (frames.empty()) {
        throw InputError("encode_video: empty frame list");
    }
    if (n_sample == 0) {
        throw InputError("encode_video: n_sample must be >= 1");
    }
    std::vector<Frame> picked;
    picked.reserve(n_sample);
    for (std::size_t i : uniform_sample_indices(frames.size(), n_sample)) {
        picked.push_back(frames[i]);
    }
    return encoder.encode_frames(picked);
}

}  // namespace recap
