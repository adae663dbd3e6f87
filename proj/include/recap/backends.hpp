// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recap/embedding.hpp"
#include "recap/text.hpp"

namespace recap {

/// One video frame. `features` is whatever the frame source produced: a
/// thumbnail projection for image directories, or a precomputed embedding.
struct Frame {
    std::string id;
    Vector features;
};

/// Maps text into a retrieval embedding space.
class TextEncoder {
  public:
    virtual ~TextEncoder() = default;
    [[nodiscard]] virtual std::size_t embedding_dim() const = 0;
    [[nodiscard]] virtual EmbeddingVector encode_text(std::string_view text) const = 0;
};

/// Video-level encoder (the retrieval model). Shares its space with its text tower.
class VideoEncoder : public TextEncoder {
  public:
    [[nodiscard]] virtual EmbeddingVector encode_frames(std::span<const Frame> frames) const = 0;
    [[nodiscard]] virtual std::uint64_t parameter_checksum() const = 0;
};

/// Frame-level image/text matching model.
class ImageTextScorer {
  public:
    virtual ~ImageTextScorer() = default;
    [[nodiscard]] virtual std::size_t embedding_dim() const = 0;
    [[nodiscard]] virtual EmbeddingVector embed_image(const Frame &frame) const = 0;
    [[nodiscard]] virtual EmbeddingVector embed_text(std::string_view text) const = 0;
    [[nodiscard]] virtual std::uint64_t parameter_checksum() const = 0;

    /// Cosine of the two towers' embeddings, clamped to [-1, 1].
    [[nodiscard]] double score(const Frame &frame, std::string_view text) const;
    [[nodiscard]] static double score(const EmbeddingVector &image, const EmbeddingVector &text);
};

/// Text-text semantic similarity.
class SentenceScorer {
  public:
    virtual ~SentenceScorer() = default;

    /// Symmetric score in [-1, 1]. Throws InputError when either text is blank.
    [[nodiscard]] virtual double similarity(std::string_view a, std::string_view b) const = 0;

    /// scores[i * b.size() + j] = similarity(a[i], b[j]). Backends override to batch.
    [[nodiscard]] virtual std::vector<double> similarity_matrix(std::span<const std::string> a,
                                                                std::span<const std::string> b) const;

    [[nodiscard]] virtual std::uint64_t parameter_checksum() const = 0;
};

/// Frozen causal language model accepting continuous prefix embeddings.
///
/// The input sequence is `prefix` followed by the embeddings of `tokens`.
/// Implementations must expose the vector-Jacobian product of the next-token
/// logits with respect to the prefix rows; the soft-prompt optimizer relies on it.
class CausalLm {
  public:
    virtual ~CausalLm() = default;

    [[nodiscard]] virtual const Tokenizer &tokenizer() const = 0;
    [[nodiscard]] virtual std::size_t embedding_width() const = 0;
    [[nodiscard]] virtual Vector token_embedding(TokenId id) const = 0;

    [[nodiscard]] virtual Vector next_logits(std::span<const Vector> prefix,
                                             std::span<const TokenId> tokens) const = 0;

    /// Returns d<grad_logits, logits>/d prefix[r] for every prefix row r.
    [[nodiscard]] virtual std::vector<Vector> prefix_gradient(std::span<const Vector> prefix,
                                                              std::span<const TokenId> tokens,
                                                              std::span<const double> grad_logits) const = 0;

    [[nodiscard]] virtual std::uint64_t parameter_checksum() const = 0;

    [[nodiscard]] std::size_t vocab_size() const { return tokenizer().size(); }

    /// Softmax of next_logits after validating dimensions and token ids.
    [[nodiscard]] TokenDistribution next_distribution(std::span<const Vector> prefix,
                                                      std::span<const TokenId> tokens) const;

    /// Throws ConfigError on width mismatch and InputError on unknown token ids.
    void check_inputs(std::span<const Vector> prefix, std::span<const TokenId> tokens) const;
};

/// The four scorer roles used by the captioner. All members are shared read-only.
struct BackendSuite {
    std::shared_ptr<const VideoEncoder> video_encoder;
    std::shared_ptr<const ImageTextScorer> image_text;
    std::shared_ptr<const CausalLm> lm;
    std::shared_ptr<const SentenceScorer> sentence;

    /// Combined checksum over all backbone parameters.
    [[nodiscard]] std::uint64_t parameter_checksum() const;
};

inline constexpr std::size_t kDefaultRetrievalFrames = 16;

/// Uniformly subsamples `n_sample` frames (indices floor(i * len / n_sample))
/// and encodes them. Throws InputError on an empty frame list or n_sample == 0.
EmbeddingVector encode_video(const VideoEncoder &encoder, std::span<const Frame> frames,
                             std::size_t n_sample = kDefaultRetrievalFrames);

std::vector<std::size_t> uniform_sample_indices(std::size_t length, std::size_t n_sample);

}  // namespace recap
