// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <string_view>

#include "recap/backends.hpp"

namespace recap {

/// Seeded bag-of-words hash embedder: every normalized word maps to a fixed
/// pseudo-random vector in [-1, 1]^dim; a text embeds to the normalized sum.
class HashTextEmbedder {
  public:
    HashTextEmbedder(std::uint64_t seed, std::size_t dim);

    [[nodiscard]] Vector feature_vector(std::string_view feature) const;
    [[nodiscard]] EmbeddingVector embed(std::string_view text) const;
    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
    std::size_t dim_;
};

/// Video encoder over frames whose features already live in the embedding
/// space: mean of unit-normalized frames, renormalized.
class ToyVideoEncoder final : public VideoEncoder {
  public:
    ToyVideoEncoder(std::uint64_t seed, std::size_t dim) : text_(seed, dim) {}

    [[nodiscard]] std::size_t embedding_dim() const override { return text_.dim(); }
    [[nodiscard]] EmbeddingVector encode_text(std::string_view text) const override { return text_.embed(text); }
    [[nodiscard]] EmbeddingVector encode_frames(std::span<const Frame> frames) const override;
    [[nodiscard]] std::uint64_t parameter_checksum() const override;

  private:
    HashTextEmbedder text_;
};

class ToyImageTextScorer final : public ImageTextScorer {
  public:
    ToyImageTextScorer(std::uint64_t seed, std::size_t dim) : text_(seed, dim) {}

    [[nodiscard]] std::size_t embedding_dim() const override { return text_.dim(); }
    [[nodiscard]] EmbeddingVector embed_image(const Frame &frame) const override;
    [[nodiscard]] EmbeddingVector embed_text(std::string_view text) const override { return text_.embed(text); }
    [[nodiscard]] std::uint64_t parameter_checksum() const override;

  private:
    HashTextEmbedder text_;
};

class ToySentenceScorer final : public SentenceScorer {
  public:
    ToySentenceScorer(std::uint64_t seed, std::size_t dim) : text_(seed, dim) {}

    [[nodiscard]] double similarity(std::string_view a, std::string_view b) const override;
    [[nodiscard]] std::vector<double> similarity_matrix(std::span<const std::string> a,
                                                        std::span<const std::string> b) const override;
    [[nodiscard]] std::uint64_t parameter_checksum() const override;
    [[nodiscard]] const HashTextEmbedder &embedder() const { return text_; }

  private:
    HashTextEmbedder text_;
};

/// Row-major dense matrix, just enough for the toy LM.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vector data;

    [[nodiscard]] Vector apply(std::span<const double> x) const;             ///< M x
    [[nodiscard]] Vector apply_transposed(std::span<const double> y) const;  ///< M^T y
    [[nodiscard]] std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

/// Single linear-attention layer with tied output embeddings.
///
///   x_t  = input_t + pos_t
///   a_t  = softplus(Wq x_T) . softplus(Wk x_t)
///   h    = sum_t a_t (Wv x_t) / sum_t a_t
///   z    = scale * E (x_T + Wo h) + b
///
/// where x_T is the last position. All weights are fixed at construction.
class ToyCausalLm final : public CausalLm {
  public:
    ToyCausalLm(std::uint64_t seed, std::size_t width, std::vector<std::string> vocabulary);

    /// Identical embedding rows and zero bias: every input yields the uniform distribution.
    static ToyCausalLm uniform(std::size_t width, std::vector<std::string> vocabulary);

    [[nodiscard]] const Tokenizer &tokenizer() const override { return tokenizer_; }
    [[nodiscard]] std::size_t embedding_width() const override { return width_; }
    [[nodiscard]] Vector token_embedding(TokenId id) const override;
    [[nodiscard]] Vector next_logits(std::span<const Vector> prefix, std::span<const TokenId> tokens) const override;
    [[nodiscard]] std::vector<Vector> prefix_gradient(std::span<const Vector> prefix, std::span<const TokenId> tokens,
                                                      std::span<const double> grad_logits) const override;
    [[nodiscard]] std::uint64_t parameter_checksum() const override;

  private:
    struct Activations;
    ToyCausalLm(std::size_t width, std::vector<std::string> vocabulary);
    [[nodiscard]] Activations forward(std::span<const Vector> prefix, std::span<const TokenId> tokens) const;

    std::size_t width_;
    Tokenizer tokenizer_;
    DenseMatrix embeddings_;  // V x D
    DenseMatrix wq_, wk_, wv_, wo_;
    Vector bias_;
    double logit_scale_ = 2.0;
};

struct ToyBackendOptions {
    std::uint64_t seed = 7;
    std::size_t vision_dim = 64;
    std::size_t sentence_dim = 64;
    std::size_t lm_width = 32;
};

/// Video encoder and image-text scorer share one vision space; the sentence
/// scorer and LM get independent seeds.
BackendSuite make_toy_backends(const ToyBackendOptions &options = {});

}  // namespace recap
