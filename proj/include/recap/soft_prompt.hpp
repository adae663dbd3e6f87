// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recap/backends.hpp"

namespace recap {

inline constexpr std::size_t kDefaultSoftTokens = 5;
inline constexpr double kDefaultInitNoise = 0.02;

/// Decoupled-weight-decay Adam hyperparameters.
struct AdamWOptions {
    double lr = 1e-4;
    double weight_decay = 0.3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamWState {
    std::vector<Vector> first_moment;
    std::vector<Vector> second_moment;
    std::uint64_t step = 0;
};

/// The P learnable prefix embeddings and their optimizer state. These are the
/// only parameters that change during captioning.
class SoftPrompt {
  public:
    explicit SoftPrompt(std::vector<Vector> rows);

    [[nodiscard]] const std::vector<Vector> &embeddings() const { return rows_; }
    [[nodiscard]] std::size_t size() const { return rows_.size(); }
    [[nodiscard]] std::size_t width() const { return rows_.front().size(); }
    [[nodiscard]] const AdamWState &optimizer_state() const { return state_; }
    [[nodiscard]] bool is_finite() const;

    /// One AdamW update. Returns false and leaves prompt and state untouched if
    /// the gradient has the wrong shape or a non-finite entry.
    bool apply_update(const std::vector<Vector> &gradient, const AdamWOptions &options);

  private:
    std::vector<Vector> rows_;
    AdamWState state_;
};

/// A fixed textual prompt drawn from the configured prompt set.
struct HardPrompt {
    std::string text;
    std::vector<TokenId> tokens;
};

const std::vector<std::string> &default_prompt_set();

/// Throws ConfigError if `text` is not in `prompt_set` or tokenizes to nothing.
HardPrompt make_hard_prompt(std::string_view text, const Tokenizer &tokenizer,
                            std::span<const std::string> prompt_set);

/// Every row is the mean hard-prompt token embedding plus N(0, sigma^2) noise.
SoftPrompt init_soft_prompt(const HardPrompt &hard, std::size_t p, std::uint64_t seed, const CausalLm &lm,
                            double sigma = kDefaultInitNoise);

/// Applies one update; see SoftPrompt::apply_update.
bool optimize_step(SoftPrompt &soft, const std::vector<Vector> &gradient, const AdamWOptions &options);

}  // namespace recap
